#pragma once

#include "vsg/judge.hpp"
#include "vsg/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vsg {

enum class ObjectMode { Strict, Lenient };

std::string_view to_string(ObjectMode mode);

struct EvalConfig {
    /// Relations need temporal IoU strictly above this.
    double temporal_iou_thresh = 0.5;
    ObjectMode object_mode = ObjectMode::Strict;
    /// Average recall counts a ground-truth track when its matched prediction
    /// reaches this spatiotemporal IoU.
    double mask_iou_thresh = 0.5;
    /// Count Synonym as correct in strict object accuracy.
    bool strict_includes_synonym = false;
};

/// Judge verdict for one label pair. Labels equal after normalize_label are
/// Identical without consulting the judge. Throws InvalidInput for an empty
/// label; judge failures propagate as Error(JudgeUnavailable).
MatchTier match_tier(std::string_view pred, std::string_view gt, LabelKind kind, Judge& judge);

bool object_correct(MatchTier tier, ObjectMode mode, bool strict_includes_synonym = false);

struct ObjectMatch {
    ObjectId id = 0;
    std::optional<std::string> pred; // nullopt: no prediction for this id
    std::string gt;
    MatchTier tier = MatchTier::Mismatch;
};

/// One entry per ground-truth id; a missing prediction is a Mismatch.
std::vector<ObjectMatch> match_objects(const std::map<ObjectId, std::string>& pred,
                                       const std::map<ObjectId, std::string>& gt, Judge& judge);

/// Fraction of ground-truth objects whose predicted label is correct under
/// `mode`; 0 when there are no ground-truth objects.
double object_accuracy(const std::map<ObjectId, std::string>& pred,
                       const std::map<ObjectId, std::string>& gt, ObjectMode mode, Judge& judge,
                       bool strict_includes_synonym = false);

struct AttributeMatch {
    ObjectId id = 0;
    std::string gt;
    std::optional<std::string> pred; // the predicted attribute credited, if any
    MatchTier tier = MatchTier::Mismatch;
};

/// Per object, each ground-truth attribute may be credited by at most one
/// leniently-matching predicted attribute of the same object and vice versa.
/// Pairs are taken greedily by tier, then ground-truth order, then prediction
/// order.
std::vector<AttributeMatch> match_attributes(
    const std::map<ObjectId, std::vector<std::string>>& pred,
    const std::map<ObjectId, std::vector<std::string>>& gt, Judge& judge);

double attribute_recall(const std::map<ObjectId, std::vector<std::string>>& pred,
                        const std::map<ObjectId, std::vector<std::string>>& gt, Judge& judge);

/// IoU of the inclusive frame sets covered by two span lists; 0 when both are
/// empty.
double interval_iou(std::span<const FrameSpan> a, std::span<const FrameSpan> b);

struct RelationMatch {
    std::size_t gt_index = 0;
    std::optional<std::size_t> pred_index;
    MatchTier tier = MatchTier::Mismatch;
    double temporal_iou = 0.0;
    bool recalled = false;
    bool triplet = false;
};

/// One-to-one greedy matching in descending temporal IoU. A pair is eligible
/// when subject and object ids agree, the predicates match leniently and the
/// temporal IoU is strictly above the threshold. `triplet` is only filled in
/// by match_scene_graph.
std::vector<RelationMatch> match_relations(std::span<const Relation> pred,
                                           std::span<const Relation> gt, Judge& judge,
                                           const EvalConfig& config);

double relation_recall(std::span<const Relation> pred, std::span<const Relation> gt,
                       Judge& judge, const EvalConfig& config);

/// Relation recall that additionally requires both endpoint labels to match
/// leniently. The camera id matches itself.
double triplet_recall(const SceneGraph& pred, const SceneGraph& gt, Judge& judge,
                      const EvalConfig& config);

/// Sum over frames of |A & B| divided by the sum of |A | B|; 0 when both are
/// empty everywhere.
double spatiotemporal_iou(const Trajectory& a, const Trajectory& b);

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (row, col), sorted by row
    double total = 0.0;
};

/// Maximum-weight assignment of min(rows, cols) pairs. `scores` is row-major.
Assignment hungarian_match(std::span<const double> scores, std::size_t rows, std::size_t cols);

/// Ids of candidate trajectories whose Hungarian-matched verifier trajectory
/// reaches `iou_floor`. Masks are never modified.
std::vector<ObjectId> verify_labels(std::span<const Trajectory> candidates,
                                    std::span<const Trajectory> verifier, double iou_floor = 0.3);

/// Fraction of ground-truth trajectories whose Hungarian-matched prediction
/// has spatiotemporal IoU >= `iou_thresh`; 0 without ground truth.
double average_recall(std::span<const Trajectory> pred, std::span<const Trajectory> gt,
                      double iou_thresh = 0.5);

struct KappaResult {
    double observed = 0.0;
    double expected = 0.0;
    double kappa = 0.0;
};

/// Cohen's kappa for two raters. Throws InvalidInput on length mismatch or
/// empty input.
KappaResult cohens_kappa_detail(std::span<const std::string> a, std::span<const std::string> b);
double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b);

struct MatchReport {
    EvalConfig config;
    std::vector<ObjectMatch> objects;
    std::vector<AttributeMatch> attributes;
    std::vector<RelationMatch> relations;
    double object_accuracy_strict = 0.0;
    double object_accuracy_lenient = 0.0;
    double attribute_recall = 0.0;
    double relation_recall = 0.0;
    double triplet_recall = 0.0;
    std::optional<double> average_recall;
};

/// Full scene-graph comparison. Objects are aligned by id.
MatchReport match_scene_graph(const SceneGraph& pred, const SceneGraph& gt, Judge& judge,
                              const EvalConfig& config);

} // namespace vsg
