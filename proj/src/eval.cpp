#include "vsg/eval.hpp"

#include "vsg/errors.hpp"
#include "vsg/kernels.hpp"
#include "vsg/mask_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace vsg {

std::string_view to_string(ObjectMode mode) {
    return mode == ObjectMode::Strict ? "strict" : "lenient";
}

MatchTier match_tier(std::string_view pred, std::string_view gt, LabelKind kind, Judge& judge) {
    const std::string np = normalize_label(pred);
    const std::string ng = normalize_label(gt);
    if (np.empty() || ng.empty()) {
        throw Error(ErrorKind::InvalidInput, "labels must be non-empty");
    }
    if (np == ng) {
        return MatchTier::Identical;
    }
    return judge.judge(pred, gt, kind);
}

bool object_correct(MatchTier tier, ObjectMode mode, bool strict_includes_synonym) {
    if (mode == ObjectMode::Lenient) {
        return is_lenient_match(tier);
    }
    return tier == MatchTier::Identical || (strict_includes_synonym && tier == MatchTier::Synonym);
}

std::vector<ObjectMatch> match_objects(const std::map<ObjectId, std::string>& pred,
                                       const std::map<ObjectId, std::string>& gt, Judge& judge) {
    std::vector<ObjectMatch> out;
    out.reserve(gt.size());
    for (const auto& [id, gt_label] : gt) {
        ObjectMatch m{id, std::nullopt, gt_label, MatchTier::Mismatch};
        if (auto it = pred.find(id); it != pred.end()) {
            m.pred = it->second;
            m.tier = match_tier(it->second, gt_label, LabelKind::Object, judge);
        }
        out.push_back(std::move(m));
    }
    return out;
}

double object_accuracy(const std::map<ObjectId, std::string>& pred,
                       const std::map<ObjectId, std::string>& gt, ObjectMode mode, Judge& judge,
                       bool strict_includes_synonym) {
    if (gt.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (const auto& m : match_objects(pred, gt, judge)) {
        hits += object_correct(m.tier, mode, strict_includes_synonym) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(gt.size());
}

std::vector<AttributeMatch> match_attributes(
    const std::map<ObjectId, std::vector<std::string>>& pred,
    const std::map<ObjectId, std::vector<std::string>>& gt, Judge& judge) {
    std::vector<AttributeMatch> out;
    for (const auto& [id, gt_attrs] : gt) {
        const std::size_t base = out.size();
        for (const auto& a : gt_attrs) {
            out.push_back({id, a, std::nullopt, MatchTier::Mismatch});
        }
        auto it = pred.find(id);
        if (it == pred.end()) {
            continue;
        }
        const auto& pred_attrs = it->second;

        struct Edge {
            MatchTier tier;
            std::size_t gt_index;
            std::size_t pred_index;
        };
        std::vector<Edge> edges;
        for (std::size_t g = 0; g < gt_attrs.size(); ++g) {
            for (std::size_t p = 0; p < pred_attrs.size(); ++p) {
                const MatchTier tier = match_tier(pred_attrs[p], gt_attrs[g], LabelKind::Attribute, judge);
                if (is_lenient_match(tier)) {
                    edges.push_back({tier, g, p});
                }
            }
        }
        std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            return std::tuple(static_cast<int>(a.tier), a.gt_index, a.pred_index) <
                   std::tuple(static_cast<int>(b.tier), b.gt_index, b.pred_index);
        });
        std::vector<bool> gt_used(gt_attrs.size(), false);
        std::vector<bool> pred_used(pred_attrs.size(), false);
        for (const auto& e : edges) {
            if (gt_used[e.gt_index] || pred_used[e.pred_index]) {
                continue;
            }
            gt_used[e.gt_index] = true;
            pred_used[e.pred_index] = true;
            auto& slot = out[base + e.gt_index];
            slot.pred = pred_attrs[e.pred_index];
            slot.tier = e.tier;
        }
    }
    return out;
}

double attribute_recall(const std::map<ObjectId, std::vector<std::string>>& pred,
                        const std::map<ObjectId, std::vector<std::string>>& gt, Judge& judge) {
    const auto matches = match_attributes(pred, gt, judge);
    if (matches.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(matches.begin(), matches.end(),
                                    [](const AttributeMatch& m) { return m.pred.has_value(); });
    return static_cast<double>(hits) / static_cast<double>(matches.size());
}

double interval_iou(std::span<const FrameSpan> a, std::span<const FrameSpan> b) {
    const auto na = normalize_spans({a.begin(), a.end()});
    const auto nb = normalize_spans({b.begin(), b.end()});
    auto length = [](const std::vector<FrameSpan>& spans) {
        long long total = 0;
        for (const auto& s : spans) {
            total += s.end - s.start + 1;
        }
        return total;
    };
    long long inter = 0;
    std::size_t i = 0, j = 0;
    while (i < na.size() && j < nb.size()) {
        const int lo = std::max(na[i].start, nb[j].start);
        const int hi = std::min(na[i].end, nb[j].end);
        if (lo <= hi) {
            inter += hi - lo + 1;
        }
        if (na[i].end < nb[j].end) {
            ++i;
        } else {
            ++j;
        }
    }
    const long long uni = length(na) + length(nb) - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<RelationMatch> match_relations(std::span<const Relation> pred,
                                           std::span<const Relation> gt, Judge& judge,
                                           const EvalConfig& config) {
    struct Edge {
        double tiou;
        MatchTier tier;
        std::size_t g;
        std::size_t p;
    };
    std::vector<Edge> edges;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (pred[p].subject_id != gt[g].subject_id || pred[p].object_id != gt[g].object_id) {
                continue;
            }
            const double tiou = interval_iou(pred[p].spans, gt[g].spans);
            if (!(tiou > config.temporal_iou_thresh)) {
                continue;
            }
            const MatchTier tier = match_tier(pred[p].predicate, gt[g].predicate, LabelKind::Relation, judge);
            if (is_lenient_match(tier)) {
                edges.push_back({tiou, tier, g, p});
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.tiou != b.tiou) {
            return a.tiou > b.tiou;
        }
        return std::tuple(static_cast<int>(a.tier), a.g, a.p) <
               std::tuple(static_cast<int>(b.tier), b.g, b.p);
    });

    std::vector<RelationMatch> out(gt.size());
    for (std::size_t g = 0; g < gt.size(); ++g) {
        out[g].gt_index = g;
    }
    std::vector<bool> pred_used(pred.size(), false);
    for (const auto& e : edges) {
        if (out[e.g].recalled || pred_used[e.p]) {
            continue;
        }
        pred_used[e.p] = true;
        out[e.g].pred_index = e.p;
        out[e.g].tier = e.tier;
        out[e.g].temporal_iou = e.tiou;
        out[e.g].recalled = true;
    }
    return out;
}

double relation_recall(std::span<const Relation> pred, std::span<const Relation> gt,
                       Judge& judge, const EvalConfig& config) {
    if (gt.empty()) {
        return 0.0;
    }
    const auto matches = match_relations(pred, gt, judge, config);
    const auto hits = std::count_if(matches.begin(), matches.end(),
                                    [](const RelationMatch& m) { return m.recalled; });
    return static_cast<double>(hits) / static_cast<double>(gt.size());
}

namespace {

// Lenient label agreement of one endpoint id between the two graphs.
bool endpoint_matches(ObjectId id, const SceneGraph& pred, const SceneGraph& gt, Judge& judge) {
    if (id == kCameraId) {
        return true;
    }
    const SceneObject* p = pred.find_object(id);
    const SceneObject* g = gt.find_object(id);
    if (p == nullptr || g == nullptr) {
        return false;
    }
    return is_lenient_match(match_tier(p->label, g->label, LabelKind::Object, judge));
}

void fill_triplets(std::vector<RelationMatch>& matches, const SceneGraph& pred,
                   const SceneGraph& gt, Judge& judge) {
    for (auto& m : matches) {
        if (!m.recalled) {
            continue;
        }
        const Relation& r = gt.relations[m.gt_index];
        m.triplet = endpoint_matches(r.subject_id, pred, gt, judge) &&
                    endpoint_matches(r.object_id, pred, gt, judge);
    }
}

} // namespace

double triplet_recall(const SceneGraph& pred, const SceneGraph& gt, Judge& judge,
                      const EvalConfig& config) {
    if (gt.relations.empty()) {
        return 0.0;
    }
    auto matches = match_relations(pred.relations, gt.relations, judge, config);
    fill_triplets(matches, pred, gt, judge);
    const auto hits = std::count_if(matches.begin(), matches.end(),
                                    [](const RelationMatch& m) { return m.triplet; });
    return static_cast<double>(hits) / static_cast<double>(gt.relations.size());
}

double spatiotemporal_iou(const Trajectory& a, const Trajectory& b) {
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (const auto& [frame, mask] : a.masks) {
        const std::size_t area_a = area(mask);
        if (const BinaryMask* other = b.at(frame)) {
            const std::size_t i = intersection_area(mask, *other);
            inter += i;
            uni += area_a + area(*other) - i;
        } else {
            uni += area_a;
        }
    }
    for (const auto& [frame, mask] : b.masks) {
        if (a.at(frame) == nullptr) {
            uni += area(mask);
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Assignment hungarian_match(std::span<const double> scores, std::size_t rows, std::size_t cols) {
    if (scores.size() != rows * cols) {
        throw Error(ErrorKind::InvalidInput, "score matrix size does not match its shape");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw Error(ErrorKind::InvalidInput, "score matrix must be finite");
        }
    }
    Assignment result;
    if (rows == 0 || cols == 0) {
        return result;
    }
    // Shortest augmenting path with potentials on an n <= m cost matrix
    // (1-based, cost = -score). Transpose when there are more rows than cols.
    const bool transposed = rows > cols;
    const std::size_t n = transposed ? cols : rows;
    const std::size_t m = transposed ? rows : cols;
    auto cost = [&](std::size_t i, std::size_t j) {
        return transposed ? -scores[j * cols + i] : -scores[i * cols + j];
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] == 0) {
            continue;
        }
        const std::size_t i = p[j] - 1;
        const std::size_t col = j - 1;
        if (transposed) {
            result.pairs.emplace_back(col, i);
        } else {
            result.pairs.emplace_back(i, col);
        }
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    for (const auto& [r, c] : result.pairs) {
        result.total += scores[r * cols + c];
    }
    return result;
}

std::vector<ObjectId> verify_labels(std::span<const Trajectory> candidates,
                                    std::span<const Trajectory> verifier, double iou_floor) {
    const auto matrix = kernels::stiou_matrix_parallel(candidates, verifier);
    const Assignment assignment = hungarian_match(matrix, candidates.size(), verifier.size());
    std::vector<ObjectId> kept;
    for (const auto& [row, col] : assignment.pairs) {
        if (matrix[row * verifier.size() + col] >= iou_floor) {
            kept.push_back(candidates[row].object_id);
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

double average_recall(std::span<const Trajectory> pred, std::span<const Trajectory> gt,
                      double iou_thresh) {
    if (gt.empty()) {
        return 0.0;
    }
    const auto matrix = kernels::stiou_matrix_parallel(gt, pred);
    const Assignment assignment = hungarian_match(matrix, gt.size(), pred.size());
    std::size_t hits = 0;
    for (const auto& [row, col] : assignment.pairs) {
        if (matrix[row * pred.size() + col] >= iou_thresh) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(gt.size());
}

KappaResult cohens_kappa_detail(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::InvalidInput, "kappa needs two sequences of equal length");
    }
    if (a.empty()) {
        throw Error(ErrorKind::InvalidInput, "kappa needs at least one paired rating");
    }
    std::map<std::string, std::size_t> count_a, count_b;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++count_a[a[i]];
        ++count_b[b[i]];
        agree += a[i] == b[i] ? 1 : 0;
    }
    const double n = static_cast<double>(a.size());
    std::size_t chance_numerator = 0;
    for (const auto& [label, ca] : count_a) {
        if (auto it = count_b.find(label); it != count_b.end()) {
            chance_numerator += ca * it->second;
        }
    }
    KappaResult r;
    r.observed = static_cast<double>(agree) / n;
    r.expected = static_cast<double>(chance_numerator) / (n * n);
    if (chance_numerator == a.size() * a.size()) {
        r.kappa = agree == a.size() ? 1.0 : 0.0;
    } else {
        r.kappa = (r.observed - r.expected) / (1.0 - r.expected);
    }
    return r;
}

double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b) {
    return cohens_kappa_detail(a, b).kappa;
}

MatchReport match_scene_graph(const SceneGraph& pred, const SceneGraph& gt, Judge& judge,
                              const EvalConfig& config) {
    std::map<ObjectId, std::string> pred_labels, gt_labels;
    std::map<ObjectId, std::vector<std::string>> pred_attrs, gt_attrs;
    for (const auto& o : pred.objects) {
        pred_labels[o.object_id] = o.label;
        pred_attrs[o.object_id] = o.attributes;
    }
    for (const auto& o : gt.objects) {
        gt_labels[o.object_id] = o.label;
        gt_attrs[o.object_id] = o.attributes;
    }

    MatchReport report;
    report.config = config;
    report.objects = match_objects(pred_labels, gt_labels, judge);
    if (!report.objects.empty()) {
        std::size_t strict = 0, lenient = 0;
        for (const auto& m : report.objects) {
            strict += object_correct(m.tier, ObjectMode::Strict, config.strict_includes_synonym);
            lenient += object_correct(m.tier, ObjectMode::Lenient);
        }
        report.object_accuracy_strict = static_cast<double>(strict) / report.objects.size();
        report.object_accuracy_lenient = static_cast<double>(lenient) / report.objects.size();
    }

    report.attributes = match_attributes(pred_attrs, gt_attrs, judge);
    if (!report.attributes.empty()) {
        const auto hits = std::count_if(report.attributes.begin(), report.attributes.end(),
                                        [](const AttributeMatch& m) { return m.pred.has_value(); });
        report.attribute_recall = static_cast<double>(hits) / report.attributes.size();
    }

    report.relations = match_relations(pred.relations, gt.relations, judge, config);
    fill_triplets(report.relations, pred, gt, judge);
    if (!report.relations.empty()) {
        std::size_t rel = 0, trip = 0;
        for (const auto& m : report.relations) {
            rel += m.recalled;
            trip += m.triplet;
        }
        report.relation_recall = static_cast<double>(rel) / report.relations.size();
        report.triplet_recall = static_cast<double>(trip) / report.relations.size();
    }
    return report;
}

} // namespace vsg
