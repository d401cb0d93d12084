#pragma once

#include "vsg/tracker.hpp"
#include "vsg/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vsg {

enum class ShapeKind { Rectangle, Disk };

/// One moving shape. Rectangles are anchored at their top-left corner, disks
/// at their centre. The shape exists on frames [entry_frame, exit_frame).
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Rectangle;
    double x = 0.0;
    double y = 0.0;
    int w = 0;          // rectangle
    int h = 0;          // rectangle
    double radius = 0;  // disk
    double vx = 0.0;    // px per frame
    double vy = 0.0;
    int entry_frame = 0;
    int exit_frame = 0;
    bool occluder = false;

    bool operator==(const ShapeSpec&) const = default;
};

struct SceneSpec {
    std::uint64_t seed = 0;
    int n_frames = 0;
    int width = 0;
    int height = 0;
    double fps = 1.0;
    /// Adds a background region covering every pixel no shape covers, so the
    /// ground truth is a full panoptic partition of each frame.
    bool background = true;
    std::vector<ShapeSpec> shapes;

    /// Throws InvalidSpec.
    void validate() const;

    bool operator==(const SceneSpec&) const = default;
};

struct NoiseSpec {
    double drop_prob = 0.0;
    double split_prob = 0.0;
    double duplicate_prob = 0.0;
    int jitter_px = 0;
    std::uint64_t seed = 0;

    /// Throws InvalidSpec.
    void validate() const;

    bool operator==(const NoiseSpec&) const = default;
};

/// Fraction of a shape that must be visible for it to count as present.
inline constexpr double kVisibilityFloor = 0.05;

struct World {
    SceneSpec spec;
    /// Ground-truth trajectories with canonical ids: ordered by first visible
    /// frame, then by area on that frame (largest first), then by spec order
    /// with the background first.
    std::vector<Trajectory> trajectories;
    MaskVideo video;
    /// Source of each ground-truth id: index into spec.shapes, or -1 for the
    /// background.
    std::map<ObjectId, int> source;
};

/// Rasterises a scene. Non-occluders are painted first, then occluders, each
/// group in spec order; later paint wins. Throws InvalidSpec.
World generate_scene(const SceneSpec& spec);

/// Visible masks of `shape` over all frames ignoring every other shape
/// (used by tests as the geometric reference).
BinaryMask rasterize_shape(const ShapeSpec& shape, FrameIndex frame, int width, int height);

/// Pixel count of the shape without frame clipping.
std::size_t unclipped_area(const ShapeSpec& shape, FrameIndex frame);

/// Proposal pathologies applied to the ground-truth masks of one frame, in
/// input order: drop, split into two row halves, duplicate, jitter.
/// Deterministic in (noise.seed, frame, input order).
std::vector<BinaryMask> noisy_proposals(std::span<const BinaryMask> gt_masks,
                                        const NoiseSpec& noise, FrameIndex frame);

/// noisy_proposals over every frame of a ground-truth video (masks taken in
/// ascending id order).
ProposalVideo noisy_proposal_video(const MaskVideo& video, const NoiseSpec& noise);

/// Propagator that answers from ground truth.
///
/// A registration is bound to the ground-truth trajectory it best matches by
/// IoU at the registration frame. A registration matching nothing (best IoU
/// below 0.1) becomes a static ghost of its registration mask.
class OraclePropagator final : public Propagator {
public:
    OraclePropagator(std::vector<Trajectory> ground_truth, int width, int height,
                     std::optional<NoiseSpec> degradation = std::nullopt);
    explicit OraclePropagator(const World& world,
                              std::optional<NoiseSpec> degradation = std::nullopt);

    void reset() override;
    void add_object(ObjectId id, FrameIndex frame, const BinaryMask& mask) override;
    std::map<ObjectId, BinaryMask> propagate(FrameIndex current_frame,
                                             FrameIndex target_frame) override;

    /// Ground-truth id bound to a registration, or nullopt for a ghost.
    std::optional<ObjectId> binding(ObjectId id) const;

private:
    struct Binding {
        std::optional<std::size_t> gt_index;
        BinaryMask ghost;
    };

    std::vector<Trajectory> ground_truth_;
    int width_;
    int height_;
    std::optional<NoiseSpec> degradation_;
    std::map<ObjectId, Binding> bindings_;
};

/// Random but valid scene for property suites: 2-4 shapes mixing rectangles
/// and disks, frame-0 and later entries, exits, and an occluder crossing.
SceneSpec random_scene_spec(std::uint64_t seed, int n_frames = 24, int width = 64,
                            int height = 48);

} // namespace vsg
