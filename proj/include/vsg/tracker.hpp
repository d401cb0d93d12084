#pragma once

#include "vsg/mask.hpp"
#include "vsg/proposal_filter.hpp"
#include "vsg/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace vsg {

/// Mask propagator contract (the role a video segmentation model plays).
///
/// The tracker registers objects with a prompt mask at a frame and then asks
/// for their masks at later frames. An implementation returns one entry per
/// registered object; an empty mask means the object is lost at that frame.
/// Implementations must be deterministic and never invent object ids.
class Propagator {
public:
    virtual ~Propagator() = default;

    /// Drops every registered object.
    virtual void reset() = 0;

    virtual void add_object(ObjectId id, FrameIndex frame, const BinaryMask& mask) = 0;

    /// Masks of all registered objects at `target_frame`, given that the
    /// propagator last produced masks for `current_frame`.
    virtual std::map<ObjectId, BinaryMask> propagate(FrameIndex current_frame,
                                                     FrameIndex target_frame) = 0;
};

struct TrackerConfig {
    double tau_detection = 0.1;
    double tau_match = 0.5;
    int check_interval = 1;
    double dedup_iou = 0.8;
    double dedup_covis_fraction = 0.8;
    int morph_min_area = 200;
    int morph_radius = 1;
    ProposalFilterOptions filter;
    /// Run the redundancy filter on every frame's proposals before use.
    bool filter_proposals = true;

    /// Throws ConfigError when a fraction is outside (0, 1] or the check
    /// interval is not positive.
    void validate() const;
};

struct BreakpointReport {
    FrameIndex frame = 0;
    std::size_t untracked_area = 0;
    std::size_t overlap_area = 0;
    double ratio = 0.0;
    bool triggered = false;
};

/// Coverage state of one frame: untracked region U = not(union(tracked)),
/// detected region D = union(proposals), ratio = |U & D| / |U| (0 when U is
/// empty). Triggered when ratio >= tau_detection.
BreakpointReport frame_coverage_state(std::span<const BinaryMask> tracked,
                                      std::span<const BinaryMask> proposals, int width,
                                      int height, double tau_detection, FrameIndex frame = 0);

struct IdentityAssignment {
    ObjectId id = 0;
    bool is_new = false;

    bool operator==(const IdentityAssignment&) const = default;
};

/// Matches a new mask to the tracked object covering the largest fraction of
/// it. Reuses that id when the fraction reaches `tau_match`, otherwise returns
/// `next_id`. Ties go to the smaller id. Throws EmptyMask for an empty mask.
IdentityAssignment assign_identity(const BinaryMask& new_mask,
                                   const std::map<ObjectId, BinaryMask>& tracked,
                                   double tau_match, ObjectId next_id);

/// Per-frame proposal lists; index = frame.
using ProposalVideo = std::vector<std::vector<BinaryMask>>;

struct OnlineResult {
    MaskVideo tracks;
    Registry registry;
    std::vector<BreakpointReport> breakpoints; // one per checked frame
};

/// First pass: registers frame-0 proposals, propagates frame to frame, and
/// registers new objects at breakpoints. `proposals.size()` is the number of
/// frames.
OnlineResult online_track(const ProposalVideo& proposals, int width, int height, double fps,
                          Propagator& propagator, const TrackerConfig& config);

/// Second pass: resets the propagator, re-initialises each object at its
/// recorded entry frame and propagates once through all frames.
std::vector<Trajectory> offline_track(const Registry& registry, Propagator& propagator,
                                      int n_frames);

/// Drops near-duplicate trajectories, then cleans every mask morphologically.
std::vector<Trajectory> postfilter(std::vector<Trajectory> trajectories,
                                   const TrackerConfig& config);

/// Mean over frames of the fraction of pixels covered by any trajectory.
double mask_coverage(std::span<const Trajectory> trajectories, int width, int height,
                     int n_frames);
double mask_coverage(const MaskVideo& video);

} // namespace vsg
