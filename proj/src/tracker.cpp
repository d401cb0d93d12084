#include "vsg/tracker.hpp"

#include "vsg/errors.hpp"
#include "vsg/mask_ops.hpp"

#include <algorithm>
#include <set>

namespace vsg {

void TrackerConfig::validate() const {
    auto check_fraction = [](double v, const char* name) {
        if (!(v > 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::ConfigError,
                        std::string(name) + " must lie in (0, 1], got " + std::to_string(v));
        }
    };
    check_fraction(tau_detection, "tau_detection");
    check_fraction(tau_match, "tau_match");
    check_fraction(dedup_iou, "dedup_iou");
    check_fraction(dedup_covis_fraction, "dedup_covis_fraction");
    if (check_interval < 1) {
        throw Error(ErrorKind::ConfigError, "check_interval must be at least 1");
    }
    if (morph_min_area < 0 || morph_radius < 0) {
        throw Error(ErrorKind::ConfigError, "morphology parameters must be non-negative");
    }
    if (!(filter.overlap_thresh > 0.0 && filter.overlap_thresh <= 1.0)) {
        throw Error(ErrorKind::ConfigError, "proposal overlap threshold must lie in (0, 1]");
    }
}

BreakpointReport frame_coverage_state(std::span<const BinaryMask> tracked,
                                      std::span<const BinaryMask> proposals, int width,
                                      int height, double tau_detection, FrameIndex frame) {
    const BinaryMask covered = mask_union(tracked, width, height);
    const BinaryMask untracked = complement(covered);
    const BinaryMask detected = mask_union(proposals, width, height);

    BreakpointReport report;
    report.frame = frame;
    report.untracked_area = area(untracked);
    report.overlap_area = intersection_area(untracked, detected);
    report.ratio = report.untracked_area == 0
                       ? 0.0
                       : static_cast<double>(report.overlap_area) /
                             static_cast<double>(report.untracked_area);
    report.triggered = report.untracked_area > 0 && report.ratio >= tau_detection;
    return report;
}

IdentityAssignment assign_identity(const BinaryMask& new_mask,
                                   const std::map<ObjectId, BinaryMask>& tracked,
                                   double tau_match, ObjectId next_id) {
    if (area(new_mask) == 0) {
        throw Error(ErrorKind::EmptyMask, "cannot assign an identity to an empty mask");
    }
    double best = -1.0;
    ObjectId best_id = 0;
    // std::map iterates ids in ascending order, so strict > keeps the smallest
    // id among ties.
    for (const auto& [id, mask] : tracked) {
        const double r = asym_overlap(new_mask, mask);
        if (r > best) {
            best = r;
            best_id = id;
        }
    }
    if (best >= tau_match) {
        return {best_id, false};
    }
    return {next_id, true};
}

namespace {

std::vector<BinaryMask> frame_candidates(const std::vector<BinaryMask>& proposals, int width,
                                         int height, const TrackerConfig& config) {
    for (const auto& p : proposals) {
        if (p.width != width || p.height != height) {
            throw Error(ErrorKind::InvalidDimensions, "proposal does not match the video size");
        }
    }
    if (!config.filter_proposals) {
        return proposals;
    }
    std::vector<BinaryMask> out;
    for (std::size_t idx : filter_proposals(proposals, config.filter)) {
        out.push_back(proposals[idx]);
    }
    return out;
}

std::map<ObjectId, BinaryMask> checked_propagate(Propagator& propagator,
                                                 const std::set<ObjectId>& registered,
                                                 FrameIndex from, FrameIndex to, int width,
                                                 int height) {
    std::map<ObjectId, BinaryMask> masks;
    try {
        masks = propagator.propagate(from, to);
    } catch (const PropagationError&) {
        throw;
    } catch (const std::exception& e) {
        throw PropagationError(to, e.what());
    }
    for (const auto& [id, mask] : masks) {
        if (!registered.contains(id)) {
            throw PropagationError(to, "propagator returned unregistered object " +
                                           std::to_string(id));
        }
        if (mask.width != width || mask.height != height || !is_canonical(mask)) {
            throw PropagationError(to, "propagator returned a malformed mask for object " +
                                           std::to_string(id));
        }
    }
    return masks;
}

} // namespace

OnlineResult online_track(const ProposalVideo& proposals, int width, int height, double fps,
                          Propagator& propagator, const TrackerConfig& config) {
    config.validate();
    const int n_frames = static_cast<int>(proposals.size());
    OnlineResult result;
    result.tracks = MaskVideo{width, height, fps, n_frames, {}};
    propagator.reset();
    if (n_frames == 0) {
        return result;
    }

    std::set<ObjectId> registered;
    ObjectId max_id = 0;
    auto register_object = [&](FrameIndex frame, const BinaryMask& mask) {
        const ObjectId id = max_id + 1;
        max_id = id;
        registered.insert(id);
        result.registry.entries.push_back({id, frame, mask});
        propagator.add_object(id, frame, mask);
        return id;
    };
    auto record = [&](FrameIndex frame, const std::map<ObjectId, BinaryMask>& masks) {
        MaskFrame out{frame, {}};
        for (const auto& [id, mask] : masks) {
            if (area(mask) > 0) {
                out.masks.emplace(id, mask);
            }
        }
        if (!out.masks.empty()) {
            result.tracks.frames.push_back(std::move(out));
        }
    };

    std::map<ObjectId, BinaryMask> current;
    for (const auto& candidate : frame_candidates(proposals[0], width, height, config)) {
        if (area(candidate) > 0) {
            const ObjectId id = register_object(0, candidate);
            current[id] = candidate;
        }
    }
    record(0, current);

    for (FrameIndex t = 1; t < n_frames; ++t) {
        std::map<ObjectId, BinaryMask> tracked;
        if (!registered.empty()) {
            for (auto& [id, mask] : checked_propagate(propagator, registered, t - 1, t, width, height)) {
                if (area(mask) > 0) {
                    tracked.emplace(id, std::move(mask));
                }
            }
        }

        if (t % config.check_interval == 0) {
            const auto candidates = frame_candidates(proposals[static_cast<std::size_t>(t)], width,
                                                     height, config);
            std::vector<BinaryMask> tracked_masks;
            tracked_masks.reserve(tracked.size());
            for (const auto& [id, mask] : tracked) {
                tracked_masks.push_back(mask);
            }
            const BreakpointReport report = frame_coverage_state(
                tracked_masks, candidates, width, height, config.tau_detection, t);
            result.breakpoints.push_back(report);

            if (report.triggered) {
                const BinaryMask untracked = complement(mask_union(tracked_masks, width, height));
                for (const auto& candidate : candidates) {
                    if (area(candidate) == 0 ||
                        asym_overlap(candidate, untracked) < config.tau_detection) {
                        continue;
                    }
                    const IdentityAssignment match =
                        assign_identity(candidate, tracked, config.tau_match, max_id + 1);
                    if (match.is_new) {
                        const ObjectId id = register_object(t, candidate);
                        tracked[id] = candidate;
                    }
                }
            }
        }
        record(t, tracked);
    }
    return result;
}

std::vector<Trajectory> offline_track(const Registry& registry, Propagator& propagator,
                                      int n_frames) {
    std::map<FrameIndex, std::vector<const RegistryEntry*>> entering;
    std::map<ObjectId, Trajectory> trajectories;
    int width = 0;
    int height = 0;
    for (const auto& entry : registry.entries) {
        if (entry.entry_frame < 0 || entry.entry_frame >= n_frames) {
            throw Error(ErrorKind::InvalidInput, "registry entry for object " +
                                                     std::to_string(entry.object_id) +
                                                     " lies outside the video");
        }
        if (!trajectories.try_emplace(entry.object_id, Trajectory{entry.object_id, entry.entry_frame, {}})
                 .second) {
            throw Error(ErrorKind::InvalidInput,
                        "duplicate registry id " + std::to_string(entry.object_id));
        }
        entering[entry.entry_frame].push_back(&entry);
        width = entry.mask.width;
        height = entry.mask.height;
    }

    propagator.reset();
    std::set<ObjectId> registered;
    for (FrameIndex t = 0; t < n_frames; ++t) {
        if (!registered.empty()) {
            for (auto& [id, mask] : checked_propagate(propagator, registered, t - 1, t, width, height)) {
                if (area(mask) > 0) {
                    trajectories.at(id).masks.emplace(t, std::move(mask));
                }
            }
        }
        if (auto it = entering.find(t); it != entering.end()) {
            for (const RegistryEntry* entry : it->second) {
                propagator.add_object(entry->object_id, t, entry->mask);
                registered.insert(entry->object_id);
                trajectories.at(entry->object_id).masks[t] = entry->mask;
            }
        }
    }

    std::vector<Trajectory> out;
    out.reserve(trajectories.size());
    for (auto& [id, traj] : trajectories) {
        out.push_back(std::move(traj));
    }
    return out;
}

std::vector<Trajectory> postfilter(std::vector<Trajectory> trajectories,
                                   const TrackerConfig& config) {
    std::sort(trajectories.begin(), trajectories.end(),
              [](const Trajectory& a, const Trajectory& b) { return a.object_id < b.object_id; });

    std::vector<bool> dropped(trajectories.size(), false);
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        for (std::size_t j = i + 1; j < trajectories.size() && !dropped[i]; ++j) {
            if (dropped[j]) {
                continue;
            }
            const auto& a = trajectories[i];
            const auto& b = trajectories[j];
            std::size_t covisible = 0;
            std::size_t agreeing = 0;
            for (const auto& [frame, mask] : a.masks) {
                if (const BinaryMask* other = b.at(frame)) {
                    ++covisible;
                    if (iou(mask, *other) >= config.dedup_iou) {
                        ++agreeing;
                    }
                }
            }
            if (covisible == 0 ||
                static_cast<double>(agreeing) / static_cast<double>(covisible) <
                    config.dedup_covis_fraction) {
                continue;
            }
            // Keep the longer-lived track; on a tie keep the smaller id (i).
            if (b.masks.size() > a.masks.size()) {
                dropped[i] = true;
            } else {
                dropped[j] = true;
            }
        }
    }

    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        if (dropped[i]) {
            continue;
        }
        Trajectory cleaned{trajectories[i].object_id, 0, {}};
        for (const auto& [frame, mask] : trajectories[i].masks) {
            BinaryMask m = morph_cleanup(mask, config.morph_min_area, config.morph_radius);
            if (area(m) > 0) {
                cleaned.masks.emplace(frame, std::move(m));
            }
        }
        if (!cleaned.masks.empty()) {
            cleaned.entry_frame = cleaned.masks.begin()->first;
            out.push_back(std::move(cleaned));
        }
    }
    return out;
}

double mask_coverage(std::span<const Trajectory> trajectories, int width, int height,
                     int n_frames) {
    if (n_frames <= 0 || width <= 0 || height <= 0) {
        return 0.0;
    }
    const double pixels = static_cast<double>(width) * static_cast<double>(height);
    double total = 0.0;
    for (FrameIndex t = 0; t < n_frames; ++t) {
        std::vector<BinaryMask> present;
        for (const auto& traj : trajectories) {
            if (const BinaryMask* m = traj.at(t)) {
                present.push_back(*m);
            }
        }
        if (!present.empty()) {
            total += static_cast<double>(area(mask_union(present, width, height))) / pixels;
        }
    }
    return total / static_cast<double>(n_frames);
}

double mask_coverage(const MaskVideo& video) {
    const auto trajectories = to_trajectories(video);
    return mask_coverage(trajectories, video.width, video.height, video.n_frames);
}

} // namespace vsg
