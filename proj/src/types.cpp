#include "vsg/types.hpp"

#include "vsg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace vsg {

const BinaryMask* Trajectory::at(FrameIndex frame) const {
    auto it = masks.find(frame);
    return it == masks.end() ? nullptr : &it->second;
}

void validate_mask_video(const MaskVideo& video) {
    if (video.width <= 0 || video.height <= 0) {
        throw Error(ErrorKind::InvalidInput, "mask video dimensions must be positive");
    }
    if (!(video.fps > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "mask video fps must be positive");
    }
    FrameIndex previous = -1;
    for (const auto& frame : video.frames) {
        if (frame.frame_index <= previous) {
            throw Error(ErrorKind::InvalidInput,
                        "frame indices must be strictly increasing (saw " +
                            std::to_string(frame.frame_index) + " after " +
                            std::to_string(previous) + ")");
        }
        if (frame.frame_index >= video.n_frames) {
            throw Error(ErrorKind::InvalidInput, "frame " + std::to_string(frame.frame_index) +
                                                     " is beyond n_frames " +
                                                     std::to_string(video.n_frames));
        }
        previous = frame.frame_index;
        for (const auto& [id, mask] : frame.masks) {
            if (id <= 0) {
                throw Error(ErrorKind::InvalidInput,
                            "object ids must be positive, got " + std::to_string(id));
            }
            if (mask.width != video.width || mask.height != video.height) {
                throw Error(ErrorKind::InvalidInput,
                            "mask for object " + std::to_string(id) + " at frame " +
                                std::to_string(frame.frame_index) +
                                " does not match the video dimensions");
            }
            if (!is_canonical(mask)) {
                throw Error(ErrorKind::CorruptMask,
                            "mask for object " + std::to_string(id) + " at frame " +
                                std::to_string(frame.frame_index) + " is corrupt");
            }
        }
    }
}

MaskVideo to_mask_video(const std::vector<Trajectory>& trajectories, int width, int height,
                        double fps, int n_frames) {
    std::map<FrameIndex, MaskFrame> by_frame;
    for (const auto& traj : trajectories) {
        for (const auto& [frame, mask] : traj.masks) {
            auto& slot = by_frame[frame];
            slot.frame_index = frame;
            slot.masks[traj.object_id] = mask;
        }
    }
    MaskVideo video{width, height, fps, n_frames, {}};
    video.frames.reserve(by_frame.size());
    for (auto& [frame, slot] : by_frame) {
        video.frames.push_back(std::move(slot));
    }
    return video;
}

std::vector<Trajectory> to_trajectories(const MaskVideo& video) {
    std::map<ObjectId, Trajectory> by_id;
    for (const auto& frame : video.frames) {
        for (const auto& [id, mask] : frame.masks) {
            auto [it, inserted] = by_id.try_emplace(id);
            if (inserted) {
                it->second.object_id = id;
                it->second.entry_frame = frame.frame_index;
            }
            it->second.masks[frame.frame_index] = mask;
        }
    }
    std::vector<Trajectory> out;
    out.reserve(by_id.size());
    for (auto& [id, traj] : by_id) {
        out.push_back(std::move(traj));
    }
    return out;
}

std::string_view to_string(RelationCategory category) {
    switch (category) {
    case RelationCategory::Spatial: return "spatial";
    case RelationCategory::Functional: return "functional";
    case RelationCategory::Stateful: return "stateful";
    case RelationCategory::Motion: return "motion";
    case RelationCategory::Social: return "social";
    case RelationCategory::Attentional: return "attentional";
    case RelationCategory::EventLevel: return "event_level";
    }
    return "spatial";
}

std::optional<RelationCategory> parse_relation_category(std::string_view text) {
    std::string key;
    for (char c : text) {
        key.push_back(c == '-' || c == ' ' ? '_'
                                           : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    static const std::pair<std::string_view, RelationCategory> table[] = {
        {"spatial", RelationCategory::Spatial},         {"functional", RelationCategory::Functional},
        {"stateful", RelationCategory::Stateful},       {"motion", RelationCategory::Motion},
        {"social", RelationCategory::Social},           {"attentional", RelationCategory::Attentional},
        {"event_level", RelationCategory::EventLevel},
    };
    for (const auto& [name, value] : table) {
        if (key == name) {
            return value;
        }
    }
    return std::nullopt;
}

std::vector<FrameSpan> normalize_spans(std::vector<FrameSpan> spans) {
    std::sort(spans.begin(), spans.end());
    std::vector<FrameSpan> merged;
    for (const auto& s : spans) {
        if (!merged.empty() && s.start <= merged.back().end + 1) {
            merged.back().end = std::max(merged.back().end, s.end);
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

const SceneObject* SceneGraph::find_object(ObjectId id) const {
    for (const auto& obj : objects) {
        if (obj.object_id == id) {
            return &obj;
        }
    }
    return nullptr;
}

namespace {

std::string relation_key(const Relation& r) {
    return "relationships[" + std::to_string(r.subject_id) + "|" + r.predicate + "|" +
           std::to_string(r.object_id) + "]";
}

} // namespace

std::vector<Violation> validate_scene_graph(const SceneGraph& graph) {
    std::vector<Violation> out;
    std::set<ObjectId> ids;
    for (const auto& obj : graph.objects) {
        const std::string field = "objects[" + std::to_string(obj.object_id) + "]";
        if (obj.object_id == kCameraId) {
            out.push_back({field + ".id", "camera id reserved"});
        } else if (obj.object_id <= 0) {
            out.push_back({field + ".id", "non-positive object id"});
        }
        if (!ids.insert(obj.object_id).second) {
            out.push_back({field + ".id", "duplicate object id"});
        }
        if (obj.label.empty()) {
            out.push_back({field + ".label", "empty label"});
        }
    }

    for (const auto& rel : graph.relations) {
        const std::string key = relation_key(rel);
        if (rel.subject_id == rel.object_id) {
            out.push_back({key, "self-relation"});
        }
        if (rel.subject_id != kCameraId && !ids.contains(rel.subject_id)) {
            out.push_back({key + ".subject_id", "unknown endpoint"});
        }
        if (rel.object_id != kCameraId && !ids.contains(rel.object_id)) {
            out.push_back({key + ".object_id", "unknown endpoint"});
        }
        if (rel.predicate.empty()) {
            out.push_back({key + ".predicate", "empty predicate"});
        }
        if (rel.spans.empty()) {
            out.push_back({key + ".spans", "empty spans"});
        }
        for (std::size_t i = 0; i < rel.spans.size(); ++i) {
            const auto& s = rel.spans[i];
            if (s.start > s.end) {
                out.push_back({key + ".spans", "span start after end"});
            }
            if (s.start < 0) {
                out.push_back({key + ".spans", "negative frame"});
            }
            if (graph.video.n_frames > 0 && s.end >= graph.video.n_frames) {
                out.push_back({key + ".spans", "span beyond video"});
            }
            if (i > 0 && s.start <= rel.spans[i - 1].end) {
                out.push_back({key + ".spans", "spans overlapping or unsorted"});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<std::string, bool> split_uncertain_suffix(std::string_view raw_label) {
    constexpr std::string_view marker = "(uncertain)";
    std::string_view label = raw_label;
    auto trim_right = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
            s.remove_suffix(1);
        }
        return s;
    };
    label = trim_right(label);
    if (label.size() >= marker.size() && label.substr(label.size() - marker.size()) == marker) {
        label.remove_suffix(marker.size());
        return {std::string(trim_right(label)), true};
    }
    return {std::string(raw_label), false};
}

} // namespace vsg
