#pragma once

#include "vsg/mask.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vsg {

using ObjectId = int;
using FrameIndex = int;

/// Reserved subject/object id for the camera (observer). Never an object.
inline constexpr ObjectId kCameraId = -1;

struct MaskFrame {
    FrameIndex frame_index = 0;
    std::map<ObjectId, BinaryMask> masks;

    bool operator==(const MaskFrame&) const = default;
};

/// Per-frame object masks for one video. Frames are strictly increasing.
/// `n_frames` is the length of the video, which may exceed the last stored
/// frame when trailing frames hold no masks.
struct MaskVideo {
    int width = 0;
    int height = 0;
    double fps = 1.0;
    int n_frames = 0;
    std::vector<MaskFrame> frames;

    bool operator==(const MaskVideo&) const = default;
};

struct Trajectory {
    ObjectId object_id = 0;
    FrameIndex entry_frame = 0;
    std::map<FrameIndex, BinaryMask> masks;

    /// Mask at `frame`, or nullptr when the object is absent there.
    const BinaryMask* at(FrameIndex frame) const;

    bool operator==(const Trajectory&) const = default;
};

struct RegistryEntry {
    ObjectId object_id = 0;
    FrameIndex entry_frame = 0;
    BinaryMask mask;

    bool operator==(const RegistryEntry&) const = default;
};

/// Entry record of every object discovered by the online pass, in
/// registration order.
struct Registry {
    std::vector<RegistryEntry> entries;

    bool operator==(const Registry&) const = default;
};

/// Throws InvalidInput when frame indices are not strictly increasing, ids are
/// not positive, or masks disagree on dimensions.
void validate_mask_video(const MaskVideo& video);

/// Trajectories -> per-frame layout. Frames without any mask are omitted.
MaskVideo to_mask_video(const std::vector<Trajectory>& trajectories, int width, int height,
                        double fps, int n_frames);

/// Per-frame layout -> trajectories, ordered by id. Entry frame is the first
/// frame holding a mask for the id.
std::vector<Trajectory> to_trajectories(const MaskVideo& video);

enum class RelationCategory {
    Spatial,
    Functional,
    Stateful,
    Motion,
    Social,
    Attentional,
    EventLevel,
};

std::string_view to_string(RelationCategory category);
std::optional<RelationCategory> parse_relation_category(std::string_view text);

struct FrameSpan {
    FrameIndex start = 0;
    FrameIndex end = 0; // inclusive

    bool operator==(const FrameSpan&) const = default;
    auto operator<=>(const FrameSpan&) const = default;
};

/// Sorts spans and merges overlapping or touching ones ([0,3] + [4,6] -> [0,6]).
std::vector<FrameSpan> normalize_spans(std::vector<FrameSpan> spans);

struct SceneObject {
    ObjectId object_id = 0;
    std::string label;
    bool uncertain = false;
    std::vector<std::string> attributes;

    bool operator==(const SceneObject&) const = default;
};

struct Relation {
    ObjectId subject_id = 0;
    std::string predicate;
    ObjectId object_id = 0;
    std::vector<FrameSpan> spans;
    RelationCategory category = RelationCategory::Spatial;

    bool operator==(const Relation&) const = default;
};

struct VideoMeta {
    int n_frames = 0;
    double fps = 1.0;
    int width = 0;
    int height = 0;

    bool operator==(const VideoMeta&) const = default;
};

struct SceneGraph {
    VideoMeta video;
    std::vector<SceneObject> objects;
    std::vector<Relation> relations;

    const SceneObject* find_object(ObjectId id) const;

    bool operator==(const SceneGraph&) const = default;
};

struct Violation {
    std::string field;
    std::string rule;

    bool operator==(const Violation&) const = default;
    auto operator<=>(const Violation&) const = default;
};

/// Schema check. Violations are sorted so the result does not depend on the
/// order of relations in the input.
std::vector<Violation> validate_scene_graph(const SceneGraph& graph);

/// Splits a trailing "(uncertain)" marker off a raw label.
/// "dog (uncertain)" -> {"dog", true}.
std::pair<std::string, bool> split_uncertain_suffix(std::string_view raw_label);

} // namespace vsg
