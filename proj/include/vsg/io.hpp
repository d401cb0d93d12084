#pragma once

// On-disk formats. Every writer emits a fixed key order and a trailing
// newline so files are byte-stable (mask and registry files compact, the rest
// indented); every reader raises ParseError (with a
// 1-based line and 0-based column for syntax errors, line 0 for schema
// errors) on malformed text.

#include "vsg/eval.hpp"
#include "vsg/synthetic_world.hpp"
#include "vsg/tokens.hpp"
#include "vsg/tracker.hpp"
#include "vsg/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace vsg::io {

using json = nlohmann::ordered_json;

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Writes atomically through a sibling temporary. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& text);

/// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const json& j);
json parse(const std::string& text, std::string_view what);

// Scene graphs. Relationships are 5-tuples
// [subject, predicate, object, [[start, end], ...], category]; 4-tuples are
// read as spatial. A label ending in "(uncertain)" sets the flag.
json scene_graph_to_json(const SceneGraph& graph);
SceneGraph scene_graph_from_json(const json& j);
std::string write_scene_graph(const SceneGraph& graph);
SceneGraph read_scene_graph(const std::string& text);

// Mask files: {"width", "height", "fps", "n_frames", "entries": [{"frame",
// "object_id", "rle"}]} sorted by (frame, object_id). Non-canonical runs are
// CorruptMask.
json mask_video_to_json(const MaskVideo& video);
MaskVideo mask_video_from_json(const json& j);
std::string write_mask_video(const MaskVideo& video);
MaskVideo read_mask_video(const std::string& text);

struct RegistryFile {
    int width = 0;
    int height = 0;
    Registry registry;
};

// Registry files: {"width", "height", "entries": [{"id", "entry_frame", "rle"}]}
// in registration order.
std::string write_registry(const RegistryFile& file);
RegistryFile read_registry(const std::string& text);

json scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const json& j);
json noise_spec_to_json(const NoiseSpec& spec);
NoiseSpec noise_spec_from_json(const json& j);

json tracker_config_to_json(const TrackerConfig& config);
json grid_spec_to_json(const TokenGridSpec& spec);
json eval_config_to_json(const EvalConfig& config);

json breakpoints_to_json(const std::vector<BreakpointReport>& reports);

/// One record per element: {"kind", ...payload}.
json stream_to_json(const std::vector<StreamElement>& stream);

/// Metrics, counts and per-item tier assignments.
json match_report_to_json(const MatchReport& report);

} // namespace vsg::io
