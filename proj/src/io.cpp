#include "vsg/io.hpp"

#include "json_util.hpp"
#include "vsg/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace vsg::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::IoError, "cannot write " + path.string());
        }
        out << text;
        if (!out.flush()) {
            throw Error(ErrorKind::IoError, "write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorKind::IoError, "cannot move output into " + path.string() + ": " + ec.message());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse(const std::string& text, std::string_view what) { return detail::parse_json(text, what); }

namespace {

// Runs a schema decoder, turning nlohmann type/key errors into ParseError.
template <typename F>
auto decode(std::string_view what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        detail::schema_error(what, e.what());
    }
}

json rle_to_json(const BinaryMask& mask) { return json(mask.runs); }

BinaryMask rle_from_json(const json& j, int width, int height, std::string_view where) {
    BinaryMask mask;
    mask.width = width;
    mask.height = height;
    if (!j.is_array()) {
        detail::schema_error(where, "rle must be an array of integers");
    }
    for (const auto& v : j) {
        if (!v.is_number_unsigned()) {
            detail::schema_error(where, "rle must hold non-negative integers");
        }
        mask.runs.push_back(v.get<std::uint32_t>());
    }
    if (!is_canonical(mask)) {
        throw Error(ErrorKind::CorruptMask, std::string(where) + ": runs are not a canonical " +
                                                std::to_string(width) + "x" +
                                                std::to_string(height) + " encoding");
    }
    return mask;
}

} // namespace

json scene_graph_to_json(const SceneGraph& graph) {
    json j;
    j["video"] = {{"n_frames", graph.video.n_frames},
                  {"fps", graph.video.fps},
                  {"width", graph.video.width},
                  {"height", graph.video.height}};
    j["objects"] = json::array();
    for (const auto& o : graph.objects) {
        j["objects"].push_back({{"id", o.object_id},
                                {"label", o.label},
                                {"uncertain", o.uncertain},
                                {"attributes", o.attributes}});
    }
    j["relationships"] = json::array();
    for (const auto& r : graph.relations) {
        json spans = json::array();
        for (const auto& s : r.spans) {
            spans.push_back({s.start, s.end});
        }
        j["relationships"].push_back(
            {r.subject_id, r.predicate, r.object_id, std::move(spans), std::string(to_string(r.category))});
    }
    return j;
}

SceneGraph scene_graph_from_json(const json& j) {
    constexpr std::string_view what = "scene graph";
    return decode(what, [&] {
        SceneGraph g;
        if (!j.is_object()) {
            detail::schema_error(what, "top level must be an object");
        }
        if (j.contains("video")) {
            const auto& v = j.at("video");
            g.video.n_frames = v.value("n_frames", 0);
            g.video.fps = v.value("fps", 1.0);
            g.video.width = v.value("width", 0);
            g.video.height = v.value("height", 0);
        }
        for (const auto& o : j.at("objects")) {
            SceneObject obj;
            obj.object_id = o.at("id").get<ObjectId>();
            auto [label, tagged] = split_uncertain_suffix(o.at("label").get<std::string>());
            obj.label = std::move(label);
            obj.uncertain = tagged || o.value("uncertain", false);
            if (o.contains("attributes")) {
                obj.attributes = o.at("attributes").get<std::vector<std::string>>();
            }
            g.objects.push_back(std::move(obj));
        }
        if (!j.contains("relationships")) {
            detail::schema_error(what, "missing \"relationships\"");
        }
        for (const auto& r : j.at("relationships")) {
            if (!r.is_array() || (r.size() != 4 && r.size() != 5)) {
                detail::schema_error(what, "relationship must be a 4- or 5-element array: " + r.dump());
            }
            Relation rel;
            rel.subject_id = r.at(0).get<ObjectId>();
            rel.predicate = r.at(1).get<std::string>();
            rel.object_id = r.at(2).get<ObjectId>();
            for (const auto& s : r.at(3)) {
                if (!s.is_array() || s.size() != 2) {
                    detail::schema_error(what, "span must be [start, end]: " + s.dump());
                }
                rel.spans.push_back({s.at(0).get<FrameIndex>(), s.at(1).get<FrameIndex>()});
            }
            if (r.size() == 5) {
                const auto text = r.at(4).get<std::string>();
                const auto category = parse_relation_category(text);
                if (!category) {
                    detail::schema_error(what, "unknown relation category \"" + text + "\"");
                }
                rel.category = *category;
            }
            g.relations.push_back(std::move(rel));
        }
        return g;
    });
}

std::string write_scene_graph(const SceneGraph& graph) { return dump(scene_graph_to_json(graph)); }

SceneGraph read_scene_graph(const std::string& text) {
    return scene_graph_from_json(parse(text, "scene graph"));
}

json mask_video_to_json(const MaskVideo& video) {
    json j;
    j["width"] = video.width;
    j["height"] = video.height;
    j["fps"] = video.fps;
    j["n_frames"] = video.n_frames;
    j["entries"] = json::array();
    for (const auto& f : video.frames) {
        for (const auto& [id, mask] : f.masks) {
            j["entries"].push_back({{"frame", f.frame_index}, {"object_id", id}, {"rle", rle_to_json(mask)}});
        }
    }
    return j;
}

MaskVideo mask_video_from_json(const json& j) {
    constexpr std::string_view what = "mask file";
    MaskVideo video = decode(what, [&] {
        MaskVideo v;
        v.width = j.at("width").get<int>();
        v.height = j.at("height").get<int>();
        v.fps = j.at("fps").get<double>();
        v.n_frames = j.at("n_frames").get<int>();
        if (v.width <= 0 || v.height <= 0 || v.n_frames < 0 || !(v.fps > 0.0)) {
            detail::schema_error(what, "header needs positive width, height, fps");
        }
        std::pair<FrameIndex, ObjectId> last{-1, 0};
        bool first = true;
        for (const auto& e : j.at("entries")) {
            const FrameIndex frame = e.at("frame").get<FrameIndex>();
            const ObjectId id = e.at("object_id").get<ObjectId>();
            if (frame < 0 || frame >= v.n_frames) {
                detail::schema_error(what, "entry frame " + std::to_string(frame) + " outside the video");
            }
            if (!first && std::pair{frame, id} <= last) {
                detail::schema_error(what, "entries must be sorted by (frame, object_id) without repeats");
            }
            first = false;
            last = {frame, id};
            if (v.frames.empty() || v.frames.back().frame_index != frame) {
                v.frames.push_back({frame, {}});
            }
            const std::string where = std::string(what) + " entry (frame " + std::to_string(frame) +
                                      ", object " + std::to_string(id) + ")";
            v.frames.back().masks.emplace(id, rle_from_json(e.at("rle"), v.width, v.height, where));
        }
        return v;
    });
    validate_mask_video(video);
    return video;
}

std::string write_mask_video(const MaskVideo& video) { return mask_video_to_json(video).dump() + "\n"; }

MaskVideo read_mask_video(const std::string& text) {
    return mask_video_from_json(parse(text, "mask file"));
}

std::string write_registry(const RegistryFile& file) {
    json j;
    j["width"] = file.width;
    j["height"] = file.height;
    j["entries"] = json::array();
    for (const auto& e : file.registry.entries) {
        j["entries"].push_back({{"id", e.object_id}, {"entry_frame", e.entry_frame}, {"rle", rle_to_json(e.mask)}});
    }
    return j.dump() + "\n";
}

RegistryFile read_registry(const std::string& text) {
    constexpr std::string_view what = "registry file";
    const json j = parse(text, what);
    return decode(what, [&] {
        RegistryFile f;
        f.width = j.at("width").get<int>();
        f.height = j.at("height").get<int>();
        if (f.width <= 0 || f.height <= 0) {
            detail::schema_error(what, "header needs positive width and height");
        }
        for (const auto& e : j.at("entries")) {
            RegistryEntry entry;
            entry.object_id = e.at("id").get<ObjectId>();
            entry.entry_frame = e.at("entry_frame").get<FrameIndex>();
            entry.mask = rle_from_json(e.at("rle"), f.width, f.height,
                                       std::string(what) + " entry " + std::to_string(entry.object_id));
            f.registry.entries.push_back(std::move(entry));
        }
        return f;
    });
}

json scene_spec_to_json(const SceneSpec& spec) {
    json j;
    j["seed"] = spec.seed;
    j["n_frames"] = spec.n_frames;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["fps"] = spec.fps;
    j["background"] = spec.background;
    j["shapes"] = json::array();
    for (const auto& s : spec.shapes) {
        json o;
        if (s.kind == ShapeKind::Rectangle) {
            o["kind"] = "rectangle";
            o["x"] = s.x;
            o["y"] = s.y;
            o["w"] = s.w;
            o["h"] = s.h;
        } else {
            o["kind"] = "disk";
            o["x"] = s.x;
            o["y"] = s.y;
            o["radius"] = s.radius;
        }
        o["vx"] = s.vx;
        o["vy"] = s.vy;
        o["entry_frame"] = s.entry_frame;
        o["exit_frame"] = s.exit_frame;
        o["occluder"] = s.occluder;
        j["shapes"].push_back(std::move(o));
    }
    return j;
}

SceneSpec scene_spec_from_json(const json& j) {
    constexpr std::string_view what = "scene spec";
    return decode(what, [&] {
        SceneSpec spec;
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.n_frames = j.at("n_frames").get<int>();
        spec.width = j.at("width").get<int>();
        spec.height = j.at("height").get<int>();
        spec.fps = j.value("fps", 1.0);
        spec.background = j.value("background", true);
        for (const auto& o : j.at("shapes")) {
            ShapeSpec s;
            const auto kind = o.at("kind").get<std::string>();
            if (kind == "rectangle") {
                s.kind = ShapeKind::Rectangle;
                s.w = o.at("w").get<int>();
                s.h = o.at("h").get<int>();
            } else if (kind == "disk") {
                s.kind = ShapeKind::Disk;
                s.radius = o.at("radius").get<double>();
            } else {
                detail::schema_error(what, "unknown shape kind \"" + kind + "\"");
            }
            s.x = o.at("x").get<double>();
            s.y = o.at("y").get<double>();
            s.vx = o.value("vx", 0.0);
            s.vy = o.value("vy", 0.0);
            s.entry_frame = o.value("entry_frame", 0);
            s.exit_frame = o.value("exit_frame", spec.n_frames);
            s.occluder = o.value("occluder", false);
            spec.shapes.push_back(s);
        }
        return spec;
    });
}

json noise_spec_to_json(const NoiseSpec& spec) {
    json j;
    j["drop_prob"] = spec.drop_prob;
    j["split_prob"] = spec.split_prob;
    j["duplicate_prob"] = spec.duplicate_prob;
    j["jitter_px"] = spec.jitter_px;
    j["seed"] = spec.seed;
    return j;
}

NoiseSpec noise_spec_from_json(const json& j) {
    return decode("noise spec", [&] {
        NoiseSpec n;
        n.drop_prob = j.value("drop_prob", 0.0);
        n.split_prob = j.value("split_prob", 0.0);
        n.duplicate_prob = j.value("duplicate_prob", 0.0);
        n.jitter_px = j.value("jitter_px", 0);
        n.seed = j.value("seed", std::uint64_t{0});
        return n;
    });
}

json tracker_config_to_json(const TrackerConfig& c) {
    json j;
    j["tau_detection"] = c.tau_detection;
    j["tau_match"] = c.tau_match;
    j["check_interval"] = c.check_interval;
    j["dedup_iou"] = c.dedup_iou;
    j["dedup_covis_fraction"] = c.dedup_covis_fraction;
    j["morph_min_area"] = c.morph_min_area;
    j["morph_radius"] = c.morph_radius;
    j["filter_proposals"] = c.filter_proposals;
    j["filter_overlap_thresh"] = c.filter.overlap_thresh;
    j["filter_fallback_sweep"] = c.filter.fallback_sweep;
    return j;
}

json grid_spec_to_json(const TokenGridSpec& s) {
    json j;
    j["g"] = s.g;
    j["m"] = s.m;
    j["patch"] = s.patch;
    j["width"] = s.width;
    j["height"] = s.height;
    j["n_frames"] = s.n_frames;
    j["fps"] = s.fps;
    return j;
}

json eval_config_to_json(const EvalConfig& c) {
    json j;
    j["temporal_iou_thresh"] = c.temporal_iou_thresh;
    j["object_mode"] = std::string(to_string(c.object_mode));
    j["mask_iou_thresh"] = c.mask_iou_thresh;
    j["strict_includes_synonym"] = c.strict_includes_synonym;
    return j;
}

json breakpoints_to_json(const std::vector<BreakpointReport>& reports) {
    json out = json::array();
    for (const auto& r : reports) {
        out.push_back({{"frame", r.frame},
                       {"untracked_area", r.untracked_area},
                       {"overlap_area", r.overlap_area},
                       {"ratio", r.ratio},
                       {"triggered", r.triggered}});
    }
    return out;
}

json stream_to_json(const std::vector<StreamElement>& stream) {
    json out = json::array();
    for (const auto& e : stream) {
        json rec;
        rec["kind"] = std::string(to_string(e.kind));
        switch (e.kind) {
        case StreamKind::ObjectIdMark: rec["object_id"] = e.object_id; break;
        case StreamKind::VisToken: rec["token"] = {e.token.t_g, e.token.h_m, e.token.w_m}; break;
        case StreamKind::TimestampMark: rec["seconds"] = e.seconds; break;
        case StreamKind::WindowSummarySlot: rec["window"] = e.window; break;
        default: break;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

json match_report_to_json(const MatchReport& r) {
    json j;
    j["config"] = eval_config_to_json(r.config);
    json metrics;
    metrics["object_accuracy_strict"] = r.object_accuracy_strict;
    metrics["object_accuracy_lenient"] = r.object_accuracy_lenient;
    metrics["object_accuracy"] =
        r.config.object_mode == ObjectMode::Strict ? r.object_accuracy_strict : r.object_accuracy_lenient;
    metrics["attribute_recall"] = r.attribute_recall;
    metrics["relation_recall"] = r.relation_recall;
    metrics["triplet_recall"] = r.triplet_recall;
    if (r.average_recall) {
        metrics["average_recall"] = *r.average_recall;
    }
    j["metrics"] = std::move(metrics);

    auto count_if = [](const auto& items, auto pred) {
        return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), pred));
    };
    json counts;
    counts["gt_objects"] = r.objects.size();
    counts["objects_strict_correct"] = count_if(r.objects, [&](const ObjectMatch& m) {
        return object_correct(m.tier, ObjectMode::Strict, r.config.strict_includes_synonym);
    });
    counts["objects_lenient_correct"] = count_if(
        r.objects, [](const ObjectMatch& m) { return object_correct(m.tier, ObjectMode::Lenient); });
    counts["gt_attributes"] = r.attributes.size();
    counts["attributes_recalled"] =
        count_if(r.attributes, [](const AttributeMatch& m) { return m.pred.has_value(); });
    counts["gt_relations"] = r.relations.size();
    counts["relations_recalled"] = count_if(r.relations, [](const RelationMatch& m) { return m.recalled; });
    counts["triplets_recalled"] = count_if(r.relations, [](const RelationMatch& m) { return m.triplet; });
    j["counts"] = std::move(counts);

    json objects = json::array();
    for (const auto& m : r.objects) {
        objects.push_back({{"id", m.id},
                           {"gt", m.gt},
                           {"pred", m.pred ? json(*m.pred) : json(nullptr)},
                           {"tier", std::string(to_string(m.tier))}});
    }
    j["objects"] = std::move(objects);

    json attributes = json::array();
    for (const auto& m : r.attributes) {
        attributes.push_back({{"id", m.id},
                              {"gt", m.gt},
                              {"pred", m.pred ? json(*m.pred) : json(nullptr)},
                              {"tier", std::string(to_string(m.tier))}});
    }
    j["attributes"] = std::move(attributes);

    json relations = json::array();
    for (const auto& m : r.relations) {
        relations.push_back({{"gt_index", m.gt_index},
                             {"pred_index", m.pred_index ? json(*m.pred_index) : json(nullptr)},
                             {"tier", std::string(to_string(m.tier))},
                             {"temporal_iou", m.temporal_iou},
                             {"recalled", m.recalled},
                             {"triplet", m.triplet}});
    }
    j["relations"] = std::move(relations);
    return j;
}

} // namespace vsg::io
