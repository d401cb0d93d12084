// vsg: command-line front end.
//
// Configuration precedence, lowest first: built-in defaults, the JSON file
// given by --config (or VSG_CONFIG), VSG_* environment variables, flags.

#include "vsg/bridge.hpp"
#include "vsg/errors.hpp"
#include "vsg/eval.hpp"
#include "vsg/io.hpp"
#include "vsg/judge.hpp"
#include "vsg/resampler.hpp"
#include "vsg/synthetic_world.hpp"
#include "vsg/tokens.hpp"
#include "vsg/tracker.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#ifndef VSG_VERSION
#define VSG_VERSION "unknown"
#endif

namespace {

using vsg::io::json;

enum Exit { kOk = 0, kCheckFailed = 1, kConfig = 2, kParse = 3, kOther = 4 };

void emit_error(std::string_view kind, const std::string& message,
                std::optional<std::size_t> line = std::nullopt,
                std::optional<std::size_t> offset = std::nullopt) {
    json record;
    record["error"] = std::string(kind);
    record["message"] = message;
    if (line) {
        record["line"] = *line;
        record["offset"] = offset.value_or(0);
    }
    std::cerr << record.dump() << '\n';
}

int exit_code_for(vsg::ErrorKind kind) {
    switch (kind) {
    case vsg::ErrorKind::ConfigError:
    case vsg::ErrorKind::InvalidParam:
    case vsg::ErrorKind::InvalidSpec:
        return kConfig;
    case vsg::ErrorKind::ParseError:
    case vsg::ErrorKind::CorruptMask:
        return kParse;
    default:
        return kOther;
    }
}

std::string env_name(const std::string& long_name) {
    std::string out = "VSG_";
    for (char c : long_name) {
        out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

// Adds --name bound to `var`, also settable through VSG_NAME.
template <typename T>
CLI::Option* opt(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    return app->add_option("--" + name, var, help)->envname(env_name(name))->capture_default_str();
}

CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& help) {
    return app->add_flag("--" + name, var, help)->envname(env_name(name));
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        vsg::io::write_file(path, text);
    }
}

json read_json(const std::string& path, std::string_view what) {
    return vsg::io::parse(vsg::io::read_file(path), what);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scene;
    bool random = false;
    std::optional<std::uint64_t> seed;
    int n_frames = 24;
    int width = 64;
    int height = 48;
    std::string video_out;
    std::string gt_out;
};

int run_simulate(const SimulateArgs& a) {
    vsg::SceneSpec spec;
    if (a.random) {
        if (!a.seed) {
            throw vsg::Error(vsg::ErrorKind::ConfigError, "simulate --random needs --seed");
        }
        spec = vsg::random_scene_spec(*a.seed, a.n_frames, a.width, a.height);
    } else {
        if (a.scene.empty()) {
            throw vsg::Error(vsg::ErrorKind::ConfigError, "simulate needs --scene or --random");
        }
        spec = vsg::io::scene_spec_from_json(read_json(a.scene, "scene spec"));
        if (a.seed) {
            spec.seed = *a.seed;
        }
    }
    const vsg::World world = vsg::generate_scene(spec);
    json video = vsg::io::mask_video_to_json(world.video);
    video["scene"] = vsg::io::scene_spec_to_json(spec);
    vsg::io::write_file(a.video_out, vsg::io::dump(video));
    vsg::io::write_file(a.gt_out, vsg::io::write_mask_video(vsg::to_mask_video(
                                      world.trajectories, spec.width, spec.height, spec.fps,
                                      spec.n_frames)));
    return kOk;
}

// ----------------------------------------------------------------- propose

struct ProposeArgs {
    std::string video;
    std::string noise;
    std::optional<std::uint64_t> seed;
    double drop = 0.0;
    double split = 0.0;
    double duplicate = 0.0;
    int jitter = 0;
    std::string out;
};

int run_propose(const ProposeArgs& a, const CLI::App& cmd) {
    vsg::NoiseSpec noise;
    if (!a.noise.empty()) {
        noise = vsg::io::noise_spec_from_json(read_json(a.noise, "noise spec"));
    }
    // Without a noise file the options apply as usual; with one, only options
    // set by flag or environment override it.
    auto use = [&](const char* name) { return a.noise.empty() || cmd.get_option(name)->count() > 0; };
    if (use("--drop")) noise.drop_prob = a.drop;
    if (use("--split")) noise.split_prob = a.split;
    if (use("--duplicate")) noise.duplicate_prob = a.duplicate;
    if (use("--jitter")) noise.jitter_px = a.jitter;
    if (a.seed) {
        noise.seed = *a.seed;
    } else if (a.noise.empty()) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "propose needs --seed or a noise file");
    }
    noise.validate();

    const vsg::MaskVideo video = vsg::io::read_mask_video(vsg::io::read_file(a.video));
    const vsg::ProposalVideo proposals = vsg::noisy_proposal_video(video, noise);
    vsg::MaskVideo out{video.width, video.height, video.fps, video.n_frames, {}};
    for (std::size_t f = 0; f < proposals.size(); ++f) {
        if (proposals[f].empty()) {
            continue;
        }
        vsg::MaskFrame frame{static_cast<vsg::FrameIndex>(f), {}};
        for (std::size_t i = 0; i < proposals[f].size(); ++i) {
            frame.masks.emplace(static_cast<vsg::ObjectId>(i + 1), proposals[f][i]);
        }
        out.frames.push_back(std::move(frame));
    }
    vsg::io::write_file(a.out, vsg::io::write_mask_video(out));
    return kOk;
}

// ------------------------------------------------------------------- track

struct TrackArgs {
    std::string video;
    std::string proposals;
    std::string out;
    std::string registry_out;
    std::string online_out;
    std::string report_out;
    bool postfilter = false;
    vsg::TrackerConfig config;
};

int run_track(const TrackArgs& a) {
    a.config.validate();
    const vsg::MaskVideo video = vsg::io::read_mask_video(vsg::io::read_file(a.video));
    const vsg::MaskVideo props = vsg::io::read_mask_video(vsg::io::read_file(a.proposals));
    if (props.width != video.width || props.height != video.height || props.n_frames != video.n_frames) {
        throw vsg::Error(vsg::ErrorKind::InvalidInput, "proposal file does not match the video geometry");
    }
    vsg::ProposalVideo proposals(static_cast<std::size_t>(video.n_frames));
    for (const auto& frame : props.frames) {
        for (const auto& [id, mask] : frame.masks) {
            proposals[static_cast<std::size_t>(frame.frame_index)].push_back(mask);
        }
    }

    vsg::OraclePropagator propagator(vsg::to_trajectories(video), video.width, video.height);
    const vsg::OnlineResult online =
        vsg::online_track(proposals, video.width, video.height, video.fps, propagator, a.config);
    std::vector<vsg::Trajectory> tracks = vsg::offline_track(online.registry, propagator, video.n_frames);
    if (a.postfilter) {
        tracks = vsg::postfilter(std::move(tracks), a.config);
    }
    const vsg::MaskVideo result =
        vsg::to_mask_video(tracks, video.width, video.height, video.fps, video.n_frames);
    vsg::io::write_file(a.out, vsg::io::write_mask_video(result));
    if (!a.registry_out.empty()) {
        vsg::io::write_file(a.registry_out,
                            vsg::io::write_registry({video.width, video.height, online.registry}));
    }
    if (!a.online_out.empty()) {
        vsg::io::write_file(a.online_out, vsg::io::write_mask_video(online.tracks));
    }
    if (!a.report_out.empty()) {
        json report;
        report["config"] = vsg::io::tracker_config_to_json(a.config);
        report["config"]["postfilter"] = a.postfilter;
        report["inputs"] = {{"video", a.video}, {"proposals", a.proposals}};
        report["objects"] = tracks.size();
        report["coverage_online"] = vsg::mask_coverage(online.tracks);
        report["coverage_offline"] = vsg::mask_coverage(result);
        report["breakpoints"] = vsg::io::breakpoints_to_json(online.breakpoints);
        vsg::io::write_file(a.report_out, vsg::io::dump(report));
    }
    return kOk;
}

// ------------------------------------------------------------------ tokens

struct TokensArgs {
    std::string masks;
    std::string out;
    int g = 2;
    int m = 2;
    int patch = 14;
    double tau_eff = 0.5;
    double window_seconds = 4.0;
};

int run_tokens(const TokensArgs& a) {
    if (!(a.window_seconds > 0.0) || a.tau_eff < 0.0 || a.tau_eff > 1.0) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "tokens needs window-seconds > 0 and tau-eff in [0, 1]");
    }
    const vsg::MaskVideo video = vsg::io::read_mask_video(vsg::io::read_file(a.masks));
    vsg::TokenGridSpec grid{a.g, a.m, a.patch, video.width, video.height, video.n_frames, video.fps};
    grid.validate();

    std::vector<vsg::ObjectTokens> objects;
    std::vector<vsg::TokenSelection> selections;
    json per_object = json::array();
    for (const auto& t : vsg::to_trajectories(video)) {
        const vsg::ScoreVolume scores = vsg::coverage_scores(t.masks, grid);
        vsg::TokenSelection sel = vsg::select_tokens(scores, t.object_id, a.tau_eff);
        auto windows = vsg::partition_windows(sel, grid, a.window_seconds);
        json w = json::array();
        for (const auto& [index, sub] : windows) {
            w.push_back({{"window", index}, {"tokens", sub.indices.size()}});
        }
        per_object.push_back({{"id", t.object_id}, {"tokens", sel.indices.size()}, {"windows", std::move(w)}});
        selections.push_back(sel);
        objects.push_back({std::move(sel), std::move(windows)});
    }

    json report;
    report["config"] = vsg::io::grid_spec_to_json(grid);
    report["config"]["tau_eff"] = a.tau_eff;
    report["config"]["window_seconds"] = a.window_seconds;
    report["objects"] = std::move(per_object);
    report["stream"] = vsg::io::stream_to_json(vsg::arrange_stream(objects, a.window_seconds));
    report["token_stream"] = vsg::io::stream_to_json(vsg::arrange_token_stream(selections));
    write_output(a.out, vsg::io::dump(report));
    return kOk;
}

// ---------------------------------------------------------- resample-check

struct ResampleArgs {
    std::optional<std::uint64_t> seed;
    int seeds = 1;
    vsg::ResamplerDims dims{1, 2, 4, 4, 4, 4};
    int tokens = 7;
    int permutations = 50;
    std::size_t grad_entries = 0;
    double grad_tol = 1e-4;
    double perm_tol = 1e-10;
    bool double_probe = false;
    std::string manifest_out;
    std::string out;
};

int run_resample_check(const ResampleArgs& a) {
    if (!a.seed) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "resample-check needs --seed");
    }
    if (a.seeds < 1 || a.tokens < 1 || a.permutations < 0) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "resample-check needs seeds, tokens >= 1");
    }
    a.dims.validate();
    json runs = json::array();
    double worst_grad = 0.0;
    double worst_perm = 0.0;
    for (int i = 0; i < a.seeds; ++i) {
        const std::uint64_t s = *a.seed + static_cast<std::uint64_t>(i);
        const vsg::ResamplerParams params = vsg::init_params(s, a.dims);
        const Eigen::MatrixXd x = vsg::random_features(s ^ 0x5eedULL, a.tokens, a.dims.d_in);
        const auto grad = vsg::grad_check(params, x, {1e-5, a.grad_entries, s, !a.double_probe});
        const double perm = vsg::permutation_error(params, x, a.permutations, s);
        worst_grad = std::max(worst_grad, grad.max_rel_error);
        worst_perm = std::max(worst_perm, perm);
        runs.push_back({{"seed", s},
                        {"grad_max_rel_error", grad.max_rel_error},
                        {"grad_worst_tensor", grad.worst_tensor},
                        {"grad_entries_checked", grad.entries_checked},
                        {"permutation_max_abs_error", perm}});
        if (i == 0 && !a.manifest_out.empty()) {
            vsg::io::write_file(a.manifest_out, vsg::params_to_manifest(params));
        }
    }
    const bool pass = worst_grad < a.grad_tol && worst_perm <= a.perm_tol;
    json report;
    report["config"] = {{"seed", *a.seed},       {"seeds", a.seeds},
                        {"depth", a.dims.depth}, {"n_queries", a.dims.n_queries},
                        {"d_in", a.dims.d_in},   {"d_latent", a.dims.d_latent},
                        {"d_hidden", a.dims.d_hidden}, {"d_out", a.dims.d_out},
                        {"tokens", a.tokens},    {"permutations", a.permutations},
                        {"grad_entries", a.grad_entries}, {"grad_tol", a.grad_tol},
                        {"perm_tol", a.perm_tol}, {"double_probe", a.double_probe}};
    report["runs"] = std::move(runs);
    report["grad_max_rel_error"] = worst_grad;
    report["permutation_max_abs_error"] = worst_perm;
    report["pass"] = pass;
    write_output(a.out, vsg::io::dump(report));
    return pass ? kOk : kCheckFailed;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string pred_masks;
    std::string gt_masks;
    std::string judge = "lexicon:";
    std::string object_mode = "strict";
    vsg::EvalConfig config;
    std::string out;
};

std::unique_ptr<vsg::Judge> make_judge(const std::string& selector) {
    constexpr std::string_view lexicon = "lexicon:";
    constexpr std::string_view bridge = "bridge:";
    if (selector.starts_with(lexicon)) {
        const std::string path = selector.substr(lexicon.size());
        if (path.empty()) {
            return std::make_unique<vsg::LexiconJudge>();
        }
        return std::make_unique<vsg::LexiconJudge>(vsg::LexiconJudge::from_file(path));
    }
    if (selector.starts_with(bridge)) {
        return vsg::BridgeJudge::connect(selector.substr(bridge.size()));
    }
    throw vsg::Error(vsg::ErrorKind::ConfigError,
                     "judge must be lexicon:<path> or bridge:<endpoint>, got " + selector);
}

vsg::SceneGraph load_valid_graph(const std::string& path) {
    vsg::SceneGraph g = vsg::io::read_scene_graph(vsg::io::read_file(path));
    const auto violations = vsg::validate_scene_graph(g);
    if (!violations.empty()) {
        std::string msg = path + " violates the scene-graph schema:";
        for (const auto& v : violations) {
            msg += " [" + v.field + ": " + v.rule + "]";
        }
        throw vsg::Error(vsg::ErrorKind::InvalidInput, msg);
    }
    return g;
}

int run_eval(EvalArgs a) {
    if (a.object_mode == "strict") {
        a.config.object_mode = vsg::ObjectMode::Strict;
    } else if (a.object_mode == "lenient") {
        a.config.object_mode = vsg::ObjectMode::Lenient;
    } else {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "object-mode must be strict or lenient");
    }
    for (double t : {a.config.temporal_iou_thresh, a.config.mask_iou_thresh}) {
        if (t < 0.0 || t > 1.0) {
            throw vsg::Error(vsg::ErrorKind::ConfigError, "IoU thresholds must lie in [0, 1]");
        }
    }
    const bool graphs = !a.pred.empty() || !a.gt.empty();
    const bool masks = !a.pred_masks.empty() || !a.gt_masks.empty();
    if (graphs && (a.pred.empty() || a.gt.empty())) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "--pred and --gt go together");
    }
    if (masks && (a.pred_masks.empty() || a.gt_masks.empty())) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "--pred-masks and --against-gt go together");
    }
    if (!graphs && !masks) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "eval needs --pred/--gt or --pred-masks/--against-gt");
    }

    vsg::MatchReport report;
    report.config = a.config;
    if (graphs) {
        const auto judge = make_judge(a.judge);
        report = vsg::match_scene_graph(load_valid_graph(a.pred), load_valid_graph(a.gt), *judge, a.config);
    }
    if (masks) {
        const auto pred = vsg::to_trajectories(vsg::io::read_mask_video(vsg::io::read_file(a.pred_masks)));
        const auto gt = vsg::to_trajectories(vsg::io::read_mask_video(vsg::io::read_file(a.gt_masks)));
        report.average_recall = vsg::average_recall(pred, gt, a.config.mask_iou_thresh);
    }

    json j;
    if (graphs) {
        j = vsg::io::match_report_to_json(report);
    } else {
        j["config"] = vsg::io::eval_config_to_json(a.config);
        j["metrics"] = {{"average_recall", *report.average_recall}};
    }
    j["config"]["judge"] = a.judge;
    j["inputs"] = {{"pred", a.pred}, {"gt", a.gt}, {"pred_masks", a.pred_masks}, {"against_gt", a.gt_masks}};
    write_output(a.out, vsg::io::dump(j));
    return kOk;
}

// ------------------------------------------------------------------- kappa

struct KappaArgs {
    std::string a;
    std::string b;
    std::string out;
};

std::vector<std::string> read_labels(const std::string& path) {
    std::vector<std::string> labels;
    std::istringstream in(vsg::io::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        const std::string label = vsg::normalize_label(line);
        if (!label.empty()) {
            labels.push_back(label);
        }
    }
    return labels;
}

int run_kappa(const KappaArgs& a) {
    const auto ra = read_labels(a.a);
    const auto rb = read_labels(a.b);
    const vsg::KappaResult k = vsg::cohens_kappa_detail(ra, rb);
    json report;
    report["inputs"] = {{"a", a.a}, {"b", a.b}};
    report["n"] = ra.size();
    report["observed_agreement"] = k.observed;
    report["expected_agreement"] = k.expected;
    report["kappa"] = k.kappa;
    write_output(a.out, vsg::io::dump(report));
    return kOk;
}

// ------------------------------------------------------------ config file

std::string scalar_text(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number()) {
        return v.dump();
    }
    throw vsg::Error(vsg::ErrorKind::ConfigError, "config values must be scalars, got " + v.dump());
}

bool apply_value(CLI::App* sub, const std::string& key, const json& value) {
    CLI::Option* o = nullptr;
    try {
        o = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
        return false;
    }
    o->default_val(scalar_text(value));
    return true;
}

// Installs file values as option defaults so env and flags still win.
void apply_config_file(CLI::App& app, const std::string& path) {
    const json cfg = read_json(path, "config file");
    if (!cfg.is_object()) {
        throw vsg::Error(vsg::ErrorKind::ConfigError, "config file must hold an object");
    }
    auto subs = app.get_subcommands([](CLI::App*) { return true; });
    for (const auto& [key, value] : cfg.items()) {
        if (value.is_object()) {
            CLI::App* sub = nullptr;
            try {
                sub = app.get_subcommand(key);
            } catch (const CLI::OptionNotFound&) {
                throw vsg::Error(vsg::ErrorKind::ConfigError, "config file names unknown verb " + key);
            }
            for (const auto& [k, v] : value.items()) {
                if (!apply_value(sub, k, v)) {
                    throw vsg::Error(vsg::ErrorKind::ConfigError,
                                     "config key " + key + "." + k + " is not an option of " + key);
                }
            }
            continue;
        }
        bool used = false;
        for (CLI::App* sub : subs) {
            used = apply_value(sub, key, value) || used;
        }
        if (!used) {
            throw vsg::Error(vsg::ErrorKind::ConfigError, "config key " + key + " matches no option");
        }
    }
}

std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string_view arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            return argv[i + 1];
        }
        if (arg.starts_with("--config=")) {
            return std::string(arg.substr(9));
        }
    }
    if (const char* env = std::getenv("VSG_CONFIG")) {
        return env;
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Video scene-graph toolkit"};
    app.set_version_flag("--version", std::string("vsg ") + VSG_VERSION);
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file of option defaults")->envname("VSG_CONFIG");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Render a synthetic scene into mask files");
    opt(simulate, "scene", sim.scene, "Scene spec JSON");
    flag(simulate, "random", sim.random, "Generate a random scene from --seed");
    opt(simulate, "seed", sim.seed, "Scene seed");
    opt(simulate, "n-frames", sim.n_frames, "Frames for --random");
    opt(simulate, "width", sim.width, "Width for --random");
    opt(simulate, "height", sim.height, "Height for --random");
    opt(simulate, "video-out", sim.video_out, "Mask file of the rendered video")->required();
    opt(simulate, "gt-out", sim.gt_out, "Ground-truth trajectory file")->required();

    ProposeArgs prop;
    auto* propose = app.add_subcommand("propose", "Derive noisy proposals from a mask file");
    opt(propose, "video", prop.video, "Ground-truth mask file")->required();
    opt(propose, "noise", prop.noise, "Noise spec JSON");
    opt(propose, "seed", prop.seed, "Noise seed");
    opt(propose, "drop", prop.drop, "Drop probability");
    opt(propose, "split", prop.split, "Split probability");
    opt(propose, "duplicate", prop.duplicate, "Duplicate probability");
    opt(propose, "jitter", prop.jitter, "Boundary jitter in pixels");
    opt(propose, "out", prop.out, "Proposal mask file")->required();

    TrackArgs tr;
    auto* track = app.add_subcommand("track", "Two-pass tracking with a ground-truth propagator");
    opt(track, "video", tr.video, "Mask file the propagator answers from")->required();
    opt(track, "proposals", tr.proposals, "Proposal mask file")->required();
    opt(track, "out", tr.out, "Offline trajectory file")->required();
    opt(track, "registry-out", tr.registry_out, "Registry file");
    opt(track, "online-out", tr.online_out, "Online-pass trajectory file");
    opt(track, "report", tr.report_out, "Run report");
    flag(track, "postfilter", tr.postfilter, "Deduplicate and clean trajectories");
    opt(track, "tau-detection", tr.config.tau_detection, "Breakpoint threshold");
    opt(track, "tau-match", tr.config.tau_match, "Identity reuse threshold");
    opt(track, "check-interval", tr.config.check_interval, "Frames between breakpoint checks");
    opt(track, "dedup-iou", tr.config.dedup_iou, "Per-frame IoU for duplicates");
    opt(track, "dedup-covis", tr.config.dedup_covis_fraction, "Co-visible fraction for duplicates");
    opt(track, "morph-min-area", tr.config.morph_min_area, "Smallest kept component");
    opt(track, "morph-radius", tr.config.morph_radius, "Opening/closing radius");
    opt(track, "filter-overlap", tr.config.filter.overlap_thresh, "Proposal redundancy threshold");
    opt(track, "filter-proposals", tr.config.filter_proposals, "Filter proposals before use");

    TokensArgs tok;
    auto* tokens = app.add_subcommand("tokens", "Select tokens and dump the arranged stream");
    opt(tokens, "masks", tok.masks, "Trajectory mask file")->required();
    opt(tokens, "out", tok.out, "Stream dump (stdout when omitted)");
    opt(tokens, "g", tok.g, "Frames per token");
    opt(tokens, "m", tok.m, "Patches per token side");
    opt(tokens, "patch", tok.patch, "Patch size in pixels");
    opt(tokens, "tau-eff", tok.tau_eff, "Coverage threshold");
    opt(tokens, "window-seconds", tok.window_seconds, "Temporal window length");

    ResampleArgs rs;
    auto* resample = app.add_subcommand("resample-check", "Gradient and permutation checks of the resampler");
    opt(resample, "seed", rs.seed, "First seed");
    opt(resample, "seeds", rs.seeds, "Number of consecutive seeds");
    opt(resample, "depth", rs.dims.depth, "Layers");
    opt(resample, "queries", rs.dims.n_queries, "Latent queries");
    opt(resample, "d-in", rs.dims.d_in, "Token feature width");
    opt(resample, "d-latent", rs.dims.d_latent, "Latent width");
    opt(resample, "d-hidden", rs.dims.d_hidden, "MLP hidden size (intermediate is 4x)");
    opt(resample, "d-out", rs.dims.d_out, "Output width");
    opt(resample, "tokens", rs.tokens, "Tokens per input");
    opt(resample, "permutations", rs.permutations, "Shuffles per seed");
    opt(resample, "grad-entries", rs.grad_entries, "Entries per tensor to check (0: all)");
    opt(resample, "grad-tol", rs.grad_tol, "Gradient relative error bound");
    opt(resample, "perm-tol", rs.perm_tol, "Permutation absolute error bound");
    flag(resample, "double-probe", rs.double_probe, "Finite differences in double instead of long double");
    opt(resample, "manifest-out", rs.manifest_out, "Parameter manifest of the first seed");
    opt(resample, "out", rs.out, "Report (stdout when omitted)");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    opt(eval, "pred", ev.pred, "Predicted scene graph");
    opt(eval, "gt", ev.gt, "Ground-truth scene graph");
    opt(eval, "pred-masks", ev.pred_masks, "Predicted trajectory mask file");
    opt(eval, "against-gt", ev.gt_masks, "Ground-truth trajectory mask file");
    opt(eval, "judge", ev.judge, "lexicon:<path> or bridge:<endpoint>");
    opt(eval, "temporal-iou", ev.config.temporal_iou_thresh, "Relation temporal IoU threshold");
    opt(eval, "object-mode", ev.object_mode, "strict or lenient");
    opt(eval, "mask-iou", ev.config.mask_iou_thresh, "Average-recall IoU threshold");
    flag(eval, "strict-includes-synonym", ev.config.strict_includes_synonym,
         "Count synonyms as strict object matches");
    opt(eval, "out", ev.out, "Report (stdout when omitted)");

    KappaArgs kp;
    auto* kappa = app.add_subcommand("kappa", "Cohen's kappa of two label files");
    opt(kappa, "a", kp.a, "First rater, one label per line")->required();
    opt(kappa, "b", kp.b, "Second rater, one label per line")->required();
    opt(kappa, "out", kp.out, "Report (stdout when omitted)");

    try {
        if (const std::string path = find_config_path(argc, argv); !path.empty()) {
            apply_config_file(app, path);
        }
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            emit_error("ConfigError", e.what());
            return kConfig;
        }

        if (*simulate) return run_simulate(sim);
        if (*propose) return run_propose(prop, *propose);
        if (*track) return run_track(tr);
        if (*tokens) return run_tokens(tok);
        if (*resample) return run_resample_check(rs);
        if (*eval) return run_eval(ev);
        if (*kappa) return run_kappa(kp);
        return kConfig;
    } catch (const vsg::ParseError& e) {
        emit_error(vsg::to_string(e.kind()), e.what(), e.line(), e.offset());
        return kParse;
    } catch (const vsg::Error& e) {
        emit_error(vsg::to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return kOther;
    }
}
