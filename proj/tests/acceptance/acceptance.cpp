// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails or overruns its time budget.

#include "../oracles.hpp"

#include "vsg/eval.hpp"
#include "vsg/io.hpp"
#include "vsg/judge.hpp"
#include "vsg/kernels.hpp"
#include "vsg/mask_ops.hpp"
#include "vsg/proposal_filter.hpp"
#include "vsg/resampler.hpp"
#include "vsg/synthetic_world.hpp"
#include "vsg/tokens.hpp"
#include "vsg/tracker.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace vsg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (failures.size() < 5) failures.push_back(what);
        }
    }
};

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// ------------------------------------------------------------------ masks

Outcome rle_and_mask_algebra() {
    Outcome o;
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> side(1, 40), cell_dist(1, 9);
    double worst_pool = 0.0;
    for (int c = 0; c < 1000; ++c) {
        const int w = side(rng), h = side(rng);
        const Bits a = oracle::random_bits(rng, w, h);
        const Bits b = oracle::random_bits(rng, w, h);
        const BinaryMask ma = rle_encode(a, w, h);
        const BinaryMask mb = rle_encode(b, w, h);
        const std::string tag = "case " + std::to_string(c);
        o.require(ma == oracle::encode(a, w, h) && is_canonical(ma), tag + ": encoding");
        o.require(rle_decode(ma) == a && oracle::decode(ma) == a, tag + ": round trip");
        o.require(area(ma) == oracle::count(a), tag + ": area");
        const BinaryMask pair[] = {ma, mb};
        o.require(rle_decode(mask_union(pair)) == oracle::bit_or(a, b), tag + ": union");
        o.require(rle_decode(intersect(ma, mb)) == oracle::bit_and(a, b), tag + ": intersect");
        const int cell = cell_dist(rng);
        const CoverageGrid grid = pooled_coverage(ma, cell);
        const auto expected = oracle::pooled(a, w, h, cell);
        o.require(grid.values.size() == expected.size(), tag + ": pooled shape");
        for (std::size_t i = 0; i < expected.size() && i < grid.values.size(); ++i)
            worst_pool = std::max(worst_pool, std::abs(grid.values[i] - expected[i]));
    }
    o.require(worst_pool <= 1e-12, "pooled coverage error " + std::to_string(worst_pool));
    std::ostringstream d;
    d << "1000 cases, pooled max error " << worst_pool;
    o.detail = d.str();
    return o;
}

// ----------------------------------------------------------------- filter

BinaryMask span_mask(int first, int last, int width) {
    Bits bits(static_cast<std::size_t>(width), 0);
    for (int x = first; x <= last; ++x) bits[static_cast<std::size_t>(x)] = 1;
    return rle_encode(bits, width, 1);
}

BinaryMask union_of(std::span<const BinaryMask> masks, const std::vector<std::size_t>& pick, int w, int h) {
    std::vector<BinaryMask> chosen;
    for (std::size_t i : pick) chosen.push_back(masks[i]);
    return mask_union(chosen, w, h);
}

Outcome proposal_filter() {
    Outcome o;
    std::mt19937_64 rng(2002);
    std::uniform_int_distribution<int> count(1, 14);
    for (int s = 0; s < 200; ++s) {
        const int w = 24, h = 20;
        std::vector<BinaryMask> props;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) props.push_back(oracle::random_mask(rng, w, h));
        // Exact copies exercise the duplicate path.
        if (n > 1 && s % 3 == 0) props.push_back(props[0]);
        std::vector<std::size_t> all(props.size());
        std::iota(all.begin(), all.end(), 0);
        const auto kept = filter_proposals(props);
        o.require(union_of(props, kept, w, h) == union_of(props, all, w, h),
                  "set " + std::to_string(s) + ": coverage changed");
    }

    // Hand case: an exact duplicate and a contained proposal are dropped, a
    // half-covered one is kept.
    const int w = 20;
    const std::vector<BinaryMask> hand{span_mask(0, 9, w), span_mask(0, 9, w), span_mask(0, 8, w),
                                       span_mask(5, 14, w)};
    o.require(filter_proposals(hand) == std::vector<std::size_t>{0, 3}, "duplicate-drop hand case");

    // Threshold semantics: kept while strictly less than 90% is already covered.
    ProposalFilterOptions no_sweep;
    no_sweep.fallback_sweep = false;
    const std::vector<BinaryMask> at_90{span_mask(0, 9, w), span_mask(1, 10, w)};
    const std::vector<BinaryMask> at_80{span_mask(0, 9, w), span_mask(2, 11, w)};
    o.require(filter_proposals(at_90, no_sweep) == std::vector<std::size_t>{0}, "90% covered must drop");
    o.require(filter_proposals(at_80, no_sweep) == std::vector<std::size_t>{0, 1}, "80% covered must stay");
    o.require(filter_proposals(at_90) == std::vector<std::size_t>{0, 1}, "fallback restores stranded pixel");
    o.detail = "200 random sets plus hand cases";
    return o;
}

// ---------------------------------------------------------------- tracker

struct SceneRun {
    World world;
    OnlineResult online;
    std::vector<Trajectory> offline;
};

SceneRun run_scene(std::uint64_t seed, const NoiseSpec& noise) {
    SceneRun r{generate_scene(random_scene_spec(seed)), {}, {}};
    const ProposalVideo proposals = noisy_proposal_video(r.world.video, noise);
    OraclePropagator propagator(r.world);
    r.online = online_track(proposals, r.world.spec.width, r.world.spec.height, r.world.spec.fps, propagator,
                            TrackerConfig{});
    r.offline = offline_track(r.online.registry, propagator, r.world.spec.n_frames);
    return r;
}

constexpr std::uint64_t kSuiteSeeds = 20;

std::string serialize(const std::vector<Trajectory>& t, const World& w) {
    return io::write_mask_video(to_mask_video(t, w.spec.width, w.spec.height, w.spec.fps, w.spec.n_frames));
}

Outcome tracker_correctness() {
    Outcome o;
    int late_entries = 0, exits = 0, occluders = 0;
    std::size_t recalled_noisy = 0, total_gt = 0;
    double worst_scene_ar = 1.0;
    for (std::uint64_t seed = 0; seed < kSuiteSeeds; ++seed) {
        const std::string tag = "scene " + std::to_string(seed);
        const SceneRun clean = run_scene(seed, {});
        const World& w = clean.world;
        for (const auto& s : w.spec.shapes) {
            late_entries += s.entry_frame > 0;
            exits += s.exit_frame < w.spec.n_frames;
            occluders += s.occluder;
        }
        o.require(serialize(clean.offline, w) == serialize(w.trajectories, w), tag + ": offline bytes differ");
        const auto& entries = clean.online.registry.entries;
        o.require(entries.size() == w.trajectories.size(), tag + ": registry size");
        for (std::size_t i = 0; i < std::min(entries.size(), w.trajectories.size()); ++i) {
            o.require(entries[i].entry_frame == w.trajectories[i].entry_frame,
                      tag + ": entry frame of id " + std::to_string(entries[i].object_id));
        }
        o.require(average_recall(clean.offline, w.trajectories, 0.5) == 1.0, tag + ": clean AR");

        const SceneRun noisy = run_scene(seed, NoiseSpec{0.1, 0.0, 0.0, 1, 500 + seed});
        const double ar = average_recall(noisy.offline, w.trajectories, 0.5);
        worst_scene_ar = std::min(worst_scene_ar, ar);
        recalled_noisy += static_cast<std::size_t>(std::lround(ar * static_cast<double>(w.trajectories.size())));
        total_gt += w.trajectories.size();
    }
    o.require(late_entries > 0 && exits > 0 && occluders > 0, "suite lacks entries, exits or occlusions");
    const double suite_ar = static_cast<double>(recalled_noisy) / static_cast<double>(total_gt);
    o.require(suite_ar >= 0.9, "noisy AR@0.5 " + std::to_string(suite_ar));
    std::ostringstream d;
    d << kSuiteSeeds << " scenes (" << late_entries << " late entries, " << exits << " exits, " << occluders
      << " occluders); noisy AR@0.5 " << suite_ar << ", worst scene " << worst_scene_ar;
    o.detail = d.str();
    return o;
}

Outcome online_vs_offline() {
    Outcome o;
    double sum_on = 0.0, sum_off = 0.0;
    int runs = 0;
    const NoiseSpec noises[] = {{}, {0.1, 0.0, 0.0, 1, 0}, {0.3, 0.2, 0.2, 1, 0}};
    for (std::uint64_t seed = 0; seed < kSuiteSeeds; ++seed) {
        for (NoiseSpec noise : noises) {
            noise.seed = 900 + seed;
            const SceneRun r = run_scene(seed, noise);
            const double on = mask_coverage(r.online.tracks);
            const double off = mask_coverage(r.offline, r.world.spec.width, r.world.spec.height, r.world.spec.n_frames);
            o.require(off >= on, "scene " + std::to_string(seed) + ": offline " + std::to_string(off) +
                                     " < online " + std::to_string(on));
            sum_on += on;
            sum_off += off;
            ++runs;
        }
    }
    std::ostringstream d;
    d << runs << " runs, mean coverage online " << sum_on / runs << " -> offline " << sum_off / runs;
    o.detail = d.str();
    return o;
}

// ----------------------------------------------------------------- tokens

// Per-token scan of decoded pixels, straight from the definition.
ScoreVolume naive_scores(const std::map<FrameIndex, BinaryMask>& masks, const TokenGridSpec& g) {
    ScoreVolume v{g.groups(), g.rows(), g.cols(), {}};
    v.values.assign(static_cast<std::size_t>(v.groups) * v.rows * v.cols, 0.0);
    const int cell = g.cell();
    for (const auto& [f, m] : masks) {
        if (f >= g.n_frames) continue;
        const Bits bits = oracle::decode(m);
        const int t = f / g.g;
        for (int r = 0; r < v.rows; ++r) {
            for (int c = 0; c < v.cols; ++c) {
                int hits = 0;
                for (int y = r * cell; y < std::min((r + 1) * cell, g.height); ++y)
                    for (int x = c * cell; x < std::min((c + 1) * cell, g.width); ++x)
                        hits += bits[static_cast<std::size_t>(y) * g.width + x];
                double& slot = v.values[v.offset(t, r, c)];
                slot = std::max(slot, static_cast<double>(hits) / (cell * cell));
            }
        }
    }
    return v;
}

double max_diff(const ScoreVolume& a, const ScoreVolume& b) {
    if (a.values.size() != b.values.size() || a.groups != b.groups || a.rows != b.rows || a.cols != b.cols)
        return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

Outcome coverage_and_selection() {
    Outcome o;
    std::mt19937_64 rng(5005);
    std::uniform_int_distribution<int> small(1, 3), patch(1, 6), side(4, 40), frames(1, 9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int c = 0; c < 500; ++c) {
        TokenGridSpec g{small(rng), small(rng), patch(rng), side(rng), side(rng), frames(rng),
                        std::uniform_int_distribution<int>(1, 4)(rng) * 1.0};
        std::map<FrameIndex, BinaryMask> masks;
        for (int f = 0; f < g.n_frames; ++f)
            if (unit(rng) < 0.7) masks[f] = oracle::random_mask(rng, g.width, g.height);
        const std::string tag = "pair " + std::to_string(c);
        const ScoreVolume lib = coverage_scores(masks, g);
        const ScoreVolume ref = naive_scores(masks, g);
        worst = std::max({worst, max_diff(lib, ref), max_diff(reference::coverage_scores_serial(masks, g), ref),
                          max_diff(kernels::coverage_scores_parallel(masks, g), ref)});

        // Raising tau_eff only removes tokens.
        double t1 = unit(rng), t2 = unit(rng);
        if (t1 > t2) std::swap(t1, t2);
        const TokenSelection lo = select_tokens(lib, 1, t1), hi = select_tokens(lib, 1, t2);
        o.require(std::includes(lo.indices.begin(), lo.indices.end(), hi.indices.begin(), hi.indices.end()),
                  tag + ": tau monotonicity");
        for (const auto& idx : lo.indices) o.require(lib.at(idx.t_g, idx.h_m, idx.w_m) >= t1, tag + ": selection");

        // Windows are disjoint, cover the selection and agree with window_of.
        const double window_seconds = std::uniform_int_distribution<int>(1, 6)(rng) * 0.5;
        const auto windows = partition_windows(lo, g, window_seconds);
        std::vector<TokenIndex> merged;
        for (const auto& [win, sub] : windows) {
            o.require(!sub.indices.empty(), tag + ": empty window present");
            for (const auto& idx : sub.indices) {
                o.require(window_of(idx.t_g, g, window_seconds) == win, tag + ": token in wrong window");
                merged.push_back(idx);
            }
        }
        std::sort(merged.begin(), merged.end());
        o.require(merged == lo.indices, tag + ": windows do not partition the selection");
    }
    o.require(worst <= 1e-12, "score error " + std::to_string(worst));
    std::ostringstream d;
    d << "500 pairs, max score error " << worst;
    o.detail = d.str();
    return o;
}

// -------------------------------------------------------------- resampler

Outcome resampler_numerics() {
    Outcome o;
    const ResamplerDims tiny{1, 2, 4, 4, 4, 4};
    const ResamplerDims scaled{3, 4, 18, 32, 32, 56};
    const auto p = init_params(7, scaled);
    const double perm = permutation_error(p, random_features(8, 37, scaled.d_in), 50, 9);
    o.require(perm <= 1e-10, "permutation error " + std::to_string(perm));

    const auto pt = init_params(4, tiny);
    for (int n = 1; n <= 512; ++n) {
        const Eigen::MatrixXd z = resample(random_features(static_cast<std::uint64_t>(n), n, tiny.d_in), pt);
        o.require(z.rows() == tiny.n_queries && z.cols() == tiny.d_out && z.allFinite(),
                  "shape at |X| = " + std::to_string(n));
    }

    double worst_grad = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ps = init_params(seed, tiny);
        const GradCheckResult r = grad_check(ps, random_features(seed + 1000, 5, tiny.d_in));
        worst_grad = std::max(worst_grad, r.max_rel_error);
        o.require(r.entries_checked == ps.parameter_count(), "seed " + std::to_string(seed) + ": partial check");
    }
    o.require(worst_grad < 1e-4, "gradient error " + std::to_string(worst_grad));
    std::ostringstream d;
    d << "permutation " << perm << ", shapes 1..512, gradient max rel error " << worst_grad;
    o.detail = d.str();
    return o;
}

// ------------------------------------------------------------------- eval

LexiconJudge book_judge() {
    return LexiconJudge::from_string(
        "synonym human person\n"
        "synonym crimson red\n"
        "synonym holding grasping\n"
        "hypernym animal dog\n"
        "overlap table desk\n");
}

BinaryMask rows_mask(int first_row, int n_rows, int w = 4, int h = 4) {
    Bits b(static_cast<std::size_t>(w) * h, 0);
    for (int y = first_row; y < first_row + n_rows; ++y)
        for (int x = 0; x < w; ++x) b[static_cast<std::size_t>(y) * w + x] = 1;
    return rle_encode(b, w, h);
}

Relation rel(ObjectId s, std::string p, ObjectId o, std::vector<FrameSpan> spans) {
    return {s, std::move(p), o, std::move(spans), RelationCategory::Spatial};
}

SceneGraph graph(std::vector<SceneObject> objects, std::vector<Relation> relations) {
    SceneGraph g;
    g.video = {100, 1.0, 4, 4};
    g.objects = std::move(objects);
    g.relations = std::move(relations);
    return g;
}

Outcome evaluation_metrics() {
    Outcome o;
    LexiconJudge j = book_judge();
    EvalConfig cfg;
    EvalConfig loose = cfg;
    loose.temporal_iou_thresh = 0.4;

    const std::vector<FrameSpan> s04{{0, 4}}, s27{{2, 7}}, s01_45{{0, 1}, {4, 5}}, s05{{0, 5}}, s99{{9, 9}};
    const std::map<ObjectId, std::string> gt_objs{{1, "person"}, {2, "dog"}};
    const std::map<ObjectId, std::string> pred_objs{{1, "human"}, {2, "dog"}};
    const std::vector<Relation> gt_rel{rel(1, "holding", 2, {{0, 3}})};

    const Trajectory a{1, 0, {{0, rows_mask(0, 2)}, {1, rows_mask(0, 2)}}};
    const Trajectory b{2, 0, {{0, rows_mask(1, 2)}, {1, rows_mask(1, 2)}}};
    const Trajectory gt_full{1, 0, {{0, rows_mask(0, 4)}}};
    const Trajectory pred_half{1, 0, {{0, rows_mask(0, 2)}}};
    const Trajectory pred_quarter{2, 0, {{0, rows_mask(3, 1)}}};

    const std::vector<std::string> k1{"x", "x", "y", "y"}, k2{"x", "y", "x", "y"};
    const std::vector<std::string> k3{"x", "x", "x", "y"}, k4{"x", "x", "y", "y"};

    const SceneGraph tgt = graph({{1, "person", false, {}}, {2, "cup", false, {}}}, gt_rel);
    const SceneGraph tpred = graph({{1, "person", false, {}}, {2, "table", false, {}}},
                                   {rel(1, "holding", 2, {{0, 3}})});

    const std::vector<double> h2{1, 2, 3, 1};
    const std::vector<double> h23{0.2, 0.9, 0.1, 0.8, 0.7, 0.3};

    struct Fixture {
        const char* name;
        double got;
        double expected;
    };
    const std::vector<Fixture> book{
        {"interval_iou overlapping spans", interval_iou(s04, s27), 0.375},
        {"interval_iou multi-span", interval_iou(s01_45, s05), 4.0 / 6.0},
        {"interval_iou disjoint", interval_iou(s04, s99), 0.0},
        {"object strict with synonym", object_accuracy(pred_objs, gt_objs, ObjectMode::Strict, j), 0.5},
        {"object lenient with synonym", object_accuracy(pred_objs, gt_objs, ObjectMode::Lenient, j), 1.0},
        {"object strict counting synonyms", object_accuracy(pred_objs, gt_objs, ObjectMode::Strict, j, true), 1.0},
        {"object hypernym lenient", object_accuracy({{1, "dog"}}, {{1, "animal"}}, ObjectMode::Lenient, j), 1.0},
        {"object missing prediction", object_accuracy({{1, "person"}}, gt_objs, ObjectMode::Lenient, j), 0.5},
        {"attribute synonym credit", attribute_recall({{1, {"crimson"}}}, {{1, {"red", "tall"}}}, j), 0.5},
        {"attribute one credit per prediction", attribute_recall({{1, {"red"}}}, {{1, {"red", "crimson"}}}, j), 0.5},
        {"relation synonym at IoU 0.6", relation_recall(std::vector{rel(1, "grasping", 2, {{0, 2}, {4, 4}})},
                                                        std::vector{rel(1, "holding", 2, {{0, 4}})}, j, cfg),
         1.0},
        {"relation excluded at IoU exactly 0.5", relation_recall(std::vector{rel(1, "holding", 2, {{0, 1}})}, gt_rel, j, cfg),
         0.0},
        {"relation recalled at threshold 0.4", relation_recall(std::vector{rel(1, "holding", 2, {{0, 1}})}, gt_rel, j, loose),
         1.0},
        {"relation wrong endpoints", relation_recall(std::vector{rel(2, "holding", 1, {{0, 3}})}, gt_rel, j, cfg), 0.0},
        {"triplet endpoint label mismatch", triplet_recall(tpred, tgt, j, cfg), 0.0},
        {"relation despite label mismatch", relation_recall(tpred.relations, tgt.relations, j, cfg), 1.0},
        {"stIoU shifted rows", spatiotemporal_iou(a, b), 1.0 / 3.0},
        {"AR counts IoU exactly 0.5", average_recall(std::vector{pred_half}, std::vector{gt_full}, 0.5), 1.0},
        {"AR one of two", average_recall(std::vector{pred_half}, std::vector{gt_full, pred_quarter}, 0.5), 0.5},
        {"Hungarian 2x2", hungarian_match(h2, 2, 2).total, 5.0},
        {"Hungarian 2x3", hungarian_match(h23, 2, 3).total, 1.7},
        {"kappa perfect", cohens_kappa(k1, k1), 1.0},
        {"kappa chance", cohens_kappa(k1, k2), 0.0},
        {"kappa half", cohens_kappa(k3, k4), 0.5},
    };
    for (const auto& f : book) {
        o.require(near(f.got, f.expected),
                  std::string(f.name) + ": " + std::to_string(f.got) + " != " + std::to_string(f.expected));
    }

    // Hungarian against exhaustive search.
    std::mt19937_64 rng(7007);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t r = dim(rng), c = dim(rng);
        std::vector<double> s(r * c);
        for (double& x : s) x = unit(rng);
        const Assignment got = hungarian_match(s, r, c);
        o.require(near(got.total, oracle::brute_force_assignment(s, r, c), 1e-12) && got.pairs.size() == std::min(r, c),
                  "Hungarian instance " + std::to_string(t));
    }

    // Ordering properties over random graphs.
    const std::vector<std::string> labels{"person", "human", "dog", "animal", "table", "desk", "cup"};
    const std::vector<std::string> preds{"holding", "grasping", "near", "on"};
    for (int t = 0; t < 100; ++t) {
        std::uniform_int_distribution<std::size_t> pl(0, labels.size() - 1), pp(0, preds.size() - 1);
        std::uniform_int_distribution<int> id(1, 3), frame(0, 20);
        auto random_graph = [&] {
            std::vector<SceneObject> objs;
            for (int i = 1; i <= 3; ++i) objs.push_back({i, labels[pl(rng)], false, {}});
            std::vector<Relation> rels;
            for (int k = 0; k < 4; ++k) {
                const int s = id(rng), e = s % 3 + 1, f0 = frame(rng);
                rels.push_back(rel(s, preds[pp(rng)], e, {{f0, f0 + frame(rng) / 2}}));
            }
            return graph(std::move(objs), std::move(rels));
        };
        const SceneGraph p = random_graph(), g = random_graph();
        std::map<ObjectId, std::string> pm, gm;
        for (const auto& x : p.objects) pm[x.object_id] = x.label;
        for (const auto& x : g.objects) gm[x.object_id] = x.label;
        o.require(object_accuracy(pm, gm, ObjectMode::Strict, j) <= object_accuracy(pm, gm, ObjectMode::Lenient, j),
                  "strict above lenient");
        o.require(triplet_recall(p, g, j, cfg) <= relation_recall(p.relations, g.relations, j, cfg),
                  "triplet above relation");
    }
    std::ostringstream d;
    d << book.size() << " fixtures, 200 Hungarian instances, 100 ordering checks";
    o.detail = d.str();
    return o;
}

// ------------------------------------------------------------ end to end

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome end_to_end_determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / ("vsg_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::vector<std::string> steps{
        "simulate --random --seed 42 --video-out video.json --gt-out gt.json",
        "propose --video gt.json --seed 42 --drop 0.1 --split 0.05 --duplicate 0.05 --jitter 1 --out proposals.json",
        "track --video gt.json --proposals proposals.json --out tracks.json --registry-out registry.json "
        "--online-out online.json --report track_report.json",
        "eval --pred-masks tracks.json --against-gt gt.json --out eval_report.json",
    };
    for (const char* run : {"a", "b"}) {
        const fs::path dir = root / run;
        fs::create_directories(dir);
        for (const auto& step : steps) {
            const std::string cmd = "cd '" + dir.string() + "' && '" + VSG_CLI_PATH + "' " + step + " 2>>stderr.txt";
            const int status = std::system(cmd.c_str());
            o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, std::string(run) + ": " + step);
        }
    }
    int compared = 0;
    for (const char* f : {"video.json", "gt.json", "proposals.json", "tracks.json", "registry.json", "online.json",
                          "track_report.json", "eval_report.json"}) {
        const std::string x = slurp(root / "a" / f), y = slurp(root / "b" / f);
        o.require(!x.empty() && x == y, std::string(f) + " differs between runs");
        ++compared;
    }
    std::string ar = "?";
    try {
        ar = std::to_string(io::parse(slurp(root / "a" / "eval_report.json"), "report")["metrics"]["average_recall"]
                                .get<double>());
    } catch (const std::exception&) {
        o.require(false, "eval report unreadable");
    }
    fs::remove_all(root);
    o.detail = std::to_string(compared) + " files byte-identical across two runs, AR " + ar;
    return o;
}

struct Criterion {
    const char* name;
    double budget_seconds; // 0: no budget
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"rle-mask-algebra", 10.0, rle_and_mask_algebra},
        {"proposal-filter", 10.0, proposal_filter},
        {"tracker-correctness", 60.0, tracker_correctness},
        {"online-vs-offline", 0.0, online_vs_offline},
        {"coverage-selection", 20.0, coverage_and_selection},
        {"resampler-numerics", 60.0, resampler_numerics},
        {"evaluation-metrics", 0.0, evaluation_metrics},
        {"end-to-end-determinism", 0.0, end_to_end_determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
            o.pass = false;
            o.failures.push_back("over the " + std::to_string(c.budget_seconds) + " s budget");
        }
        std::printf("%s %-24s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        for (const auto& f : o.failures) std::printf("     - %s\n", f.c_str());
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
