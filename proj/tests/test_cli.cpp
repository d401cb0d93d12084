#include "vsg/io.hpp"
#include "vsg/types.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vsg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void put(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("vsg_cli_") + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path at(const std::string& name) const { return dir_ / name; }

    // `env` is a prefix of NAME=value assignments for the shell.
    CliRun cli(const std::string& args, const std::string& env = "") const {
        const fs::path out = at(".stdout"), err = at(".stderr");
        const std::string cmd = "cd '" + dir_.string() + "' && env -u VSG_CONFIG " + env + " '" + VSG_CLI_PATH +
                                "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    void write_two_shape_scene() const {
        put(at("scene.json"), R"({"n_frames": 12, "width": 48, "height": 32, "seed": 3,
            "shapes": [
              {"kind": "rectangle", "x": 4, "y": 4, "w": 12, "h": 10, "vx": 1.5},
              {"kind": "disk", "x": 34, "y": 20, "radius": 6, "entry_frame": 3, "vy": -0.5}
            ]})");
    }

    fs::path dir_;
};

json error_record(const CliRun& r) {
    const auto line = r.err.substr(0, r.err.find('\n'));
    return json::parse(line);
}

SceneGraph fixture_graph() {
    SceneGraph g;
    g.video = {10, 2.0, 32, 24};
    g.objects = {{1, "person", false, {"tall"}}, {2, "cup", false, {"red"}}};
    g.relations = {{1, "holding", 2, {{0, 4}}, RelationCategory::Functional},
                   {kCameraId, "looking at", 1, {{2, 3}, {6, 9}}, RelationCategory::Attentional}};
    return g;
}

} // namespace

TEST_F(CliTest, VersionPrintsBuildIdentifier) {
    const CliRun r = cli("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("vsg ", 0), 0u) << r.out;
}

TEST_F(CliTest, SimulateWritesValidMaskFiles) {
    write_two_shape_scene();
    const CliRun r = cli("simulate --scene scene.json --video-out video.json --gt-out gt.json");
    ASSERT_EQ(r.code, 0) << r.err;
    const MaskVideo video = io::read_mask_video(slurp(at("video.json")));
    const MaskVideo gt = io::read_mask_video(slurp(at("gt.json")));
    EXPECT_EQ(video.width, 48);
    EXPECT_EQ(gt.n_frames, 12);
    const auto tracks = to_trajectories(gt);
    ASSERT_EQ(tracks.size(), 3u); // background plus two shapes
    EXPECT_EQ(tracks[2].entry_frame, 3);
}

TEST_F(CliTest, ZeroNoiseTrackReproducesGroundTruthBytes) {
    write_two_shape_scene();
    ASSERT_EQ(cli("simulate --scene scene.json --video-out video.json --gt-out gt.json").code, 0);
    ASSERT_EQ(cli("propose --video gt.json --seed 7 --out props.json").code, 0);
    const std::string gt_before = slurp(at("gt.json"));
    const CliRun r = cli("track --video gt.json --proposals props.json --out tracks.json --report report.json");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(at("tracks.json")), gt_before);
    EXPECT_EQ(slurp(at("gt.json")), gt_before); // inputs untouched

    const json report = json::parse(slurp(at("report.json")));
    EXPECT_EQ(report["objects"], 3);
    EXPECT_EQ(report["config"]["tau_detection"], 0.1);
    EXPECT_GE(report["coverage_offline"].get<double>(), report["coverage_online"].get<double>());

    const CliRun e = cli("eval --pred-masks tracks.json --against-gt gt.json");
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(json::parse(e.out)["metrics"]["average_recall"], 1.0);
}

TEST_F(CliTest, EvalIdenticalGraphsScoresOne) {
    put(at("g.json"), io::write_scene_graph(fixture_graph()));
    const CliRun r = cli("eval --pred g.json --gt g.json --out report.json");
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(slurp(at("report.json")));
    for (const char* m : {"object_accuracy", "object_accuracy_strict", "object_accuracy_lenient",
                          "attribute_recall", "relation_recall", "triplet_recall"}) {
        EXPECT_EQ(report["metrics"][m], 1.0) << m;
    }
    EXPECT_EQ(report["config"]["judge"], "lexicon:");
}

TEST_F(CliTest, EvalWithBridgeJudge) {
    SceneGraph pred = fixture_graph();
    pred.objects[0].label = "human";
    put(at("pred.json"), io::write_scene_graph(pred));
    put(at("gt.json"), io::write_scene_graph(fixture_graph()));
    const std::string judge =
        std::string("--judge 'bridge:exec:") + VSG_BRIDGE_STUB_PATH + " " + VSG_DATA_DIR + "/lexicon.tsv'";
    const CliRun r = cli("eval --pred pred.json --gt gt.json --object-mode lenient " + judge);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["metrics"]["object_accuracy"], 1.0);
    EXPECT_EQ(json::parse(r.out)["metrics"]["object_accuracy_strict"], 0.5);

    const CliRun down = cli("eval --pred pred.json --gt gt.json --judge 'bridge:exec:" +
                         std::string(VSG_BRIDGE_STUB_PATH) + " --error'");
    EXPECT_EQ(down.code, 4);
    EXPECT_EQ(error_record(down)["error"], "JudgeUnavailable");
}

TEST_F(CliTest, ResampleCheckPassesAndFailsOnImpossibleTolerance) {
    const CliRun ok = cli("resample-check --seed 1 --seeds 2");
    ASSERT_EQ(ok.code, 0) << ok.err;
    const json report = json::parse(ok.out);
    EXPECT_TRUE(report["pass"].get<bool>());
    EXPECT_LT(report["grad_max_rel_error"].get<double>(), 1e-4);
    EXPECT_EQ(report["runs"].size(), 2u);

    EXPECT_EQ(cli("resample-check --seed 1 --grad-tol 0").code, 1);
}

TEST_F(CliTest, ExitCodesAndErrorRecords) {
    // Missing required flag.
    CliRun r = cli("track --video x.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(error_record(r)["error"], "ConfigError");

    // Unknown verb.
    EXPECT_EQ(cli("frobnicate").code, 2);

    // Stochastic verb without a seed.
    write_two_shape_scene();
    ASSERT_EQ(cli("simulate --scene scene.json --video-out video.json --gt-out gt.json").code, 0);
    r = cli("propose --video gt.json --out p.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(error_record(r)["error"], "ConfigError");

    // Parameter out of range.
    r = cli("propose --video gt.json --seed 1 --drop 1.5 --out p.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(error_record(r)["error"], "InvalidSpec");

    // Malformed JSON carries line and offset.
    put(at("broken.json"), "{\n  \"width\": 4,\n  \"height\": \n}");
    r = cli("tokens --masks broken.json");
    EXPECT_EQ(r.code, 3);
    const json rec = error_record(r);
    EXPECT_EQ(rec["error"], "ParseError");
    EXPECT_EQ(rec["line"], 4);
    EXPECT_TRUE(rec.contains("offset"));

    // Runs that overflow the frame are a corrupt mask.
    put(at("corrupt.json"), R"({"width":2,"height":2,"fps":1,"n_frames":1,
        "entries":[{"frame":0,"object_id":1,"rle":[1,9]}]})");
    r = cli("tokens --masks corrupt.json");
    EXPECT_EQ(r.code, 3) << r.err;
    EXPECT_EQ(error_record(r)["error"], "CorruptMask");

    // Missing input file.
    r = cli("tokens --masks nowhere.json");
    EXPECT_NE(r.code, 0);
    EXPECT_NO_THROW(error_record(r));
}

TEST_F(CliTest, ConfigPrecedenceFileEnvFlag) {
    write_two_shape_scene();
    ASSERT_EQ(cli("simulate --scene scene.json --video-out video.json --gt-out gt.json").code, 0);
    put(at("cfg.json"), R"({"tokens": {"tau-eff": 0.3}, "window-seconds": 2.0})");
    auto tau = [&](const std::string& args, const std::string& env = "") {
        const CliRun r = cli(args, env);
        EXPECT_EQ(r.code, 0) << r.err;
        return json::parse(r.out)["config"];
    };
    EXPECT_EQ(tau("tokens --masks gt.json")["tau_eff"], 0.5);
    const json file = tau("--config cfg.json tokens --masks gt.json");
    EXPECT_EQ(file["tau_eff"], 0.3);
    EXPECT_EQ(file["window_seconds"], 2.0);
    EXPECT_EQ(tau("tokens --masks gt.json", "VSG_CONFIG=cfg.json")["tau_eff"], 0.3);
    EXPECT_EQ(tau("--config cfg.json tokens --masks gt.json", "VSG_TAU_EFF=0.4")["tau_eff"], 0.4);
    EXPECT_EQ(tau("--config cfg.json tokens --masks gt.json --tau-eff 0.6", "VSG_TAU_EFF=0.4")["tau_eff"], 0.6);

    put(at("bad_cfg.json"), R"({"tokens": {"no-such-option": 1}})");
    EXPECT_EQ(cli("--config bad_cfg.json tokens --masks gt.json").code, 2);
}

TEST_F(CliTest, TokensReportHasStreamAndConfig) {
    write_two_shape_scene();
    ASSERT_EQ(cli("simulate --scene scene.json --video-out video.json --gt-out gt.json").code, 0);
    const CliRun r = cli("tokens --masks gt.json --g 2 --m 2 --patch 8 --window-seconds 4");
    ASSERT_EQ(r.code, 0) << r.err;
    const json report = json::parse(r.out);
    EXPECT_EQ(report["objects"].size(), 3u);
    EXPECT_EQ(report["config"]["patch"], 8);
    EXPECT_FALSE(report["stream"].empty());
}

TEST_F(CliTest, PipelineIsByteDeterministic) {
    ASSERT_EQ(cli("simulate --random --seed 11 --video-out v.json --gt-out gt.json").code, 0);
    auto once = [&](const std::string& tag) {
        EXPECT_EQ(cli("propose --video gt.json --seed 5 --drop 0.1 --jitter 1 --out p" + tag + ".json").code, 0);
        EXPECT_EQ(cli("track --video gt.json --proposals p" + tag + ".json --out t" + tag + ".json --report r" +
                      tag + ".json --registry-out reg" + tag + ".json")
                      .code,
                  0);
        const CliRun e = cli("eval --pred-masks t" + tag + ".json --against-gt gt.json --out e" + tag + ".json");
        EXPECT_EQ(e.code, 0) << e.err;
    };
    once("1");
    once("2");
    EXPECT_EQ(slurp(at("p1.json")), slurp(at("p2.json")));
    EXPECT_EQ(slurp(at("t1.json")), slurp(at("t2.json")));
    EXPECT_EQ(slurp(at("reg1.json")), slurp(at("reg2.json")));
    const std::string e1 = slurp(at("e1.json"));
    EXPECT_FALSE(e1.empty());
    // Reports name their input files, so compare them with the names aligned.
    json r1 = json::parse(slurp(at("r1.json"))), r2 = json::parse(slurp(at("r2.json")));
    r1.erase("inputs");
    r2.erase("inputs");
    EXPECT_EQ(r1, r2);
    json j1 = json::parse(e1), j2 = json::parse(slurp(at("e2.json")));
    j1.erase("inputs");
    j2.erase("inputs");
    EXPECT_EQ(j1.dump(), j2.dump());
}

TEST_F(CliTest, KappaOfLabelFiles) {
    put(at("a.txt"), "dog\ncat\ndog\ncat\n");
    put(at("b.txt"), "dog\ncat\ndog\ncat\n");
    put(at("c.txt"), "dog\ndog\ncat\ncat\n");
    CliRun r = cli("kappa --a a.txt --b b.txt");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["kappa"], 1.0);
    r = cli("kappa --a a.txt --b c.txt");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["kappa"], 0.0);
}
