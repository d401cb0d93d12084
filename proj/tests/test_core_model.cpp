#include "oracles.hpp"

#include "vsg/errors.hpp"
#include "vsg/io.hpp"
#include "vsg/mask.hpp"
#include "vsg/types.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace vsg;

namespace {

BinaryMask from_bits(std::initializer_list<int> bits, int w, int h) {
    std::vector<std::uint8_t> px(bits.begin(), bits.end());
    return rle_encode(px, w, h);
}

SceneGraph small_graph() {
    SceneGraph g;
    g.video = {10, 2.0, 32, 24};
    g.objects = {{1, "person", false, {"tall"}}, {2, "cup", true, {"red", "small"}}};
    g.relations = {{1, "holding", 2, {{0, 4}}, RelationCategory::Functional},
                   {kCameraId, "looking at", 1, {{2, 3}, {6, 9}}, RelationCategory::Attentional}};
    return g;
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rule; });
}

} // namespace

TEST(Rle, EncodesHandCases) {
    EXPECT_EQ(from_bits({0, 0, 0, 0}, 2, 2).runs, (std::vector<std::uint32_t>{4}));
    EXPECT_EQ(from_bits({1, 1, 1, 1}, 2, 2).runs, (std::vector<std::uint32_t>{0, 4}));
    EXPECT_EQ(from_bits({1, 0, 1, 0, 0, 1, 0, 1}, 4, 2).runs,
              (std::vector<std::uint32_t>{0, 1, 1, 1, 2, 1, 1, 1}));
}

TEST(Rle, DecodesHandCases) {
    EXPECT_EQ(rle_decode({2, 2, {4}}), (Bits{0, 0, 0, 0}));
    EXPECT_EQ(rle_decode({2, 2, {0, 4}}), (Bits{1, 1, 1, 1}));
}

TEST(Rle, RejectsBadInput) {
    std::vector<std::uint8_t> px(5, 0);
    EXPECT_THROW(rle_encode(px, 2, 2), Error);
    try {
        rle_encode(px, 2, 2);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidDimensions);
    }
    // Run sum mismatch and non-canonical layouts.
    for (const BinaryMask& bad : {BinaryMask{2, 2, {3}}, BinaryMask{2, 2, {1, 0, 3}},
                                  BinaryMask{2, 2, {2, 2, 0}}, BinaryMask{2, 2, {}}}) {
        try {
            rle_decode(bad);
            ADD_FAILURE() << "accepted non-canonical runs";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::CorruptMask);
        }
    }
}

TEST(Rle, RoundTripAndCanonicalUniquenessOnRandomMasks) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const int w = std::uniform_int_distribution<int>(1, 17)(rng);
        const int h = std::uniform_int_distribution<int>(1, 13)(rng);
        const Bits bits = oracle::random_bits(rng, w, h);
        const BinaryMask m = rle_encode(bits, w, h);
        ASSERT_TRUE(is_canonical(m));
        ASSERT_EQ(rle_decode(m), bits);
        ASSERT_EQ(m, oracle::encode(bits, w, h)); // equal pixel sets, identical runs
        ASSERT_EQ(rle_encode(rle_decode(m), w, h), m);
    }
}

TEST(MaskVideo, TrajectoryConversionRoundTrips) {
    Trajectory a{1, 0, {{0, from_bits({1, 0, 0, 0}, 2, 2)}, {2, from_bits({1, 1, 0, 0}, 2, 2)}}};
    Trajectory b{2, 1, {{1, from_bits({0, 0, 0, 1}, 2, 2)}}};
    const MaskVideo v = to_mask_video({a, b}, 2, 2, 5.0, 4);
    ASSERT_EQ(v.frames.size(), 3u);
    EXPECT_EQ(v.frames[1].frame_index, 1);
    EXPECT_NO_THROW(validate_mask_video(v));
    const auto back = to_trajectories(v);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], a);
    EXPECT_EQ(back[1], b);
    EXPECT_EQ(back[0].at(1), nullptr); // gap stays a gap
}

TEST(MaskVideo, ValidationCatchesBrokenInvariants) {
    MaskVideo v{2, 2, 1.0, 3, {{1, {{1, BinaryMask::empty(2, 2)}}}, {0, {{1, BinaryMask::empty(2, 2)}}}}};
    EXPECT_THROW(validate_mask_video(v), Error);
    v.frames = {{0, {{0, BinaryMask::empty(2, 2)}}}};
    EXPECT_THROW(validate_mask_video(v), Error);
    v.frames = {{0, {{1, BinaryMask::empty(3, 2)}}}};
    EXPECT_THROW(validate_mask_video(v), Error);
}

TEST(Spans, NormalizeMergesTouchingAndOverlapping) {
    EXPECT_EQ(normalize_spans({{4, 6}, {0, 3}}), (std::vector<FrameSpan>{{0, 6}}));
    EXPECT_EQ(normalize_spans({{0, 2}, {5, 7}, {1, 3}}), (std::vector<FrameSpan>{{0, 3}, {5, 7}}));
}

TEST(SceneGraphValidation, WellFormedGraphHasNoViolations) {
    EXPECT_TRUE(validate_scene_graph(small_graph()).empty());
}

TEST(SceneGraphValidation, FlagsSelfRelationAndUnknownEndpoint) {
    SceneGraph g = small_graph();
    g.relations.push_back({2, "near", 2, {{0, 1}}, RelationCategory::Spatial});
    g.relations.push_back({1, "near", 7, {{0, 1}}, RelationCategory::Spatial});
    const auto v = validate_scene_graph(g);
    EXPECT_TRUE(has_rule(v, "self-relation"));
    EXPECT_TRUE(has_rule(v, "unknown endpoint"));
    const auto it = std::find_if(v.begin(), v.end(), [](const Violation& x) { return x.rule == "unknown endpoint"; });
    EXPECT_NE(it->field.find("object_id"), std::string::npos);
}

TEST(SceneGraphValidation, FlagsSpanAndObjectRules) {
    SceneGraph g = small_graph();
    g.objects.push_back({kCameraId, "camera", false, {}});
    g.objects.push_back({1, "dup", false, {}});
    g.objects.push_back({3, "", false, {}});
    g.relations.push_back({1, "on", 2, {{5, 3}}, RelationCategory::Spatial});
    g.relations.push_back({1, "under", 2, {{0, 4}, {3, 6}}, RelationCategory::Spatial});
    g.relations.push_back({1, "by", 2, {{8, 12}}, RelationCategory::Spatial});
    g.relations.push_back({1, "", 2, {}, RelationCategory::Spatial});
    const auto v = validate_scene_graph(g);
    for (const char* rule : {"camera id reserved", "duplicate object id", "empty label",
                             "span start after end", "spans overlapping or unsorted",
                             "span beyond video", "empty predicate", "empty spans"}) {
        EXPECT_TRUE(has_rule(v, rule)) << rule;
    }
}

TEST(SceneGraphValidation, IdempotentAndOrderInsensitive) {
    SceneGraph g = small_graph();
    g.relations.push_back({2, "near", 2, {{0, 1}}, RelationCategory::Spatial});
    g.relations.push_back({1, "near", 9, {{3, 1}}, RelationCategory::Spatial});
    g.relations.push_back({4, "on", 1, {{0, 1}}, RelationCategory::Spatial});
    const auto first = validate_scene_graph(g);
    EXPECT_EQ(validate_scene_graph(g), first);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(g.relations.begin(), g.relations.end(), rng);
        // Field keys name the relation by content, not position.
        EXPECT_EQ(validate_scene_graph(g), first);
    }
}

TEST(SceneGraphIo, UncertainSuffixIsParsedOut) {
    EXPECT_EQ(split_uncertain_suffix("dog (uncertain)"), (std::pair<std::string, bool>{"dog", true}));
    EXPECT_EQ(split_uncertain_suffix("dog"), (std::pair<std::string, bool>{"dog", false}));
    const auto g = io::read_scene_graph(R"j({"objects":[{"id":1,"label":"dog (uncertain)","attributes":[]}],
        "relationships":[[1,"near",-1,[[0,2]]]]})j");
    ASSERT_EQ(g.objects.size(), 1u);
    EXPECT_EQ(g.objects[0].label, "dog");
    EXPECT_TRUE(g.objects[0].uncertain);
    ASSERT_EQ(g.relations.size(), 1u);
    EXPECT_EQ(g.relations[0].category, RelationCategory::Spatial); // 4-tuple
}

TEST(SceneGraphIo, RoundTripsWithFixedFieldOrder) {
    const SceneGraph g = small_graph();
    const std::string text = io::write_scene_graph(g);
    EXPECT_EQ(io::read_scene_graph(text), g);
    EXPECT_EQ(io::write_scene_graph(io::read_scene_graph(text)), text);
    EXPECT_LT(text.find("\"video\""), text.find("\"objects\""));
    EXPECT_LT(text.find("\"objects\""), text.find("\"relationships\""));
    EXPECT_NE(text.find("\"functional\""), std::string::npos);
}

TEST(SceneGraphIo, EmptyRelationshipsStillWritten) {
    SceneGraph g;
    g.objects = {{1, "tree", false, {}}};
    const std::string text = io::write_scene_graph(g);
    EXPECT_NE(text.find("\"relationships\": []"), std::string::npos);
}

TEST(SceneGraphIo, MissingRelationshipsIsParseError) {
    EXPECT_THROW(io::read_scene_graph(R"({"objects": []})"), ParseError);
}

TEST(SceneGraphIo, SyntaxErrorReportsLineAndOffset) {
    try {
        io::read_scene_graph("{\n  \"objects\": [\n    {\"id\": 1,, }\n  ]\n}");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.offset(), 13u); // the second comma
    }
}

TEST(MaskFileIo, RoundTripsAndIsByteStable) {
    std::mt19937_64 rng(5);
    MaskVideo v{9, 7, 12.5, 6, {}};
    for (int f : {0, 2, 5}) {
        MaskFrame frame{f, {}};
        for (int id : {1, 3, 4}) {
            frame.masks.emplace(id, oracle::random_mask(rng, 9, 7));
        }
        v.frames.push_back(frame);
    }
    const std::string text = io::write_mask_video(v);
    EXPECT_EQ(io::read_mask_video(text), v);
    EXPECT_EQ(io::write_mask_video(io::read_mask_video(text)), text);
}

TEST(MaskFileIo, RejectsCorruptRunsAndUnsortedEntries) {
    const std::string corrupt =
        R"({"width":2,"height":2,"fps":1.0,"n_frames":1,"entries":[{"frame":0,"object_id":1,"rle":[3]}]})";
    try {
        io::read_mask_video(corrupt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CorruptMask);
    }
    const std::string unsorted = R"({"width":2,"height":2,"fps":1.0,"n_frames":2,"entries":[
        {"frame":1,"object_id":1,"rle":[4]},{"frame":0,"object_id":1,"rle":[4]}]})";
    EXPECT_THROW(io::read_mask_video(unsorted), ParseError);
}

TEST(RegistryIo, RoundTrips) {
    io::RegistryFile f{4, 3, {{{1, 0, BinaryMask::full(4, 3)}, {2, 5, BinaryMask::empty(4, 3)}}}};
    const auto back = io::read_registry(io::write_registry(f));
    EXPECT_EQ(back.width, 4);
    EXPECT_EQ(back.registry, f.registry);
}
