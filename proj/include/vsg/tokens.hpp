#pragma once

#include "vsg/types.hpp"

#include <compare>
#include <map>
#include <span>
#include <vector>

namespace vsg {

/// Geometry of the visual token lattice: each token covers `g` consecutive
/// frames and an (m * patch) x (m * patch) pixel footprint.
struct TokenGridSpec {
    int g = 2;
    int m = 2;
    int patch = 14;
    int width = 0;
    int height = 0;
    int n_frames = 0;
    double fps = 1.0;

    /// Throws InvalidParam.
    void validate() const;

    int cell() const noexcept { return m * patch; }
    int groups() const noexcept { return (n_frames + g - 1) / g; }
    int rows() const noexcept { return (height + cell() - 1) / cell(); }
    int cols() const noexcept { return (width + cell() - 1) / cell(); }
};

struct TokenIndex {
    int t_g = 0;
    int h_m = 0;
    int w_m = 0;

    bool operator==(const TokenIndex&) const = default;
    auto operator<=>(const TokenIndex&) const = default;
};

/// Coverage score per token, laid out [t_g][h_m][w_m].
struct ScoreVolume {
    int groups = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    std::size_t offset(int t_g, int h_m, int w_m) const {
        return (static_cast<std::size_t>(t_g) * rows + h_m) * cols + w_m;
    }
    double at(int t_g, int h_m, int w_m) const { return values[offset(t_g, h_m, w_m)]; }
};

struct TokenSelection {
    ObjectId object_id = 0;
    std::vector<TokenIndex> indices; // sorted, unique

    bool operator==(const TokenSelection&) const = default;
};

/// Per-token coverage of one object's masks: the pooled coverage of each
/// frame in the token's group, maxed over the group. Frames past the end of
/// the video or without a mask contribute 0. Throws InvalidDimensions when a
/// mask does not match the grid's frame size.
ScoreVolume coverage_scores(const std::map<FrameIndex, BinaryMask>& masks,
                            const TokenGridSpec& spec);

/// Tokens with score >= tau_eff, sorted by (t_g, h_m, w_m).
TokenSelection select_tokens(const ScoreVolume& scores, ObjectId object_id, double tau_eff = 0.5);

/// Window of a token group, anchored at the group's first frame.
int window_of(int t_g, const TokenGridSpec& spec, double window_seconds);

/// Splits a selection into disjoint temporal windows. Empty windows are absent.
std::map<int, TokenSelection> partition_windows(const TokenSelection& selection,
                                                const TokenGridSpec& spec,
                                                double window_seconds = 4.0);

enum class StreamKind {
    TrajStart,
    TrajEnd,
    ObjectIdMark,
    VisToken,
    TimestampMark,
    GlobalSummarySlot,
    WindowSummarySlot,
};

std::string_view to_string(StreamKind kind);

struct StreamElement {
    StreamKind kind = StreamKind::TrajStart;
    ObjectId object_id = 0;   // ObjectIdMark
    TokenIndex token;         // VisToken
    double seconds = 0.0;     // TimestampMark
    int window = 0;           // WindowSummarySlot

    bool operator==(const StreamElement&) const = default;
};

struct ObjectTokens {
    TokenSelection selection;
    std::map<int, TokenSelection> windows;
};

/// Summary-slot stream. Per object in ascending id order:
///   TrajStart, ObjectIdMark, GlobalSummarySlot,
///   (TimestampMark, WindowSummarySlot) per occupied window in time order,
///   TrajEnd.
/// Objects without any selected token are skipped. Throws InvalidInput on
/// duplicate ids.
std::vector<StreamElement> arrange_stream(std::span<const ObjectTokens> objects,
                                          double window_seconds = 4.0);

/// Token-level stream before resampling: per object, TrajStart, ObjectIdMark,
/// its VisTokens in temporal order, TrajEnd.
std::vector<StreamElement> arrange_token_stream(std::span<const TokenSelection> selections);

} // namespace vsg
