#include "vsg/tokens.hpp"

#include "vsg/errors.hpp"
#include "vsg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace vsg {

void TokenGridSpec::validate() const {
    if (g < 1 || m < 1 || patch < 1) {
        throw Error(ErrorKind::InvalidParam, "token grid needs g, m, patch >= 1");
    }
    if (width <= 0 || height <= 0 || n_frames < 0) {
        throw Error(ErrorKind::InvalidParam, "token grid needs a positive frame size");
    }
    if (!(fps > 0.0)) {
        throw Error(ErrorKind::InvalidParam, "token grid needs fps > 0");
    }
}

ScoreVolume coverage_scores(const std::map<FrameIndex, BinaryMask>& masks,
                            const TokenGridSpec& spec) {
    return kernels::coverage_scores_parallel(masks, spec);
}

TokenSelection select_tokens(const ScoreVolume& scores, ObjectId object_id, double tau_eff) {
    TokenSelection selection{object_id, {}};
    for (int t = 0; t < scores.groups; ++t) {
        for (int h = 0; h < scores.rows; ++h) {
            for (int w = 0; w < scores.cols; ++w) {
                if (scores.at(t, h, w) >= tau_eff) {
                    selection.indices.push_back({t, h, w});
                }
            }
        }
    }
    return selection;
}

int window_of(int t_g, const TokenGridSpec& spec, double window_seconds) {
    const double start_seconds = static_cast<double>(t_g) * spec.g / spec.fps;
    return static_cast<int>(std::floor(start_seconds / window_seconds));
}

std::map<int, TokenSelection> partition_windows(const TokenSelection& selection,
                                                const TokenGridSpec& spec,
                                                double window_seconds) {
    if (!(spec.fps > 0.0)) {
        throw Error(ErrorKind::InvalidParam, "window partition needs fps > 0");
    }
    if (!(window_seconds > 0.0)) {
        throw Error(ErrorKind::InvalidParam, "window length must be positive");
    }
    std::map<int, TokenSelection> windows;
    for (const auto& idx : selection.indices) {
        auto& slot = windows[window_of(idx.t_g, spec, window_seconds)];
        slot.object_id = selection.object_id;
        slot.indices.push_back(idx);
    }
    return windows;
}

std::string_view to_string(StreamKind kind) {
    switch (kind) {
    case StreamKind::TrajStart: return "traj_start";
    case StreamKind::TrajEnd: return "traj_end";
    case StreamKind::ObjectIdMark: return "object_id";
    case StreamKind::VisToken: return "vis_token";
    case StreamKind::TimestampMark: return "timestamp";
    case StreamKind::GlobalSummarySlot: return "global_summary";
    case StreamKind::WindowSummarySlot: return "window_summary";
    }
    return "unknown";
}

std::vector<StreamElement> arrange_stream(std::span<const ObjectTokens> objects,
                                          double window_seconds) {
    std::vector<const ObjectTokens*> ordered;
    std::set<ObjectId> seen;
    for (const auto& obj : objects) {
        if (!seen.insert(obj.selection.object_id).second) {
            throw Error(ErrorKind::InvalidInput,
                        "duplicate object id " + std::to_string(obj.selection.object_id));
        }
        ordered.push_back(&obj);
    }
    std::sort(ordered.begin(), ordered.end(), [](const ObjectTokens* a, const ObjectTokens* b) {
        return a->selection.object_id < b->selection.object_id;
    });

    std::vector<StreamElement> stream;
    for (const ObjectTokens* obj : ordered) {
        if (obj->selection.indices.empty()) {
            continue;
        }
        stream.push_back({StreamKind::TrajStart});
        stream.push_back({.kind = StreamKind::ObjectIdMark, .object_id = obj->selection.object_id});
        stream.push_back({StreamKind::GlobalSummarySlot});
        for (const auto& [window, sub] : obj->windows) {
            if (sub.indices.empty()) {
                continue;
            }
            stream.push_back({.kind = StreamKind::TimestampMark,
                              .seconds = static_cast<double>(window) * window_seconds});
            stream.push_back({.kind = StreamKind::WindowSummarySlot, .window = window});
        }
        stream.push_back({StreamKind::TrajEnd});
    }
    return stream;
}

std::vector<StreamElement> arrange_token_stream(std::span<const TokenSelection> selections) {
    std::vector<const TokenSelection*> ordered;
    for (const auto& s : selections) {
        ordered.push_back(&s);
    }
    std::sort(ordered.begin(), ordered.end(), [](const TokenSelection* a, const TokenSelection* b) {
        return a->object_id < b->object_id;
    });
    std::vector<StreamElement> stream;
    for (const TokenSelection* sel : ordered) {
        if (sel->indices.empty()) {
            continue;
        }
        stream.push_back({StreamKind::TrajStart});
        stream.push_back({.kind = StreamKind::ObjectIdMark, .object_id = sel->object_id});
        for (const auto& idx : sel->indices) {
            stream.push_back({.kind = StreamKind::VisToken, .token = idx});
        }
        stream.push_back({StreamKind::TrajEnd});
    }
    return stream;
}

} // namespace vsg
