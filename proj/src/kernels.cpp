#include "vsg/kernels.hpp"

#include "vsg/errors.hpp"
#include "vsg/eval.hpp"
#include "vsg/mask.hpp"
#include "vsg/mask_ops.hpp"

#include <algorithm>

namespace vsg {

namespace {

void check_masks(const std::map<FrameIndex, BinaryMask>& masks, const TokenGridSpec& spec) {
    spec.validate();
    for (const auto& [frame, mask] : masks) {
        if (mask.width != spec.width || mask.height != spec.height) {
            throw Error(ErrorKind::InvalidDimensions,
                        "mask at frame " + std::to_string(frame) + " does not match the token grid");
        }
    }
}

ScoreVolume empty_volume(const TokenGridSpec& spec) {
    ScoreVolume v;
    v.groups = spec.groups();
    v.rows = spec.rows();
    v.cols = spec.cols();
    v.values.assign(static_cast<std::size_t>(v.groups) * v.rows * v.cols, 0.0);
    return v;
}

} // namespace

namespace kernels {

ScoreVolume coverage_scores_parallel(const std::map<FrameIndex, BinaryMask>& masks,
                                     const TokenGridSpec& spec) {
    check_masks(masks, spec);
    ScoreVolume volume = empty_volume(spec);

    // Index masks by group so the parallel loop never touches the map.
    std::vector<std::vector<const BinaryMask*>> by_group(static_cast<std::size_t>(volume.groups));
    for (const auto& [frame, mask] : masks) {
        if (frame >= 0 && frame < spec.n_frames) {
            by_group[static_cast<std::size_t>(frame / spec.g)].push_back(&mask);
        }
    }

    const int cell = spec.cell();
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < volume.groups; ++t) {
        for (const BinaryMask* mask : by_group[static_cast<std::size_t>(t)]) {
            const CoverageGrid grid = pooled_coverage(*mask, cell);
            for (int h = 0; h < volume.rows; ++h) {
                for (int w = 0; w < volume.cols; ++w) {
                    double& slot = volume.values[volume.offset(t, h, w)];
                    slot = std::max(slot, grid.at(h, w));
                }
            }
        }
    }
    return volume;
}

std::vector<double> stiou_matrix_parallel(std::span<const Trajectory> a,
                                          std::span<const Trajectory> b) {
    std::vector<double> out(a.size() * b.size(), 0.0);
    const auto n = static_cast<long long>(out.size());
#pragma omp parallel for schedule(dynamic)
    for (long long k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k) / b.size();
        const auto j = static_cast<std::size_t>(k) % b.size();
        out[static_cast<std::size_t>(k)] = spatiotemporal_iou(a[i], b[j]);
    }
    return out;
}

} // namespace kernels

namespace reference {

ScoreVolume coverage_scores_serial(const std::map<FrameIndex, BinaryMask>& masks,
                                   const TokenGridSpec& spec) {
    check_masks(masks, spec);
    ScoreVolume volume = empty_volume(spec);
    const int cell = spec.cell();
    const double cell_area = static_cast<double>(cell) * cell;
    for (const auto& [frame, mask] : masks) {
        if (frame < 0 || frame >= spec.n_frames) {
            continue;
        }
        const Bits bits = rle_decode(mask);
        std::vector<int> counts(static_cast<std::size_t>(volume.rows) * volume.cols, 0);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                if (bits[static_cast<std::size_t>(y) * spec.width + x]) {
                    ++counts[static_cast<std::size_t>(y / cell) * volume.cols + x / cell];
                }
            }
        }
        const int t = frame / spec.g;
        for (int h = 0; h < volume.rows; ++h) {
            for (int w = 0; w < volume.cols; ++w) {
                double& slot = volume.values[volume.offset(t, h, w)];
                slot = std::max(slot, counts[static_cast<std::size_t>(h) * volume.cols + w] / cell_area);
            }
        }
    }
    return volume;
}

std::vector<double> stiou_matrix_serial(std::span<const Trajectory> a,
                                        std::span<const Trajectory> b) {
    std::vector<double> out;
    out.reserve(a.size() * b.size());
    for (const auto& ta : a) {
        for (const auto& tb : b) {
            // Pixelwise over the union of frames.
            std::size_t inter = 0, uni = 0;
            std::map<FrameIndex, std::pair<const BinaryMask*, const BinaryMask*>> frames;
            for (const auto& [f, m] : ta.masks) frames[f].first = &m;
            for (const auto& [f, m] : tb.masks) frames[f].second = &m;
            for (const auto& [f, pair] : frames) {
                const Bits ba = pair.first ? rle_decode(*pair.first) : Bits{};
                const Bits bb = pair.second ? rle_decode(*pair.second) : Bits{};
                const std::size_t n = std::max(ba.size(), bb.size());
                for (std::size_t p = 0; p < n; ++p) {
                    const bool x = p < ba.size() && ba[p];
                    const bool y = p < bb.size() && bb[p];
                    inter += (x && y) ? 1 : 0;
                    uni += (x || y) ? 1 : 0;
                }
            }
            out.push_back(uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni));
        }
    }
    return out;
}

} // namespace reference

} // namespace vsg
