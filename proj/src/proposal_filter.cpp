#include "vsg/proposal_filter.hpp"

#include "vsg/errors.hpp"
#include "vsg/mask_ops.hpp"

#include <algorithm>
#include <numeric>

namespace vsg {

std::vector<std::size_t> filter_proposals(std::span<const BinaryMask> proposals,
                                          const ProposalFilterOptions& options) {
    if (proposals.empty()) {
        return {};
    }
    const int width = proposals.front().width;
    const int height = proposals.front().height;
    for (const auto& p : proposals) {
        if (p.width != width || p.height != height) {
            throw Error(ErrorKind::InvalidDimensions, "proposals must share dimensions");
        }
    }

    std::vector<Bits> bits;
    std::vector<std::size_t> areas;
    bits.reserve(proposals.size());
    for (const auto& p : proposals) {
        bits.push_back(rle_decode(p));
        areas.push_back(area(p));
    }

    std::vector<std::size_t> order(proposals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return areas[a] > areas[b]; });

    const std::size_t n_pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    Bits target(n_pixels, 0);
    for (const auto& b : bits) {
        for (std::size_t i = 0; i < n_pixels; ++i) {
            target[i] |= b[i];
        }
    }
    const auto full_coverage = static_cast<std::size_t>(std::count(target.begin(), target.end(), 1));

    Bits covered(n_pixels, 0);
    std::size_t covered_area = 0;
    auto admit = [&](std::size_t idx) {
        for (std::size_t i = 0; i < n_pixels; ++i) {
            if (bits[idx][i] && !covered[i]) {
                covered[i] = 1;
                ++covered_area;
            }
        }
    };

    std::vector<std::size_t> selected;
    std::vector<std::size_t> rejected;
    for (std::size_t visit = 0; visit < order.size(); ++visit) {
        if (covered_area == full_coverage) {
            break;
        }
        const std::size_t idx = order[visit];
        if (areas[idx] == 0) {
            continue;
        }
        std::size_t overlap = 0;
        for (std::size_t i = 0; i < n_pixels; ++i) {
            overlap += bits[idx][i] & covered[i];
        }
        const double ratio = static_cast<double>(overlap) / static_cast<double>(areas[idx]);
        if (ratio < options.overlap_thresh) {
            selected.push_back(idx);
            admit(idx);
        } else {
            rejected.push_back(idx);
        }
    }

    if (options.fallback_sweep) {
        // `rejected` is already in largest-first order.
        for (std::size_t idx : rejected) {
            if (covered_area == full_coverage) {
                break;
            }
            bool adds_pixels = false;
            for (std::size_t i = 0; i < n_pixels && !adds_pixels; ++i) {
                adds_pixels = bits[idx][i] && !covered[i];
            }
            if (adds_pixels) {
                selected.push_back(idx);
                admit(idx);
            }
        }
    }
    return selected;
}

} // namespace vsg
