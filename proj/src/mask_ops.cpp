#include "vsg/mask_ops.hpp"

#include "vsg/errors.hpp"

#include <algorithm>
#include <string>

namespace vsg {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorKind::InvalidDimensions,
                    "mask shapes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                        " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
    }
}

// One separable pass of a running max (dilate) or min (erode) along rows or
// columns. Out-of-frame pixels are ignored, which is the same as padding with
// the neutral element of the operation.
Bits sweep(const Bits& in, int width, int height, int radius, bool horizontal, bool take_max) {
    Bits out(in.size(), 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            std::uint8_t acc = take_max ? 0 : 1;
            const int center = horizontal ? x : y;
            const int limit = horizontal ? width : height;
            const int lo = std::max(0, center - radius);
            const int hi = std::min(limit - 1, center + radius);
            for (int k = lo; k <= hi; ++k) {
                const std::size_t idx = horizontal ? static_cast<std::size_t>(y) * width + k
                                                   : static_cast<std::size_t>(k) * width + x;
                if (take_max) {
                    acc |= in[idx];
                    if (acc) {
                        break;
                    }
                } else {
                    acc &= in[idx];
                    if (!acc) {
                        break;
                    }
                }
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    return out;
}

Bits morph(const Bits& bits, int width, int height, int radius, bool take_max) {
    if (radius <= 0) {
        return bits;
    }
    return sweep(sweep(bits, width, height, radius, true, take_max), width, height, radius, false,
                 take_max);
}

// Labels 4-connected components; returns per-pixel label (0 = background) and
// the area of each label (index 0 unused).
std::vector<std::size_t> label_components(const Bits& bits, int width, int height,
                                          std::vector<int>& labels) {
    labels.assign(bits.size(), 0);
    std::vector<std::size_t> areas{0};
    std::vector<int> stack;
    for (std::size_t start = 0; start < bits.size(); ++start) {
        if (!bits[start] || labels[start] != 0) {
            continue;
        }
        const int label = static_cast<int>(areas.size());
        std::size_t count = 0;
        stack.push_back(static_cast<int>(start));
        labels[start] = label;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            ++count;
            const int x = p % width;
            const int y = p / width;
            const int neighbours[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& n : neighbours) {
                if (n[0] < 0 || n[0] >= width || n[1] < 0 || n[1] >= height) {
                    continue;
                }
                const std::size_t q = static_cast<std::size_t>(n[1]) * width + n[0];
                if (bits[q] && labels[q] == 0) {
                    labels[q] = label;
                    stack.push_back(static_cast<int>(q));
                }
            }
        }
        areas.push_back(count);
    }
    return areas;
}

} // namespace

std::size_t area(const BinaryMask& mask) {
    std::size_t total = 0;
    for (std::size_t i = 1; i < mask.runs.size(); i += 2) {
        total += mask.runs[i];
    }
    return total;
}

BinaryMask mask_union(std::span<const BinaryMask> masks, int width, int height) {
    Bits acc(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    for (const auto& m : masks) {
        if (m.width != width || m.height != height) {
            throw Error(ErrorKind::InvalidDimensions, "union over masks of different shapes");
        }
        const Bits bits = rle_decode(m);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] |= bits[i];
        }
    }
    return rle_encode(acc, width, height);
}

BinaryMask mask_union(std::span<const BinaryMask> masks) {
    if (masks.empty()) {
        throw Error(ErrorKind::InvalidDimensions, "union of an empty list needs explicit dimensions");
    }
    return mask_union(masks, masks.front().width, masks.front().height);
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    Bits bits = rle_decode(a);
    const Bits other = rle_decode(b);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] &= other[i];
    }
    return rle_encode(bits, a.width, a.height);
}

BinaryMask complement(const BinaryMask& mask) {
    Bits bits = rle_decode(mask);
    for (auto& b : bits) {
        b ^= 1;
    }
    return rle_encode(bits, mask.width, mask.height);
}

std::size_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    // Walk both run lists in lockstep; no decode needed.
    std::size_t ia = 0, ib = 0;
    std::uint64_t left_a = a.runs.empty() ? 0 : a.runs[0];
    std::uint64_t left_b = b.runs.empty() ? 0 : b.runs[0];
    std::size_t total = 0;
    while (ia < a.runs.size() && ib < b.runs.size()) {
        if (left_a == 0) {
            if (++ia < a.runs.size()) {
                left_a = a.runs[ia];
            }
            continue;
        }
        if (left_b == 0) {
            if (++ib < b.runs.size()) {
                left_b = b.runs[ib];
            }
            continue;
        }
        const std::uint64_t step = std::min(left_a, left_b);
        if ((ia % 2 == 1) && (ib % 2 == 1)) {
            total += step;
        }
        left_a -= step;
        left_b -= step;
    }
    return total;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
    const std::size_t inter = intersection_area(a, b);
    const std::size_t uni = area(a) + area(b) - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double asym_overlap(const BinaryMask& new_mask, const BinaryMask& tracked_mask) {
    const std::size_t denom = area(new_mask);
    if (denom == 0) {
        throw Error(ErrorKind::EmptyMask, "asymmetric overlap of an empty mask");
    }
    return static_cast<double>(intersection_area(new_mask, tracked_mask)) /
           static_cast<double>(denom);
}

CoverageGrid pooled_coverage(const BinaryMask& mask, int cell) {
    if (cell <= 0) {
        throw Error(ErrorKind::InvalidParam, "pooling cell must be positive");
    }
    CoverageGrid grid;
    grid.rows = (mask.height + cell - 1) / cell;
    grid.cols = (mask.width + cell - 1) / cell;
    std::vector<std::size_t> counts(static_cast<std::size_t>(grid.rows) * grid.cols, 0);

    // Accumulate set runs directly; each run is split at row ends.
    std::size_t pos = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        const std::size_t len = mask.runs[i];
        if (i % 2 == 1) {
            for (std::size_t p = pos; p < pos + len; ++p) {
                const int y = static_cast<int>(p / mask.width);
                const int x = static_cast<int>(p % mask.width);
                ++counts[static_cast<std::size_t>(y / cell) * grid.cols + x / cell];
            }
        }
        pos += len;
    }
    const double denom = static_cast<double>(cell) * static_cast<double>(cell);
    grid.values.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        grid.values[i] = static_cast<double>(counts[i]) / denom;
    }
    return grid;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
    return rle_encode(morph(rle_decode(mask), mask.width, mask.height, radius, true), mask.width,
                      mask.height);
}

BinaryMask erode(const BinaryMask& mask, int radius) {
    return rle_encode(morph(rle_decode(mask), mask.width, mask.height, radius, false), mask.width,
                      mask.height);
}

BinaryMask morph_cleanup(const BinaryMask& mask, int min_area, int radius) {
    const int w = mask.width;
    const int h = mask.height;
    Bits bits = rle_decode(mask);
    if (radius > 0) {
        bits = morph(morph(bits, w, h, radius, false), w, h, radius, true); // open
        bits = morph(morph(bits, w, h, radius, true), w, h, radius, false); // close
    }
    if (min_area > 1) {
        std::vector<int> labels;
        const auto areas = label_components(bits, w, h, labels);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] && areas[static_cast<std::size_t>(labels[i])] < static_cast<std::size_t>(min_area)) {
                bits[i] = 0;
            }
        }
    }
    return rle_encode(bits, w, h);
}

std::vector<std::size_t> component_areas(const BinaryMask& mask) {
    std::vector<int> labels;
    auto areas = label_components(rle_decode(mask), mask.width, mask.height, labels);
    areas.erase(areas.begin());
    return areas;
}

std::optional<BoundingBox> bbox_of(const BinaryMask& mask) {
    std::optional<BoundingBox> box;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        const std::size_t len = mask.runs[i];
        if (i % 2 == 1 && len > 0) {
            const std::size_t first = pos;
            const std::size_t last = pos + len - 1;
            const int y_first = static_cast<int>(first / mask.width);
            const int y_last = static_cast<int>(last / mask.width);
            int x_lo = static_cast<int>(first % mask.width);
            int x_hi = static_cast<int>(last % mask.width);
            // A run that wraps touches the right border on its first row and
            // the left border on its last.
            if (y_last > y_first) {
                x_lo = 0;
                x_hi = mask.width - 1;
            }
            if (!box) {
                box = BoundingBox{x_lo, y_first, x_hi, y_last};
            } else {
                box->x1 = std::min(box->x1, x_lo);
                box->x2 = std::max(box->x2, x_hi);
                box->y1 = std::min(box->y1, y_first);
                box->y2 = std::max(box->y2, y_last);
            }
        }
        pos += len;
    }
    return box;
}

} // namespace vsg
