#pragma once

#include "vsg/mask.hpp"

#include <optional>
#include <span>
#include <vector>

namespace vsg {

/// Per-cell coverage fractions of a mask pooled over square cells.
struct CoverageGrid {
    int rows = 0;
    int cols = 0;
    std::vector<double> values; // row-major, rows * cols

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

struct BoundingBox {
    int x1 = 0;
    int y1 = 0;
    int x2 = 0; // inclusive
    int y2 = 0; // inclusive

    bool operator==(const BoundingBox&) const = default;
};

std::size_t area(const BinaryMask& mask);

/// Pixel-wise OR. An empty list yields an all-zero mask of the given size.
BinaryMask mask_union(std::span<const BinaryMask> masks, int width, int height);
/// Pixel-wise OR of a non-empty list.
BinaryMask mask_union(std::span<const BinaryMask> masks);

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask complement(const BinaryMask& mask);

std::size_t intersection_area(const BinaryMask& a, const BinaryMask& b);

/// |a & b| / |a | b|; 0 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

/// Fraction of `new_mask` covered by `tracked_mask`. Throws EmptyMask when
/// `new_mask` has no pixels.
double asym_overlap(const BinaryMask& new_mask, const BinaryMask& tracked_mask);

/// Mean of the mask over non-overlapping `cell` x `cell` blocks. Frames whose
/// size is not a multiple of `cell` are zero-padded on the right and bottom.
CoverageGrid pooled_coverage(const BinaryMask& mask, int cell);

/// Square structuring element of side 2 * radius + 1. Dilation treats pixels
/// outside the frame as 0, erosion treats them as 1.
BinaryMask dilate(const BinaryMask& mask, int radius);
BinaryMask erode(const BinaryMask& mask, int radius);

/// Opening then closing with a square element of the given radius, then
/// removal of 4-connected components smaller than `min_area`.
BinaryMask morph_cleanup(const BinaryMask& mask, int min_area, int radius);

/// Sizes of the 4-connected components of a mask, in scan order of their
/// first pixel.
std::vector<std::size_t> component_areas(const BinaryMask& mask);

std::optional<BoundingBox> bbox_of(const BinaryMask& mask);

} // namespace vsg
