#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vsg {

/// Dense row-major pixel bits, one byte per pixel (0 or 1).
using Bits = std::vector<std::uint8_t>;

/// Run-length encoded binary mask.
///
/// Runs are row-major and alternate zero/one counts, starting with the
/// zero-run. The canonical form has no interior zero-length runs; a leading 0
/// is only present when the first pixel is set. Two masks with the same pixel
/// set therefore compare equal run-for-run.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> runs;

    static BinaryMask empty(int width, int height);
    static BinaryMask full(int width, int height);

    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    bool same_shape(const BinaryMask& other) const noexcept {
        return width == other.width && height == other.height;
    }

    bool operator==(const BinaryMask&) const = default;
};

/// Throws InvalidDimensions when `pixels.size() != width * height` or a
/// dimension is not positive.
BinaryMask rle_encode(std::span<const std::uint8_t> pixels, int width, int height);

/// Throws CorruptMask when the runs do not sum to width * height or are not in
/// canonical form.
Bits rle_decode(const BinaryMask& mask);

/// True when the runs sum to the pixel count and follow the canonical layout.
bool is_canonical(const BinaryMask& mask) noexcept;

} // namespace vsg
