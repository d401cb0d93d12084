#include "vsg/mask.hpp"

#include "vsg/errors.hpp"

#include <algorithm>
#include <string>

namespace vsg {

namespace {

void check_dimensions(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorKind::InvalidDimensions,
                    "mask dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
}

} // namespace

BinaryMask BinaryMask::empty(int width, int height) {
    check_dimensions(width, height);
    BinaryMask m{width, height, {}};
    m.runs.push_back(static_cast<std::uint32_t>(m.pixel_count()));
    return m;
}

BinaryMask BinaryMask::full(int width, int height) {
    check_dimensions(width, height);
    BinaryMask m{width, height, {}};
    m.runs = {0u, static_cast<std::uint32_t>(m.pixel_count())};
    return m;
}

BinaryMask rle_encode(std::span<const std::uint8_t> pixels, int width, int height) {
    check_dimensions(width, height);
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (pixels.size() != n) {
        throw Error(ErrorKind::InvalidDimensions,
                    "pixel buffer holds " + std::to_string(pixels.size()) + " values, expected " +
                        std::to_string(n));
    }

    BinaryMask mask{width, height, {}};
    std::uint8_t current = 0;
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t bit = pixels[i] ? 1 : 0;
        if (bit != current) {
            mask.runs.push_back(run);
            current = bit;
            run = 0;
        }
        ++run;
    }
    mask.runs.push_back(run);
    return mask;
}

bool is_canonical(const BinaryMask& mask) noexcept {
    if (mask.width <= 0 || mask.height <= 0 || mask.runs.empty()) {
        return false;
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        if (mask.runs[i] == 0 && i != 0) {
            return false;
        }
        total += mask.runs[i];
    }
    // A lone leading zero would describe no pixels at all.
    if (mask.runs.size() == 1 && mask.runs[0] == 0) {
        return false;
    }
    return total == mask.pixel_count();
}

Bits rle_decode(const BinaryMask& mask) {
    if (!is_canonical(mask)) {
        std::uint64_t total = 0;
        for (auto r : mask.runs) {
            total += r;
        }
        throw Error(ErrorKind::CorruptMask,
                    total != mask.pixel_count()
                        ? "run lengths sum to " + std::to_string(total) + ", expected " +
                              std::to_string(mask.pixel_count())
                        : std::string("runs are not in canonical form"));
    }
    Bits bits(mask.pixel_count(), 0);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        const std::size_t len = mask.runs[i];
        if (i % 2 == 1) {
            std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(pos), len, std::uint8_t{1});
        }
        pos += len;
    }
    return bits;
}

} // namespace vsg
