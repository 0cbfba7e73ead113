#pragma once

// Image buffers and the preprocessing chain: resize -> enhance -> normalize.
// 8-bit buffers hold decoded pixels; real buffers hold values in [0,1].

#include <cstdint>
#include <vector>

#include "core/error.hpp"

namespace acdl::data {

enum class Provenance { real, synthetic };

// 8-bit RGB, row-major, channel-last.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    static constexpr int channels = 3;
    std::vector<uint8_t> pixels;
    Provenance provenance = Provenance::real;

    size_t expected_bytes() const {
        return static_cast<size_t>(height) * static_cast<size_t>(width) * channels;
    }
};

// Normalized RGB in [0,1].
struct ImageReal {
    int height = 0;
    int width = 0;
    static constexpr int channels = 3;
    std::vector<float> pixels;
    Provenance provenance = Provenance::real;
};

struct EnhanceParams {
    double saturation_gain = 1.3;
    double contrast_gain = 1.2;
    double brightness_offset = 0.05;

    bool is_identity() const {
        return saturation_gain == 1.0 && contrast_gain == 1.0 && brightness_offset == 0.0;
    }
};

// Bilinear resample with half-pixel centers; 8-bit results are rounded
// half-up. Same-size targets reproduce the input exactly.
ImageBuffer resize(const ImageBuffer& img, int target_height, int target_width);

// x / 255 exactly.
ImageReal normalize(const ImageBuffer& img);

// Saturation (mix against per-pixel luma), then contrast around 0.5, then
// brightness offset; the result is clamped to [0,1]. Gains of 1 and offset 0
// reproduce the input.
ImageReal enhance(const ImageReal& img, const EnhanceParams& params);

// Round-half-up back to 8-bit (values are clamped first).
ImageBuffer quantize(const ImageReal& img);

}  // namespace acdl::data
