#include "data/image.hpp"

#include <algorithm>
#include <cmath>

namespace acdl::data {

namespace {

inline uint8_t round_half_up_u8(double v) {
    const double r = std::floor(v + 0.5);
    return static_cast<uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

ImageBuffer resize(const ImageBuffer& img, int target_height, int target_width) {
    if (target_height <= 0 || target_width <= 0) {
        throw ValueError("resize: target extents must be positive");
    }
    if (img.pixels.size() != img.expected_bytes()) throw ValueError("resize: malformed buffer");
    if (target_height == img.height && target_width == img.width) return img;

    ImageBuffer out;
    out.height = target_height;
    out.width = target_width;
    out.provenance = img.provenance;
    out.pixels.resize(out.expected_bytes());

    const double sy = static_cast<double>(img.height) / target_height;
    const double sx = static_cast<double>(img.width) / target_width;
    for (int y = 0; y < target_height; ++y) {
        // Pixel centers at (i + 0.5) / n.
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < target_width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                auto at = [&](int yy, int xx) {
                    return static_cast<double>(
                        img.pixels[(static_cast<size_t>(yy) * img.width + xx) * 3 + c]);
                };
                const double top = at(y0, x0) * (1.0 - wx) + at(y0, x1) * wx;
                const double bottom = at(y1, x0) * (1.0 - wx) + at(y1, x1) * wx;
                out.pixels[(static_cast<size_t>(y) * target_width + x) * 3 + c] =
                    round_half_up_u8(top * (1.0 - wy) + bottom * wy);
            }
        }
    }
    return out;
}

ImageReal normalize(const ImageBuffer& img) {
    ImageReal out;
    out.height = img.height;
    out.width = img.width;
    out.provenance = img.provenance;
    out.pixels.resize(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        out.pixels[i] = static_cast<float>(img.pixels[i]) / 255.0f;
    }
    return out;
}

ImageReal enhance(const ImageReal& img, const EnhanceParams& params) {
    if (params.saturation_gain <= 0.0 || params.contrast_gain <= 0.0) {
        throw ValueError("enhance: gains must be positive");
    }
    ImageReal out = img;
    const size_t n = img.pixels.size() / 3;
    for (size_t p = 0; p < n; ++p) {
        double r = img.pixels[p * 3 + 0];
        double g = img.pixels[p * 3 + 1];
        double b = img.pixels[p * 3 + 2];
        // Saturation: push channels away from (or toward) the pixel's luma.
        const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
        r = luma + params.saturation_gain * (r - luma);
        g = luma + params.saturation_gain * (g - luma);
        b = luma + params.saturation_gain * (b - luma);
        for (double* ch : {&r, &g, &b}) {
            double v = (*ch - 0.5) * params.contrast_gain + 0.5;
            v += params.brightness_offset;
            *ch = std::clamp(v, 0.0, 1.0);
        }
        out.pixels[p * 3 + 0] = static_cast<float>(r);
        out.pixels[p * 3 + 1] = static_cast<float>(g);
        out.pixels[p * 3 + 2] = static_cast<float>(b);
    }
    return out;
}

ImageBuffer quantize(const ImageReal& img) {
    ImageBuffer out;
    out.height = img.height;
    out.width = img.width;
    out.provenance = img.provenance;
    out.pixels.resize(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        out.pixels[i] = round_half_up_u8(std::clamp(static_cast<double>(img.pixels[i]), 0.0, 1.0) * 255.0);
    }
    return out;
}

}  // namespace acdl::data
