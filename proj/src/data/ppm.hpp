#pragma once

// Binary PPM (P6, maxval 255) codec. The canonical encoding is
// "P6\n<w> <h>\n255\n" followed by w*h*3 bytes; the decoder additionally
// accepts standard Netpbm whitespace and '#' comments in the header.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "data/image.hpp"

namespace acdl::data {

ImageBuffer decode_ppm(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> encode_ppm(const ImageBuffer& img);

ImageBuffer read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ImageBuffer& img);

// Header-only validation: parses dimensions and checks the payload length
// against the file size without reading the pixels.
void validate_ppm_file(const std::filesystem::path& path, int* height = nullptr,
                       int* width = nullptr);

}  // namespace acdl::data
