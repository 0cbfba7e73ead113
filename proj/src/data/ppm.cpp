#include "data/ppm.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace acdl::data {

namespace {

struct HeaderParser {
    const uint8_t* p;
    size_t n;
    size_t pos = 0;

    bool eof() const { return pos >= n; }

    void skip_space_and_comments() {
        while (!eof()) {
            const uint8_t c = p[pos];
            if (c == '#') {
                while (!eof() && p[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    long read_int(const char* what) {
        skip_space_and_comments();
        if (eof() || p[pos] < '0' || p[pos] > '9') {
            throw FormatError(std::string("ppm: malformed header, expected ") + what);
        }
        long v = 0;
        while (!eof() && p[pos] >= '0' && p[pos] <= '9') {
            v = v * 10 + (p[pos] - '0');
            if (v > 1000000000L) throw FormatError("ppm: implausible header value");
            ++pos;
        }
        return v;
    }
};

// Parses the header; returns (height, width, payload offset).
void parse_header(const uint8_t* bytes, size_t n, int& height, int& width, size_t& payload_at) {
    if (n < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw FormatError("ppm: not a P6 file (bad magic)");
    }
    HeaderParser hp{bytes, n, 2};
    const long w = hp.read_int("width");
    const long h = hp.read_int("height");
    const long maxval = hp.read_int("maxval");
    if (w <= 0 || h <= 0) throw FormatError("ppm: non-positive dimensions");
    if (maxval != 255) {
        throw FormatError("ppm: unsupported maxval " + std::to_string(maxval) + " (only 255)");
    }
    if (hp.eof()) throw FormatError("ppm: truncated header");
    const uint8_t sep = bytes[hp.pos];
    if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n') {
        throw FormatError("ppm: missing whitespace after maxval");
    }
    ++hp.pos;
    height = static_cast<int>(h);
    width = static_cast<int>(w);
    payload_at = hp.pos;
}

}  // namespace

ImageBuffer decode_ppm(const std::vector<uint8_t>& bytes) {
    int height = 0, width = 0;
    size_t payload_at = 0;
    parse_header(bytes.data(), bytes.size(), height, width, payload_at);
    ImageBuffer img;
    img.height = height;
    img.width = width;
    const size_t need = img.expected_bytes();
    if (bytes.size() - payload_at < need) {
        throw FormatError("ppm: truncated payload (" + std::to_string(bytes.size() - payload_at) +
                          " of " + std::to_string(need) + " bytes)");
    }
    img.pixels.assign(bytes.begin() + static_cast<long>(payload_at),
                      bytes.begin() + static_cast<long>(payload_at + need));
    return img;
}

std::vector<uint8_t> encode_ppm(const ImageBuffer& img) {
    if (img.height <= 0 || img.width <= 0 || img.pixels.size() != img.expected_bytes()) {
        throw ValueError("ppm: malformed image buffer");
    }
    char header[64];
    const int len = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", img.width, img.height);
    std::vector<uint8_t> out;
    out.reserve(static_cast<size_t>(len) + img.pixels.size());
    out.insert(out.end(), header, header + len);
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

ImageBuffer read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_ppm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_ppm(const std::filesystem::path& path, const ImageBuffer& img) {
    const std::vector<uint8_t> bytes = encode_ppm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

void validate_ppm_file(const std::filesystem::path& path, int* height, int* width) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<uint8_t> head(256);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<long>(head.size()));
    head.resize(static_cast<size_t>(in.gcount()));
    int h = 0, w = 0;
    size_t payload_at = 0;
    try {
        parse_header(head.data(), head.size(), h, w, payload_at);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    const auto file_size = std::filesystem::file_size(path);
    const size_t need = payload_at + static_cast<size_t>(h) * static_cast<size_t>(w) * 3;
    if (file_size < need) {
        throw FormatError(path.string() + ": truncated payload (file is " +
                          std::to_string(file_size) + " bytes, need " + std::to_string(need) + ")");
    }
    if (height) *height = h;
    if (width) *width = w;
}

}  // namespace acdl::data
