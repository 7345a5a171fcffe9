#include "scp/image.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>

#include "scp/errors.hpp"

namespace scp {

Image::Image(std::string id, int height, int width, std::vector<double> pixels,
             double spacing_mm)
    : id_(std::move(id)), height_(height), width_(width), spacing_mm_(spacing_mm),
      pixels_(std::move(pixels)) {
    if (height_ < kMinSide || width_ < kMinSide) {
        throw SizeError("image '" + id_ + "' is " + std::to_string(height_) + "x" +
                        std::to_string(width_) + ", minimum side is " +
                        std::to_string(kMinSide));
    }
    if (pixels_.size() != static_cast<std::size_t>(height_) * width_) {
        throw DimensionError("image '" + id_ + "' pixel count does not match its shape");
    }
    if (!(spacing_mm_ > 0.0) || !std::isfinite(spacing_mm_)) {
        throw ArgumentError("image '" + id_ + "' spacing must be positive");
    }
    for (double v : pixels_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw DataError("image '" + id_ + "' has an intensity outside [0,1]");
        }
    }
}

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
    for (;;) {
        while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
        if (pos < data.size() && data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
}

long parse_header_int(const std::string& tok, const std::filesystem::path& path) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos ||
        tok.size() > 9) {
        throw ParseError("malformed PGM header in " + path.string());
    }
    return std::stol(tok);
}

}  // namespace

Image read_pgm(const std::filesystem::path& path, std::string id, double spacing_mm) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    if (next_token(data, pos) != "P5") {
        throw ParseError("not a binary PGM (P5): " + path.string());
    }
    long width = parse_header_int(next_token(data, pos), path);
    long height = parse_header_int(next_token(data, pos), path);
    long maxval = parse_header_int(next_token(data, pos), path);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw ParseError("invalid PGM dimensions or maxval in " + path.string());
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= data.size()) throw ParseError("truncated PGM: " + path.string());
    ++pos;

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (data.size() - pos < count * bytes_per) {
        throw ParseError("truncated PGM raster: " + path.string());
    }
    std::vector<double> pixels(count);
    const auto* raw = reinterpret_cast<const unsigned char*>(data.data() + pos);
    for (std::size_t i = 0; i < count; ++i) {
        unsigned v = bytes_per == 2 ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
        if (v > static_cast<unsigned>(maxval)) {
            throw ParseError("PGM sample exceeds maxval in " + path.string());
        }
        pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return Image(std::move(id), static_cast<int>(height), static_cast<int>(width),
                 std::move(pixels), spacing_mm);
}

void write_pgm(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n65535\n";
    std::string raster;
    raster.reserve(img.pixels().size() * 2);
    for (double v : img.pixels()) {
        auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        raster.push_back(static_cast<char>(q >> 8));
        raster.push_back(static_cast<char>(q & 0xFF));
    }
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace scp
