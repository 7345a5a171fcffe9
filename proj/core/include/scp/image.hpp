#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace scp {

/// Full-resolution pixel coordinate. `x` is the column, `y` the row.
struct PixelCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Grayscale image with intensities in [0,1] and isotropic pixel spacing.
///
/// Invariants (checked on construction): height and width at least
/// `kMinSide`, every intensity finite and inside [0,1], spacing positive.
class Image {
public:
    static constexpr int kMinSide = 16;

    Image(std::string id, int height, int width, std::vector<double> pixels,
          double spacing_mm = 1.0);

    const std::string& id() const { return id_; }
    int height() const { return height_; }
    int width() const { return width_; }
    double spacing_mm() const { return spacing_mm_; }

    double at(int y, int x) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const double> pixels() const { return pixels_; }

    bool contains(PixelCoord p) const {
        return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
    }

private:
    std::string id_;
    int height_;
    int width_;
    double spacing_mm_;
    std::vector<double> pixels_;
};

/// Reads a binary PGM (P5), 8- or 16-bit. Intensities are scaled by maxval.
/// Throws IoError when the file cannot be opened and ParseError on bad content.
Image read_pgm(const std::filesystem::path& path, std::string id, double spacing_mm = 1.0);

/// Writes a 16-bit binary PGM, quantizing intensities to [0, 65535].
void write_pgm(const Image& img, const std::filesystem::path& path);

}  // namespace scp
