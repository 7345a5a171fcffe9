#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scp/image.hpp"

namespace scp {

/// Sub-pixel landmark position (x = column, y = row).
struct LandmarkPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const LandmarkPoint&, const LandmarkPoint&) = default;
};

/// Ordered landmarks of one image. Index l means the same anatomical point in
/// every image of a dataset.
struct LandmarkSet {
    std::string image_id;
    std::vector<LandmarkPoint> points;

    std::size_t size() const { return points.size(); }
    friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

/// Nearest pixel to a landmark, clamped into a width x height grid.
PixelCoord to_pixel(LandmarkPoint p, int width, int height);

/// Text format: "scp-lm v1 <image_id> <L>" followed by L lines "x y".
void write_landmarks(std::ostream& out, const LandmarkSet& lm);
LandmarkSet read_landmarks(std::istream& in);
void write_landmarks_file(const LandmarkSet& lm, const std::filesystem::path& path);
LandmarkSet read_landmarks_file(const std::filesystem::path& path);

}  // namespace scp
