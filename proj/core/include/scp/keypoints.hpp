#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "scp/image.hpp"

namespace scp {

enum class Detector { dog_sift, grid, random };

std::string_view detector_name(Detector d);
/// Throws ArgumentError for an unknown name.
Detector parse_detector(std::string_view name);

/// Salient point at full resolution. `response` is the detector saliency,
/// `scale` the detection scale in pixels.
struct KeyPoint {
    int x = 0;
    int y = 0;
    double response = 0.0;
    double scale = 1.0;

    PixelCoord coord() const { return {x, y}; }
    friend bool operator==(const KeyPoint&, const KeyPoint&) = default;
};

/// Points of one image, sorted by non-increasing response.
struct KeyPointSet {
    std::string image_id;
    Detector detector = Detector::dog_sift;
    std::vector<KeyPoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    friend bool operator==(const KeyPointSet&, const KeyPointSet&) = default;
};

/// Difference-of-Gaussians scale space. Scales are not decimated between
/// octaves, so every level keeps full-resolution localization.
struct DogConfig {
    int octaves = 4;
    int scales_per_octave = 3;
    double sigma0 = 1.6;
    double assumed_blur = 0.5;
    double contrast_threshold = 0.01;
    double edge_ratio = 10.0;
    int border = 5;

    void validate() const;
    int min_image_side() const { return 2 * border + 3; }
};

inline constexpr int kDefaultKeypoints = 100;
inline constexpr double kDefaultMinDistance = 8.0;

/// Up to k DoG extrema with the largest |response|, after greedy
/// non-maximum suppression that keeps survivors at least min_dist apart.
/// Throws SizeError if the image is too small for the configured border.
KeyPointSet detect_keypoints_dog(const Image& img, int k = kDefaultKeypoints,
                                 double min_dist = kDefaultMinDistance,
                                 const DogConfig& config = {});

/// k points on the ceil(sqrt(k)) x ceil(sqrt(k)) lattice of cell centers,
/// row-major, response 1.
KeyPointSet detect_keypoints_grid(const Image& img, int k = kDefaultKeypoints);

/// k distinct uniformly random pixels. Throws CapacityError if k exceeds the
/// pixel count.
KeyPointSet detect_keypoints_random(const Image& img, int k, std::uint64_t seed);

/// Text format: "scp-kp v1 <image_id> <detector>" then "x y response scale"
/// per line, reals with 6 significant digits.
void write_keypoints(std::ostream& out, const KeyPointSet& kps);
KeyPointSet read_keypoints(std::istream& in);
void write_keypoints_file(const KeyPointSet& kps, const std::filesystem::path& path);
KeyPointSet read_keypoints_file(const std::filesystem::path& path);

}  // namespace scp
