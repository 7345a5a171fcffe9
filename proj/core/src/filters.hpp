#pragma once

// Internal image-processing helpers shared by the descriptor, the keypoint
// detector and the synthetic renderer. Not installed.

#include <vector>

namespace scp::detail {

/// Row-major 2-D grid of doubles.
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    double& operator()(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double operator()(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }

    /// Value at (y, x) with coordinates clamped to the grid (replicate border).
    double clamped(int y, int x) const;
};

/// Normalized 1-D Gaussian taps of radius ceil(3 sigma). sigma <= 0 yields {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Radius used by gaussian_kernel for a given sigma.
int gaussian_radius(double sigma);

/// Separable Gaussian blur with replicate border.
Plane gaussian_blur(const Plane& src, double sigma);

/// Central differences with replicate border: 0.5 * (I[x+1] - I[x-1]).
Plane diff_x(const Plane& src);
Plane diff_y(const Plane& src);

}  // namespace scp::detail
