#pragma once

#include <span>

#include "scp/feature_map.hpp"
#include "scp/image.hpp"

namespace scp {

/// Sum of squares of `v`, accumulated in double in a fixed lane order.
/// Every norm and dot product in the library goes through these two kernels
/// so that identical inputs always produce identical bits.
double squared_norm(std::span<const float> v);
double dot(std::span<const float> a, std::span<const float> b);

/// dot(a, b) with `b` already converted to double. Bit-identical to dot()
/// on the float originals; used by the hot scan loops.
double dot_widened(std::span<const float> a, std::span<const double> b);

/// Cosine of the angle between two vectors given their dot product and norms.
/// Returns exactly 0 when either norm is 0.
inline double cosine_from_parts(double dot_ab, double norm_a, double norm_b) {
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot_ab / (norm_a * norm_b);
}

/// <v,w> / (|v| |w|), or 0 if either vector is zero.
/// Throws DimensionError on length mismatch or empty input.
double cosine_similarity(std::span<const float> v, std::span<const float> w);
double cosine_similarity(std::span<const double> v, std::span<const double> w);

/// Equal-weight mean over layers of the cosine similarity between the
/// layer vectors covering `pa` in `fa` and `pb` in `fb`. A full-resolution
/// coordinate p maps to cell (p.y / d, p.x / d) of a layer with downsample d.
///
/// Throws ConfigurationError on a layer-structure mismatch and BoundsError if
/// either coordinate is outside its map.
double point_similarity(const FeatureMap& fa, PixelCoord pa, const FeatureMap& fb, PixelCoord pb);

/// Layer-wise structure check shared by the matching entry points.
void require_same_structure(const FeatureMap& a, const FeatureMap& b);
void require_in_bounds(const FeatureMap& fm, PixelCoord p);

}  // namespace scp
