#pragma once

#include "scp/feature_map.hpp"
#include "scp/image.hpp"

namespace scp {

/// Parameters of the built-in label-free dense descriptor.
///
/// Layer l (0-based) uses Gaussian scale base_sigma * 2^l and downsample 2^l.
/// Each per-pixel vector holds oriented gradient energy in `channels / 4`
/// orientation bins, pooled at four cells placed diagonally around the pixel
/// at distance round(cell_offset * sigma).
struct DescriptorConfig {
    int layers = 3;
    int channels = 32;
    double base_sigma = 1.0;
    double cell_offset = 1.0;

    /// Throws ConfigurationError if any field is out of range.
    void validate() const;

    /// Smallest image side the filter bank can be applied to.
    int min_image_side() const;
};

/// Vectors whose raw norm falls below this threshold become exact zeros.
inline constexpr double kDegenerateNorm = 1e-12;

/// Builds a FeatureMap with extractor tag "builtin". Deterministic. Uses image
/// derivatives only, so a constant intensity offset leaves the output
/// unchanged and a constant image yields all-zero vectors.
///
/// Throws SizeError if the image is smaller than config.min_image_side().
FeatureMap extract_features_builtin(const Image& img, const DescriptorConfig& config = {});

}  // namespace scp
