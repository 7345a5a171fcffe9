#pragma once

#include <cstdint>
#include <vector>

#include "scp/image.hpp"
#include "scp/landmarks.hpp"

namespace scp {

/// Parameters of the synthetic landmark dataset.
///
/// Every image renders the same scene: one Gaussian blob per landmark anchor,
/// ridges joining consecutive anchors into a closed loop, and a few fixed
/// distractor blobs. Anchors are jittered per image, uniformly within
/// +/- geometry_jitter_px; a fixed fraction of images (the outliers) uses
/// outlier_jitter_scale times that jitter, capped below image_size / 4.
struct SyntheticDatasetSpec {
    int n_images = 40;
    int image_size = 64;
    int n_landmarks = 5;
    double spacing_mm = 0.1;
    double geometry_jitter_px = 3.0;
    double intensity_noise = 0.02;
    double outlier_fraction = 0.15;
    double outlier_jitter_scale = 3.0;
    std::uint64_t seed = 0;

    /// Throws ArgumentError if a field is out of range.
    void validate() const;
};

struct SyntheticSample {
    Image image;
    LandmarkSet landmarks;
    bool outlier = false;
};

/// Deterministic given the spec (including the seed). Image ids are
/// "img000", "img001", ...
std::vector<SyntheticSample> generate_synthetic_dataset(const SyntheticDatasetSpec& spec);

}  // namespace scp
