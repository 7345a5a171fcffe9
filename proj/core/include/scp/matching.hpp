#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "scp/feature_map.hpp"
#include "scp/image.hpp"
#include "scp/keypoints.hpp"

namespace scp {

using FeatureRef = std::reference_wrapper<const FeatureMap>;

/// Best match of a query point: where it landed, in which template, and the
/// similarity achieved there.
struct MatchResult {
    PixelCoord location;
    std::size_t template_index = 0;
    double similarity = 0.0;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Exhaustive search over every full-resolution pixel p of `target` for the
/// maximum of point_similarity(tmpl, p_t, target, p). Ties go to the lowest
/// row-major index.
MatchResult match_forward(const FeatureMap& tmpl, PixelCoord p_t, const FeatureMap& target);

/// Joint argmax over (template m, pixel p) of
/// point_similarity(tmpls[m], pts[m], target, p). Ties go to the lowest m,
/// then the lowest row-major p. Throws ArgumentError on an empty list.
MatchResult match_forward_multi(std::span<const FeatureRef> tmpls, std::span<const PixelCoord> pts,
                                const FeatureMap& target);

/// Reverse-order matching: argmax over (m, q) of
/// point_similarity(tmpls[m], q, target, q_k). Same tie-break rules.
MatchResult match_reverse(const FeatureMap& target, PixelCoord q_k, std::span<const FeatureRef> tmpls);

/// match_reverse for every keypoint, in keypoint order. `jobs` threads share
/// the work; the output is identical for any job count.
std::vector<MatchResult> match_reverse_batch(const FeatureMap& target, const KeyPointSet& kps,
                                             std::span<const FeatureRef> tmpls, unsigned jobs = 1);

/// Coarsest-layer candidates refined by match_forward_cascade.
inline constexpr std::size_t kCascadeBeam = 32;

/// Approximate coarse-to-fine forward search. The coarsest layer is scanned
/// exhaustively and its kCascadeBeam best cells are refined: each finer layer
/// l only visits cells within 2 * d_l pixels of the previous estimate, scored
/// by the mean over layers l..L-1. The best refined location wins on the full
/// point_similarity, which is the returned similarity.
MatchResult match_forward_cascade(const FeatureMap& tmpl, PixelCoord p_t, const FeatureMap& target);

/// Fixed query for repeated scans: the per-layer vectors (and their norms)
/// covering one point of one map.
class QueryProfile {
public:
    QueryProfile(const FeatureMap& fm, PixelCoord p);

    std::size_t layer_count() const { return vectors_.size(); }
    std::span<const float> vector(std::size_t l) const { return vectors_[l]; }
    double norm(std::size_t l) const { return norms_[l]; }
    /// The layer vector converted to double, for dot_widened.
    std::span<const double> widened(std::size_t l) const { return widened_[l]; }

private:
    std::vector<std::span<const float>> vectors_;
    std::vector<double> norms_;
    std::vector<std::vector<double>> widened_;
};

/// Exhaustive scan of every full-resolution pixel of `searched` against a
/// query. Structure compatibility is the caller's responsibility. `scratch`
/// is reused between calls to avoid reallocation.
MatchResult scan_best(const FeatureMap& searched, const QueryProfile& query,
                      std::vector<double>& scratch);

}  // namespace scp
