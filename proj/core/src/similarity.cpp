#include "scp/similarity.hpp"

#include <cmath>
#include <string>

#include "scp/errors.hpp"

namespace scp {

namespace {

// Four independent accumulators, combined as (a0 + a1) + (a2 + a3). The
// order is part of the contract: see the header.
template <typename F>
double lane_sum(std::size_t n, F term) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += term(i);
        acc1 += term(i + 1);
        acc2 += term(i + 2);
        acc3 += term(i + 3);
    }
    if (i < n) acc0 += term(i++);
    if (i < n) acc1 += term(i++);
    if (i < n) acc2 += term(i++);
    return (acc0 + acc1) + (acc2 + acc3);
}

}  // namespace

double squared_norm(std::span<const float> v) {
    return lane_sum(v.size(), [&](std::size_t i) {
        const double x = v[i];
        return x * x;
    });
}

double dot(std::span<const float> a, std::span<const float> b) {
    return lane_sum(a.size(), [&](std::size_t i) {
        return static_cast<double>(a[i]) * static_cast<double>(b[i]);
    });
}

double dot_widened(std::span<const float> a, std::span<const double> b) {
    return lane_sum(a.size(), [&](std::size_t i) { return static_cast<double>(a[i]) * b[i]; });
}

double cosine_similarity(std::span<const float> v, std::span<const float> w) {
    if (v.size() != w.size() || v.empty()) {
        throw DimensionError("cosine_similarity: lengths " + std::to_string(v.size()) + " and " +
                             std::to_string(w.size()));
    }
    return cosine_from_parts(dot(v, w), std::sqrt(squared_norm(v)), std::sqrt(squared_norm(w)));
}

double cosine_similarity(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size() || v.empty()) {
        throw DimensionError("cosine_similarity: lengths " + std::to_string(v.size()) + " and " +
                             std::to_string(w.size()));
    }
    double vw = 0.0, vv = 0.0, ww = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        vw += v[i] * w[i];
        vv += v[i] * v[i];
        ww += w[i] * w[i];
    }
    return cosine_from_parts(vw, std::sqrt(vv), std::sqrt(ww));
}

void require_same_structure(const FeatureMap& a, const FeatureMap& b) {
    if (!a.same_structure(b)) {
        throw ConfigurationError("feature maps '" + a.source_image_id() + "' and '" +
                                 b.source_image_id() + "' have different layer structures");
    }
}

void require_in_bounds(const FeatureMap& fm, PixelCoord p) {
    if (!fm.contains(p.x, p.y)) {
        throw BoundsError("coordinate (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                          ") outside feature map '" + fm.source_image_id() + "'");
    }
}

double point_similarity(const FeatureMap& fa, PixelCoord pa, const FeatureMap& fb, PixelCoord pb) {
    require_same_structure(fa, fb);
    require_in_bounds(fa, pa);
    require_in_bounds(fb, pb);
    double acc = 0.0;
    for (std::size_t l = 0; l < fa.layer_count(); ++l) {
        const FeatureLayer& la = fa.layer(l);
        const FeatureLayer& lb = fb.layer(l);
        const int d = la.downsample();
        const int ra = pa.y / d, ca = pa.x / d, rb = pb.y / d, cb = pb.x / d;
        acc += cosine_from_parts(dot(la.at(ra, ca), lb.at(rb, cb)), la.norm_at(ra, ca),
                                 lb.norm_at(rb, cb));
    }
    return acc / static_cast<double>(fa.layer_count());
}

}  // namespace scp
