#include "scp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "scp/errors.hpp"
#include "scp/random.hpp"

namespace scp {

void SyntheticDatasetSpec::validate() const {
    if (n_images < 1 || n_landmarks < 1) {
        throw ArgumentError("synthetic dataset needs at least one image and one landmark");
    }
    if (image_size < Image::kMinSide) {
        throw ArgumentError("synthetic image_size must be at least " + std::to_string(Image::kMinSide));
    }
    if (!(spacing_mm > 0.0)) throw ArgumentError("synthetic spacing_mm must be positive");
    if (!(geometry_jitter_px >= 0.0) || !(geometry_jitter_px < image_size / 4.0)) {
        throw ArgumentError("geometry_jitter_px must be in [0, image_size/4)");
    }
    if (!(intensity_noise >= 0.0)) throw ArgumentError("intensity_noise must be non-negative");
    if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0)) {
        throw ArgumentError("outlier_fraction must be in [0,1]");
    }
    if (!(outlier_jitter_scale >= 1.0)) throw ArgumentError("outlier_jitter_scale must be >= 1");
}

namespace {

struct Point {
    double x, y;
};

struct Blob {
    double x, y, sigma, amplitude;
};

// Fixed scene layout in units of the image size; only positions move per image.
struct Scene {
    std::vector<Point> anchors;
    std::vector<double> anchor_sigma;
    std::vector<double> anchor_amplitude;
    std::vector<Blob> distractors;
};

Scene canonical_scene(const SyntheticDatasetSpec& spec) {
    Scene scene;
    const double s = spec.image_size;
    const double c = 0.5 * (s - 1.0);
    for (int l = 0; l < spec.n_landmarks; ++l) {
        const double angle = 2.0 * std::numbers::pi * l / spec.n_landmarks + 0.35;
        const double radius = s * (0.14 + 0.06 * ((l * 3) % 4) / 3.0);
        scene.anchors.push_back({c + radius * std::cos(angle), c + radius * std::sin(angle)});
        scene.anchor_sigma.push_back(s / 64.0 * (2.0 + 0.5 * (l % 3)));
        scene.anchor_amplitude.push_back(0.35 + 0.12 * (l % 4));
    }
    // Secondary structures: a ring of alternating bright and dark spots
    // between the anchors and the border, plus a few near the center.
    constexpr int kRing = 12;
    for (int i = 0; i < kRing; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / kRing + 0.1;
        const double radius = s * (0.36 + 0.04 * (i % 3) / 2.0);
        const double amplitude = (i % 2 == 0) ? 0.3 : -0.12;
        scene.distractors.push_back({c + radius * std::cos(angle), c + radius * std::sin(angle),
                                     s / 64.0 * (1.8 + 0.4 * (i % 3)), amplitude});
    }
    scene.distractors.push_back({c + 0.05 * s, c - 0.02 * s, s / 64.0 * 2.0, 0.3});
    scene.distractors.push_back({c - 0.06 * s, c + 0.07 * s, s / 64.0 * 2.4, 0.25});
    scene.distractors.push_back({c + 0.02 * s, c + 0.09 * s, s / 64.0 * 1.8, -0.1});
    return scene;
}

double segment_distance(Point p, Point a, Point b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

Point jitter(Rng& rng, Point p, double amount, double lo, double hi) {
    const double dx = (2.0 * uniform_unit(rng) - 1.0) * amount;
    const double dy = (2.0 * uniform_unit(rng) - 1.0) * amount;
    return {std::clamp(p.x + dx, lo, hi), std::clamp(p.y + dy, lo, hi)};
}

}  // namespace

std::vector<SyntheticSample> generate_synthetic_dataset(const SyntheticDatasetSpec& spec) {
    spec.validate();
    const Scene scene = canonical_scene(spec);
    const int size = spec.image_size;
    const double hi = size - 1.0;
    const double outlier_jitter = std::min(spec.geometry_jitter_px * spec.outlier_jitter_scale,
                                           0.99 * size / 4.0);
    const double ridge_width = size / 64.0 * 0.9;
    const double ridge_amplitude = 0.22;
    const double background = 0.15;

    Rng rng(spec.seed);
    std::vector<char> is_outlier(spec.n_images, 0);
    {
        const auto n_out = static_cast<int>(std::lround(spec.outlier_fraction * spec.n_images));
        std::vector<int> order(spec.n_images);
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < n_out; ++i) {
            const auto j = i + static_cast<int>(uniform_below(rng, spec.n_images - i));
            std::swap(order[i], order[j]);
            is_outlier[order[i]] = 1;
        }
    }

    std::vector<SyntheticSample> out;
    out.reserve(spec.n_images);
    for (int n = 0; n < spec.n_images; ++n) {
        const double amount = is_outlier[n] ? outlier_jitter : spec.geometry_jitter_px;
        std::vector<Point> anchors;
        for (const Point& a : scene.anchors) anchors.push_back(jitter(rng, a, amount, 0.0, hi));
        std::vector<Blob> blobs;
        for (const Blob& d : scene.distractors) {
            const Point moved = jitter(rng, {d.x, d.y}, amount, 0.0, hi);
            blobs.push_back({moved.x, moved.y, d.sigma, d.amplitude});
        }
        for (std::size_t l = 0; l < anchors.size(); ++l) {
            blobs.push_back({anchors[l].x, anchors[l].y, scene.anchor_sigma[l],
                             scene.anchor_amplitude[l]});
        }

        std::vector<double> pixels(static_cast<std::size_t>(size) * size);
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                const Point p{static_cast<double>(x), static_cast<double>(y)};
                double v = background;
                for (const Blob& b : blobs) {
                    const double r2 = (p.x - b.x) * (p.x - b.x) + (p.y - b.y) * (p.y - b.y);
                    v += b.amplitude * std::exp(-0.5 * r2 / (b.sigma * b.sigma));
                }
                if (anchors.size() > 1) {
                    for (std::size_t l = 0; l < anchors.size(); ++l) {
                        const double d = segment_distance(p, anchors[l], anchors[(l + 1) % anchors.size()]);
                        v += ridge_amplitude * std::exp(-0.5 * d * d / (ridge_width * ridge_width));
                    }
                }
                pixels[static_cast<std::size_t>(y) * size + x] = std::clamp(v, 0.0, 1.0);
            }
        }
        if (spec.intensity_noise > 0.0) {
            for (double& v : pixels) v = std::clamp(v + spec.intensity_noise * standard_normal(rng), 0.0, 1.0);
        }

        char id[32];
        std::snprintf(id, sizeof(id), "img%03d", n);
        LandmarkSet lm{id, {}};
        for (const Point& a : anchors) lm.points.push_back({a.x, a.y});
        out.push_back({Image(id, size, size, std::move(pixels), spec.spacing_mm), std::move(lm),
                       is_outlier[n] != 0});
    }
    return out;
}

}  // namespace scp
