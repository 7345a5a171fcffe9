#include "scp/descriptor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "filters.hpp"
#include "scp/errors.hpp"

namespace scp {

void DescriptorConfig::validate() const {
    if (layers < 1 || layers > 8) throw ConfigurationError("descriptor layers must be in [1,8]");
    if (channels < 8 || channels % 4 != 0) {
        throw ConfigurationError("descriptor channels must be a multiple of 4, at least 8");
    }
    if (!(base_sigma > 0.0) || !std::isfinite(base_sigma)) {
        throw ConfigurationError("descriptor base_sigma must be positive");
    }
    if (!(cell_offset >= 0.0) || !std::isfinite(cell_offset)) {
        throw ConfigurationError("descriptor cell_offset must be non-negative");
    }
}

int DescriptorConfig::min_image_side() const {
    const double sigma_max = base_sigma * std::ldexp(1.0, layers - 1);
    return 2 * detail::gaussian_radius(sigma_max) + 1;
}

namespace {

struct Offset {
    int dy;
    int dx;
};

FeatureLayer build_layer(const Image& img, const detail::Plane& gx, const detail::Plane& gy,
                         const DescriptorConfig& config, int level) {
    const int d = 1 << level;
    const double sigma = config.base_sigma * d;
    const int n_orient = config.channels / 4;
    const int h = img.height(), w = img.width();

    const detail::Plane sx = detail::gaussian_blur(gx, sigma);
    const detail::Plane sy = detail::gaussian_blur(gy, sigma);

    // Soft-assign gradient magnitude to the two nearest orientation bins.
    std::vector<detail::Plane> energy(n_orient, detail::Plane(h, w));
    const double bin_width = 2.0 * std::numbers::pi / n_orient;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double mag = std::hypot(sx(y, x), sy(y, x));
            if (mag == 0.0) continue;
            double theta = std::atan2(sy(y, x), sx(y, x));
            if (theta < 0.0) theta += 2.0 * std::numbers::pi;
            const double pos = theta / bin_width;
            const int b0 = static_cast<int>(std::floor(pos)) % n_orient;
            const int b1 = (b0 + 1) % n_orient;
            const double frac = pos - std::floor(pos);
            energy[b0](y, x) += mag * (1.0 - frac);
            energy[b1](y, x) += mag * frac;
        }
    }
    for (auto& e : energy) e = detail::gaussian_blur(e, sigma);

    const int r = std::max(1, static_cast<int>(std::lround(config.cell_offset * sigma)));
    const std::array<Offset, 4> cells{{{-r, -r}, {-r, r}, {r, -r}, {r, r}}};

    const int rows = ceil_div(h, d), cols = ceil_div(w, d);
    const auto ch = static_cast<std::size_t>(config.channels);
    std::vector<float> grid(static_cast<std::size_t>(rows) * cols * ch);
    std::vector<double> raw(ch);
    for (int i = 0; i < rows; ++i) {
        const int cy = std::min(i * d + d / 2, h - 1);
        for (int j = 0; j < cols; ++j) {
            const int cx = std::min(j * d + d / 2, w - 1);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                for (int b = 0; b < n_orient; ++b) {
                    raw[c * n_orient + b] = energy[b].clamped(cy + cells[c].dy, cx + cells[c].dx);
                }
            }
            double sq = 0.0;
            for (double v : raw) sq += v * v;
            const double norm = std::sqrt(sq);
            float* out = grid.data() + (static_cast<std::size_t>(i) * cols + j) * ch;
            if (norm < kDegenerateNorm) {
                std::fill(out, out + ch, 0.0f);
            } else {
                for (std::size_t k = 0; k < ch; ++k) out[k] = static_cast<float>(raw[k] / norm);
            }
        }
    }
    return FeatureLayer(d, rows, cols, config.channels, std::move(grid));
}

}  // namespace

FeatureMap extract_features_builtin(const Image& img, const DescriptorConfig& config) {
    config.validate();
    const int min_side = config.min_image_side();
    if (img.height() < min_side || img.width() < min_side) {
        throw SizeError("image '" + img.id() + "' is smaller than the descriptor support (" +
                        std::to_string(min_side) + " px)");
    }
    detail::Plane intensity(img.height(), img.width());
    std::copy(img.pixels().begin(), img.pixels().end(), intensity.data.begin());
    const detail::Plane gx = detail::diff_x(intensity);
    const detail::Plane gy = detail::diff_y(intensity);

    std::vector<FeatureLayer> layers;
    layers.reserve(config.layers);
    for (int l = 0; l < config.layers; ++l) layers.push_back(build_layer(img, gx, gy, config, l));
    return FeatureMap(img.id(), "builtin", img.height(), img.width(), img.spacing_mm(),
                      std::move(layers));
}

}  // namespace scp
