#include "oracles.hpp"

#include <cmath>
#include <limits>

#include "scp/landmarks.hpp"
#include "scp/similarity.hpp"

namespace scp::testing {

namespace {

std::vector<float> normalized(std::vector<float> v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    if (sq == 0.0) return v;
    const double n = std::sqrt(sq);
    for (float& x : v) x = static_cast<float>(x / n);
    return v;
}

}  // namespace

FeatureMap map_from(std::string id, const MapShape& shape, const CellFn& fn) {
    std::vector<FeatureLayer> layers;
    for (int l = 0; l < shape.layers; ++l) {
        const int d = 1 << l;
        const int rows = ceil_div(shape.height, d), cols = ceil_div(shape.width, d);
        std::vector<float> grid;
        grid.reserve(static_cast<std::size_t>(rows) * cols * shape.channels);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const std::vector<float> v = normalized(fn(l, r, c));
                grid.insert(grid.end(), v.begin(), v.end());
            }
        }
        layers.emplace_back(d, rows, cols, shape.channels, std::move(grid));
    }
    return FeatureMap(std::move(id), "test", shape.height, shape.width, 1.0, std::move(layers));
}

FeatureMap random_map(Rng& rng, const MapShape& shape, std::string id, double zero_fraction,
                      int levels) {
    return map_from(std::move(id), shape, [&](int, int, int) {
        std::vector<float> v(shape.channels, 0.0f);
        if (uniform_unit(rng) < zero_fraction) return v;
        bool any = false;
        while (!any) {
            for (float& x : v) {
                x = static_cast<float>(static_cast<int>(uniform_below(rng, 2 * levels + 1)) - levels);
                any = any || x != 0.0f;
            }
        }
        return v;
    });
}

std::vector<float> axis_vector(int channels, int axis) {
    std::vector<float> v(channels, 0.0f);
    v[axis] = 1.0f;
    return v;
}

MatchResult naive_forward(const std::vector<const FeatureMap*>& tmpls,
                          const std::vector<PixelCoord>& pts, const FeatureMap& target) {
    MatchResult best{{0, 0}, 0, -std::numeric_limits<double>::infinity()};
    for (std::size_t m = 0; m < tmpls.size(); ++m) {
        for (int y = 0; y < target.height(); ++y) {
            for (int x = 0; x < target.width(); ++x) {
                const double s = point_similarity(*tmpls[m], pts[m], target, {x, y});
                if (s > best.similarity) best = {{x, y}, m, s};
            }
        }
    }
    return best;
}

MatchResult naive_reverse(const FeatureMap& target, PixelCoord q,
                          const std::vector<const FeatureMap*>& tmpls) {
    MatchResult best{{0, 0}, 0, -std::numeric_limits<double>::infinity()};
    for (std::size_t m = 0; m < tmpls.size(); ++m) {
        for (int y = 0; y < tmpls[m]->height(); ++y) {
            for (int x = 0; x < tmpls[m]->width(); ++x) {
                const double s = point_similarity(*tmpls[m], {x, y}, target, q);
                if (s > best.similarity) best = {{x, y}, m, s};
            }
        }
    }
    return best;
}

double naive_representative(const std::vector<ImageRecord>& ds, const std::vector<std::size_t>& tmpls,
                            std::vector<double>* per_image) {
    double total = 0.0;
    if (per_image) per_image->clear();
    for (const ImageRecord& rec : ds) {
        double sum_k = 0.0;
        for (const KeyPoint& kp : rec.keypoints.points) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t t : tmpls) {
                const FeatureMap& tm = ds[t].features;
                for (int y = 0; y < tm.height(); ++y) {
                    for (int x = 0; x < tm.width(); ++x) {
                        const double s = point_similarity(tm, {x, y}, rec.features, kp.coord());
                        if (s > best) best = s;
                    }
                }
            }
            sum_k += best;
        }
        const double mean_k = sum_k / static_cast<double>(rec.keypoints.size());
        if (per_image) per_image->push_back(mean_k);
        total += mean_k;
    }
    return total / static_cast<double>(ds.size());
}

double naive_landmark_score(const std::vector<ImageRecord>& ds, const std::vector<std::size_t>& tmpls) {
    double total = 0.0;
    for (const ImageRecord& rec : ds) {
        const std::size_t n_landmarks = rec.landmarks->size();
        double sum_l = 0.0;
        for (std::size_t l = 0; l < n_landmarks; ++l) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t t : tmpls) {
                const FeatureMap& tm = ds[t].features;
                const PixelCoord pt = to_pixel(ds[t].landmarks->points[l], tm.width(), tm.height());
                for (int y = 0; y < rec.features.height(); ++y) {
                    for (int x = 0; x < rec.features.width(); ++x) {
                        const double s = point_similarity(tm, pt, rec.features, {x, y});
                        if (s > best) best = s;
                    }
                }
            }
            sum_l += best;
        }
        total += sum_l / static_cast<double>(n_landmarks);
    }
    return total / static_cast<double>(ds.size());
}

long double reference_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    long double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += static_cast<long double>(a[i]) * b[i];
        aa += static_cast<long double>(a[i]) * a[i];
        bb += static_cast<long double>(b[i]) * b[i];
    }
    if (aa == 0 || bb == 0) return 0;
    return ab / std::sqrt(aa * bb);
}

Image random_image(Rng& rng, int height, int width, std::string id, double lo, double hi) {
    std::vector<double> px(static_cast<std::size_t>(height) * width);
    for (double& v : px) v = lo + (hi - lo) * uniform_unit(rng);
    return Image(std::move(id), height, width, std::move(px));
}

Image blob_image(int size, double cx, double cy, double sigma, double amplitude) {
    std::vector<double> px(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            px[static_cast<std::size_t>(y) * size + x] = amplitude * std::exp(-0.5 * r2 / (sigma * sigma));
        }
    }
    return Image("blob", size, size, std::move(px));
}

std::vector<std::vector<std::size_t>> all_combinations(std::size_t n, std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == m) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

}  // namespace scp::testing
