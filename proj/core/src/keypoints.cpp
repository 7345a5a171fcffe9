#include "scp/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "filters.hpp"
#include "scp/errors.hpp"
#include "scp/random.hpp"

namespace scp {

std::string_view detector_name(Detector d) {
    switch (d) {
        case Detector::dog_sift: return "dog_sift";
        case Detector::grid: return "grid";
        case Detector::random: return "random";
    }
    return "unknown";
}

Detector parse_detector(std::string_view name) {
    if (name == "dog_sift") return Detector::dog_sift;
    if (name == "grid") return Detector::grid;
    if (name == "random") return Detector::random;
    throw ArgumentError("unknown detector '" + std::string(name) + "'");
}

void DogConfig::validate() const {
    if (octaves < 1 || scales_per_octave < 1) {
        throw ConfigurationError("DoG needs at least one octave and one scale per octave");
    }
    if (!(sigma0 > assumed_blur) || assumed_blur < 0.0) {
        throw ConfigurationError("DoG sigma0 must exceed the assumed input blur");
    }
    if (!(contrast_threshold >= 0.0) || !(edge_ratio > 1.0) || border < 1) {
        throw ConfigurationError("invalid DoG thresholds");
    }
}

namespace {

struct Candidate {
    int x;
    int y;
    int level;
    double response;
    double scale;
};

bool is_extremum(const std::vector<detail::Plane>& dog, int level, int y, int x) {
    const double v = dog[level](y, x);
    const bool want_max = v > 0.0;
    for (int dl = -1; dl <= 1; ++dl) {
        const detail::Plane& p = dog[level + dl];
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dl == 0 && dy == 0 && dx == 0) continue;
                const double n = p(y + dy, x + dx);
                if (want_max ? !(v > n) : !(v < n)) return false;
            }
        }
    }
    return true;
}

bool passes_edge_test(const detail::Plane& d, int y, int x, double ratio) {
    const double c = d(y, x);
    const double dxx = d(y, x + 1) + d(y, x - 1) - 2.0 * c;
    const double dyy = d(y + 1, x) + d(y - 1, x) - 2.0 * c;
    const double dxy = 0.25 * (d(y + 1, x + 1) - d(y + 1, x - 1) - d(y - 1, x + 1) + d(y - 1, x - 1));
    const double tr = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    if (det <= 0.0) return false;
    return tr * tr * ratio < (ratio + 1.0) * (ratio + 1.0) * det;
}

// Greedy suppression in candidate order; candidates must already be sorted.
std::vector<KeyPoint> suppress(const std::vector<Candidate>& cands, int k, double min_dist) {
    std::vector<KeyPoint> kept;
    const double min_sq = min_dist * min_dist;
    for (const Candidate& c : cands) {
        if (static_cast<int>(kept.size()) >= k) break;
        bool ok = true;
        for (const KeyPoint& p : kept) {
            const double dx = p.x - c.x, dy = p.y - c.y;
            const double sq = dx * dx + dy * dy;
            if (sq < min_sq || sq == 0.0) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back({c.x, c.y, c.response, c.scale});
    }
    return kept;
}

void require_positive_k(int k) {
    if (k < 1) throw ArgumentError("keypoint count must be at least 1");
}

}  // namespace

KeyPointSet detect_keypoints_dog(const Image& img, int k, double min_dist, const DogConfig& config) {
    require_positive_k(k);
    if (!(min_dist >= 0.0)) throw ArgumentError("min_dist must be non-negative");
    config.validate();
    if (img.height() < config.min_image_side() || img.width() < config.min_image_side()) {
        throw SizeError("image '" + img.id() + "' is too small for one DoG octave");
    }

    const int s = config.scales_per_octave;
    const int n_gauss = config.octaves * s + 2;
    const double step = std::exp2(1.0 / s);

    detail::Plane base(img.height(), img.width());
    std::copy(img.pixels().begin(), img.pixels().end(), base.data.begin());

    std::vector<detail::Plane> gauss;
    std::vector<double> sigmas;
    gauss.reserve(n_gauss);
    double sigma = config.sigma0;
    gauss.push_back(detail::gaussian_blur(
        base, std::sqrt(sigma * sigma - config.assumed_blur * config.assumed_blur)));
    sigmas.push_back(sigma);
    for (int i = 1; i < n_gauss; ++i) {
        const double next = sigma * step;
        gauss.push_back(detail::gaussian_blur(gauss.back(), std::sqrt(next * next - sigma * sigma)));
        sigma = next;
        sigmas.push_back(sigma);
    }

    std::vector<detail::Plane> dog;
    dog.reserve(n_gauss - 1);
    for (int i = 0; i + 1 < n_gauss; ++i) {
        detail::Plane d(img.height(), img.width());
        for (std::size_t j = 0; j < d.data.size(); ++j) {
            d.data[j] = gauss[i + 1].data[j] - gauss[i].data[j];
        }
        dog.push_back(std::move(d));
    }

    std::vector<Candidate> cands;
    const int b = config.border;
    for (int level = 1; level + 1 < static_cast<int>(dog.size()); ++level) {
        const detail::Plane& d = dog[level];
        for (int y = b; y < img.height() - b; ++y) {
            for (int x = b; x < img.width() - b; ++x) {
                const double v = d(y, x);
                if (std::abs(v) <= config.contrast_threshold) continue;
                if (!is_extremum(dog, level, y, x)) continue;
                if (!passes_edge_test(d, y, x, config.edge_ratio)) continue;
                cands.push_back({x, y, level, std::abs(v), sigmas[level]});
            }
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& c) {
        return a.response > c.response;
    });

    return {img.id(), Detector::dog_sift, suppress(cands, k, min_dist)};
}

KeyPointSet detect_keypoints_grid(const Image& img, int k) {
    require_positive_k(k);
    int g = 1;
    while (g * g < k) ++g;
    KeyPointSet out{img.id(), Detector::grid, {}};
    out.points.reserve(k);
    const double scale = static_cast<double>(std::min(img.height(), img.width())) / g;
    for (int i = 0; i < g && static_cast<int>(out.points.size()) < k; ++i) {
        const int y = static_cast<int>((2LL * i + 1) * img.height() / (2LL * g));
        for (int j = 0; j < g && static_cast<int>(out.points.size()) < k; ++j) {
            const int x = static_cast<int>((2LL * j + 1) * img.width() / (2LL * g));
            out.points.push_back({x, y, 1.0, scale});
        }
    }
    return out;
}

KeyPointSet detect_keypoints_random(const Image& img, int k, std::uint64_t seed) {
    require_positive_k(k);
    const std::size_t n = static_cast<std::size_t>(img.height()) * img.width();
    if (static_cast<std::size_t>(k) > n) {
        throw CapacityError("cannot draw " + std::to_string(k) + " distinct points from " +
                            std::to_string(n) + " pixels");
    }
    // Partial Fisher-Yates over the pixel indices.
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(seed);
    KeyPointSet out{img.id(), Detector::random, {}};
    out.points.reserve(k);
    for (int i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_below(rng, n - i);
        std::swap(idx[i], idx[j]);
        const int y = static_cast<int>(idx[i] / img.width());
        const int x = static_cast<int>(idx[i] % img.width());
        out.points.push_back({x, y, 1.0, 1.0});
    }
    return out;
}

void write_keypoints(std::ostream& out, const KeyPointSet& kps) {
    out << "scp-kp v1 " << kps.image_id << ' ' << detector_name(kps.detector) << '\n';
    char buf[96];
    for (const KeyPoint& p : kps.points) {
        std::snprintf(buf, sizeof(buf), "%d %d %.6g %.6g\n", p.x, p.y, p.response, p.scale);
        out << buf;
    }
}

KeyPointSet read_keypoints(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty keypoint file");
    std::istringstream header(line);
    std::string magic, version, id, det;
    header >> magic >> version >> id >> det;
    if (magic != "scp-kp") throw MagicError("keypoint file must start with 'scp-kp'");
    if (version != "v1") throw VersionError("unsupported keypoint file version '" + version + "'");
    if (id.empty() || det.empty()) throw ParseError("keypoint header lacks image id or detector");
    KeyPointSet kps{id, parse_detector(det), {}};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        KeyPoint p;
        if (!(row >> p.x >> p.y >> p.response >> p.scale)) {
            throw ParseError("malformed keypoint line: '" + line + "'");
        }
        kps.points.push_back(p);
    }
    return kps;
}

void write_keypoints_file(const KeyPointSet& kps, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_keypoints(out, kps);
    if (!out) throw IoError("failed writing " + path.string());
}

KeyPointSet read_keypoints_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_keypoints(in);
}

}  // namespace scp
