#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "scp/errors.hpp"
#include "scp/keypoints.hpp"

using namespace scp;
using namespace scp::testing;

namespace {

using Grid = std::vector<std::vector<double>>;

// Direct (non-separable, non-incremental) Gaussian of the input image.
Grid blur_direct(const Image& img, double sigma) {
    const int h = img.height(), w = img.width();
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0;
    for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    Grid out(h, std::vector<double>(w, 0.0));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -r; i <= r; ++i) {
                for (int j = -r; j <= r; ++j) {
                    acc += k[i + r] * k[j + r] * img.at(std::clamp(y + i, 0, h - 1), std::clamp(x + j, 0, w - 1));
                }
            }
            out[y][x] = acc / (sum * sum);
        }
    }
    return out;
}

// Strongest strict 26-neighbour DoG extremum found by scanning every pixel
// and every interior scale.
PixelCoord brute_force_dog_peak(const Image& img, const DogConfig& cfg) {
    const int n_gauss = cfg.octaves * cfg.scales_per_octave + 2;
    std::vector<Grid> g;
    for (int i = 0; i < n_gauss; ++i) {
        const double s = cfg.sigma0 * std::exp2(static_cast<double>(i) / cfg.scales_per_octave);
        g.push_back(blur_direct(img, std::sqrt(s * s - cfg.assumed_blur * cfg.assumed_blur)));
    }
    std::vector<Grid> d;
    for (int i = 0; i + 1 < n_gauss; ++i) {
        Grid diff = g[i + 1];
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) diff[y][x] -= g[i][y][x];
        }
        d.push_back(std::move(diff));
    }
    PixelCoord best{-1, -1};
    double best_v = 0;
    for (std::size_t l = 1; l + 1 < d.size(); ++l) {
        for (int y = cfg.border; y < img.height() - cfg.border; ++y) {
            for (int x = cfg.border; x < img.width() - cfg.border; ++x) {
                const double v = d[l][y][x];
                bool is_max = true, is_min = true;
                for (int dl = -1; dl <= 1; ++dl) {
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            if (!dl && !dy && !dx) continue;
                            const double n = d[l + dl][y + dy][x + dx];
                            is_max = is_max && v > n;
                            is_min = is_min && v < n;
                        }
                    }
                }
                if ((is_max || is_min) && std::abs(v) > best_v) {
                    best_v = std::abs(v);
                    best = {x, y};
                }
            }
        }
    }
    return best;
}

double dist(PixelCoord a, double x, double y) { return std::hypot(a.x - x, a.y - y); }

TEST(DogDetector, SingleBlobMatchesBruteForceScan) {
    for (auto [cx, cy, sigma] : {std::tuple{30.0, 34.0, 2.5}, {29.6, 33.3, 2.5}, {36.0, 27.0, 4.0}}) {
        const Image img = blob_image(64, cx, cy, sigma);
        const KeyPointSet kps = detect_keypoints_dog(img, 1);
        ASSERT_EQ(kps.size(), 1u);
        const PixelCoord oracle = brute_force_dog_peak(img, DogConfig{});
        EXPECT_LE(dist(kps.points[0].coord(), cx, cy), 2.0);
        EXPECT_LE(dist(kps.points[0].coord(), oracle.x, oracle.y), 1.0);
    }
}

TEST(DogDetector, ConstantImageHasNoPoints) {
    const Image img("c", 40, 40, std::vector<double>(1600, 0.5));
    EXPECT_TRUE(detect_keypoints_dog(img).empty());
}

TEST(DogDetector, TranslationCovariance) {
    const Image ref = blob_image(64, 32, 32, 2.5);
    const PixelCoord p0 = detect_keypoints_dog(ref, 1).points.at(0).coord();
    for (int dy = -12; dy <= 12; dy += 4) {
        for (int dx = -12; dx <= 12; dx += 3) {
            const PixelCoord p = detect_keypoints_dog(blob_image(64, 32 + dx, 32 + dy, 2.5), 1).points.at(0).coord();
            EXPECT_LE(std::abs(p.x - (p0.x + dx)), 1) << dx << "," << dy;
            EXPECT_LE(std::abs(p.y - (p0.y + dy)), 1) << dx << "," << dy;
        }
    }
}

// Several well-separated blobs of distinct sizes.
Image blob_field(int n) {
    std::vector<double> px(96 * 96, 0.0);
    for (int b = 0; b < n; ++b) {
        const double cx = 14 + 17 * (b % 4), cy = 14 + 22 * (b / 4);
        const double s = 1.8 + 0.3 * b;
        for (int y = 0; y < 96; ++y) {
            for (int x = 0; x < 96; ++x) {
                px[y * 96 + x] += 0.8 * std::exp(-0.5 * ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (s * s));
            }
        }
    }
    for (double& v : px) v = std::min(v, 1.0);
    return Image("field", 96, 96, px);
}

TEST(DogDetector, UnderSupplyReturnsEverySurvivor) {
    const Image img = blob_field(8);
    const KeyPointSet all = detect_keypoints_dog(img, 500);
    ASSERT_FALSE(all.empty());
    ASSERT_LT(all.size(), 500u);
    EXPECT_EQ(detect_keypoints_dog(img, static_cast<int>(all.size()) + 1), all);
    const KeyPointSet top = detect_keypoints_dog(img, static_cast<int>(all.size()));
    EXPECT_EQ(top, all);
}

TEST(DogDetector, RandomImageProperties) {
    Rng rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        const int h = 20 + static_cast<int>(uniform_below(rng, 50));
        const int w = 20 + static_cast<int>(uniform_below(rng, 50));
        const Image img = random_image(rng, h, w, "r");
        const double min_dist = static_cast<double>(uniform_below(rng, 12));
        const KeyPointSet kps = detect_keypoints_dog(img, 60, min_dist);
        EXPECT_LE(kps.size(), 60u);
        for (std::size_t i = 0; i < kps.size(); ++i) {
            const KeyPoint& p = kps.points[i];
            EXPECT_TRUE(img.contains(p.coord()));
            EXPECT_TRUE(std::isfinite(p.response));
            EXPECT_GE(p.response, 0.0);
            EXPECT_GT(p.scale, 0.0);
            if (i) EXPECT_GE(kps.points[i - 1].response, p.response);
            for (std::size_t j = 0; j < i; ++j) {
                const double d = std::hypot(p.x - kps.points[j].x, p.y - kps.points[j].y);
                EXPECT_GE(d, min_dist);
                EXPECT_GT(d, 0.0);
            }
        }
        EXPECT_EQ(detect_keypoints_dog(img, 60, min_dist), kps);
    }
}

TEST(DogDetector, Errors) {
    const Image img("s", 16, 16, std::vector<double>(256, 0.0));
    DogConfig wide;
    wide.border = 10;
    EXPECT_THROW(detect_keypoints_dog(img, 5, 8.0, wide), SizeError);
    EXPECT_THROW(detect_keypoints_dog(img, 0), ArgumentError);
    EXPECT_THROW(detect_keypoints_dog(img, 5, -1.0), ArgumentError);
}

TEST(GridDetector, LatticeArithmetic) {
    const Image img("g", 64, 64, std::vector<double>(64 * 64, 0.0));
    const KeyPointSet four = detect_keypoints_grid(img, 4);
    ASSERT_EQ(four.size(), 4u);
    const std::vector<PixelCoord> want{{16, 16}, {48, 16}, {16, 48}, {48, 48}};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(four.points[i].coord(), want[i]);
    const KeyPointSet one = detect_keypoints_grid(img, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one.points[0].coord(), (PixelCoord{32, 32}));
}

TEST(GridDetector, AlwaysInBounds) {
    for (auto [h, w] : {std::pair{16, 16}, {17, 40}, {64, 64}, {33, 21}}) {
        const Image img("g", h, w, std::vector<double>(static_cast<std::size_t>(h) * w, 0.0));
        for (int k = 1; k <= 300; k += 7) {
            const KeyPointSet kps = detect_keypoints_grid(img, k);
            EXPECT_EQ(kps.size(), static_cast<std::size_t>(k));
            for (const KeyPoint& p : kps.points) EXPECT_TRUE(img.contains(p.coord()));
        }
    }
}

TEST(RandomDetector, DeterminismAndExhaustion) {
    const Image img("r", 16, 16, std::vector<double>(256, 0.0));
    EXPECT_EQ(detect_keypoints_random(img, 30, 7), detect_keypoints_random(img, 30, 7));
    const KeyPointSet all = detect_keypoints_random(img, 256, 3);
    std::set<std::pair<int, int>> seen;
    for (const KeyPoint& p : all.points) seen.insert({p.x, p.y});
    EXPECT_EQ(seen.size(), 256u);
    EXPECT_THROW(detect_keypoints_random(img, 257, 3), CapacityError);
}

TEST(RandomDetector, SeedsGiveDifferentSets) {
    // Two independent 100-point draws from 4096 pixels coincide with
    // probability far below 1e-100.
    const Image img("r", 64, 64, std::vector<double>(4096, 0.0));
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto a = detect_keypoints_random(img, 100, 2 * s);
        const auto b = detect_keypoints_random(img, 100, 2 * s + 1);
        std::set<std::pair<int, int>> sa, sb;
        for (const KeyPoint& p : a.points) sa.insert({p.x, p.y});
        for (const KeyPoint& p : b.points) sb.insert({p.x, p.y});
        EXPECT_EQ(sa.size(), 100u);
        EXPECT_NE(sa, sb);
    }
}

TEST(KeypointFile, RoundTrip) {
    const Image img = blob_field(8);
    const KeyPointSet kps = detect_keypoints_dog(img, 20);
    std::stringstream first;
    write_keypoints(first, kps);
    EXPECT_EQ(first.str().rfind("scp-kp v1 field dog_sift\n", 0), 0u);
    const KeyPointSet back = read_keypoints(first);
    ASSERT_EQ(back.size(), kps.size());
    EXPECT_EQ(back.image_id, "field");
    EXPECT_EQ(back.detector, Detector::dog_sift);
    for (std::size_t i = 0; i < kps.size(); ++i) {
        EXPECT_EQ(back.points[i].coord(), kps.points[i].coord());
        EXPECT_NEAR(back.points[i].response, kps.points[i].response, 1e-5 * kps.points[i].response);
    }
    std::stringstream second;
    write_keypoints(second, back);
    EXPECT_EQ(second.str(), first.str());
}

TEST(KeypointFile, RejectsGarbage) {
    std::stringstream bad_header("scp-kp v2 a dog_sift\n");
    EXPECT_THROW(read_keypoints(bad_header), ParseError);
    std::stringstream bad_row("scp-kp v1 a grid\n1 2 x 1\n");
    EXPECT_THROW(read_keypoints(bad_row), ParseError);
    EXPECT_THROW(parse_detector("surf"), ArgumentError);
}

}  // namespace
