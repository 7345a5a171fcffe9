#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "scp/descriptor.hpp"
#include "scp/errors.hpp"
#include "scp/selection.hpp"
#include "scp/synthetic.hpp"

using namespace scp;
using namespace scp::testing;

namespace {

ImageRecord record(FeatureMap fm, std::vector<PixelCoord> kps) {
    KeyPointSet set{fm.source_image_id(), Detector::grid, {}};
    for (PixelCoord p : kps) set.points.push_back({p.x, p.y, 1.0, 1.0});
    return {std::move(fm), std::move(set), std::nullopt};
}

FeatureMap renamed(const FeatureMap& fm, std::string id) {
    return FeatureMap(std::move(id), fm.extractor_tag(), fm.height(), fm.width(), fm.spacing_mm(), fm.layers());
}

Dataset random_dataset(Rng& rng, std::size_t n, const MapShape& base, int max_kp = 4, bool vary_size = true) {
    Dataset ds;
    for (std::size_t i = 0; i < n; ++i) {
        MapShape shape = base;
        if (vary_size) {
            shape.height = 4 + static_cast<int>(uniform_below(rng, base.height - 3));
            shape.width = 4 + static_cast<int>(uniform_below(rng, base.width - 3));
        }
        FeatureMap fm = random_map(rng, shape, "im" + std::to_string(i));
        std::vector<PixelCoord> kps;
        const int k = 1 + static_cast<int>(uniform_below(rng, max_kp));
        for (int j = 0; j < k; ++j) {
            kps.push_back({static_cast<int>(uniform_below(rng, shape.width)), static_cast<int>(uniform_below(rng, shape.height))});
        }
        ds.push_back(record(std::move(fm), kps));
    }
    return ds;
}

std::vector<std::string> ids_of(const Dataset& ds, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (std::size_t i : idx) out.push_back(ds[i].id());
    return out;
}

TEST(RepresentativeScore, SelfRepresentation) {
    const MapShape shape{4, 5, 1, 20};
    FeatureMap fm = map_from("only", shape, [](int, int r, int c) { return axis_vector(20, r * 5 + c); });
    const Dataset ds{record(fm, {{0, 0}, {4, 3}, {2, 1}})};
    const std::vector<std::string> ids{"only"};
    EXPECT_EQ(representative_score(ids, ds).score, 1.0);
}

TEST(RepresentativeScore, DuplicateImages) {
    Rng rng(6);
    const FeatureMap fm = random_map(rng, {6, 6, 2, 3}, "a", 0.0);
    const Dataset ds{record(fm, {{1, 1}, {5, 2}}), record(renamed(fm, "b"), {{3, 3}})};
    const std::vector<std::string> ids{"b"};
    const CombinationScore s = representative_score(ids, ds);
    EXPECT_NEAR(s.score, 1.0, 1e-12);
    ASSERT_EQ(s.per_image_means.size(), 2u);
    EXPECT_EQ(s.per_image_means[0].first, "a");
}

TEST(RepresentativeScore, HandBuiltMapsMatchFourLevelLoop) {
    const MapShape shape{4, 4, 1, 3};
    const Dataset ds{
        record(map_from("a", shape, [](int, int r, int c) { return std::vector<float>{1.0f + r, 1.0f * c, 0}; }), {{0, 0}, {3, 2}}),
        record(map_from("b", shape, [](int, int r, int c) { return std::vector<float>{0, 1.0f * r, 2.0f - c}; }), {{1, 3}, {2, 2}}),
        record(map_from("c", shape, [](int, int r, int c) { return std::vector<float>{1.0f * (r == c), 1, 1.0f * c}; }), {{3, 3}, {0, 1}}),
    };
    for (const auto& subset : {std::vector<std::size_t>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}}) {
        std::vector<double> per_image;
        const double want = naive_representative(ds, subset, &per_image);
        const CombinationScore got = representative_score(ids_of(ds, subset), ds);
        EXPECT_EQ(got.score, want);
        for (std::size_t n = 0; n < ds.size(); ++n) EXPECT_EQ(got.per_image_means[n].second, per_image[n]);
    }
}

TEST(RepresentativeScore, Errors) {
    Rng rng(2);
    Dataset ds = random_dataset(rng, 3, {6, 6, 1, 3});
    EXPECT_THROW(representative_score(std::vector<std::string>{"nope"}, ds), LookupError);
    EXPECT_THROW(representative_score(std::vector<std::string>{}, ds), ArgumentError);
    EXPECT_THROW(representative_score(std::vector<std::string>{"im0", "im0"}, ds), ArgumentError);
    ds[1].keypoints.points.clear();
    EXPECT_THROW(representative_score(std::vector<std::string>{"im0"}, ds), DataError);
    EXPECT_THROW(SimilarityTable::build(ds), DataError);
}

TEST(SimilarityTable, SubsetScoresAreBitExact) {
    Rng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset ds = random_dataset(rng, 5, {10, 10, 1 + static_cast<int>(uniform_below(rng, 3)), 3});
        const SimilarityTable table = SimilarityTable::build(ds, 1 + trial % 4);
        for (std::size_t m = 1; m <= 3; ++m) {
            for (const auto& subset : all_combinations(ds.size(), m)) {
                std::vector<double> per_image;
                const double want = naive_representative(ds, subset, &per_image);
                std::vector<double> got_per_image;
                EXPECT_EQ(table.score(subset, &got_per_image), want);
                EXPECT_EQ(got_per_image, per_image);
                EXPECT_EQ(representative_score(ids_of(ds, subset), ds, 2).score, want);
            }
        }
    }
}

TEST(SimilarityTable, SubsetMonotonicity) {
    Rng rng(45);
    const Dataset ds = random_dataset(rng, 9, {10, 10, 2, 3});
    const SimilarityTable table = SimilarityTable::build(ds);
    for (int draw = 0; draw < 500; ++draw) {
        std::vector<std::size_t> pool{0, 1, 2, 3, 4, 5, 6, 7, 8};
        const std::size_t m = 1 + uniform_below(rng, 7);
        for (std::size_t i = 0; i <= m; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
        std::vector<std::size_t> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
        std::vector<std::size_t> bigger = s;
        bigger.push_back(pool[m]);
        std::sort(s.begin(), s.end());
        std::sort(bigger.begin(), bigger.end());
        EXPECT_LE(table.score(s), table.score(bigger) + 1e-9);
        const double r = table.score(bigger);
        EXPECT_LE(r, 1.0 + 1e-9);
        EXPECT_GE(r, -1.0 - 1e-9);
    }
}

TEST(Binomial, Values) {
    EXPECT_EQ(binomial(10, 3), 120u);
    EXPECT_EQ(binomial(5, 0), 1u);
    EXPECT_EQ(binomial(5, 5), 1u);
    EXPECT_EQ(binomial(3, 5), 0u);
    EXPECT_EQ(binomial(40, 20), 137846528820u);
    EXPECT_EQ(binomial(1000, 500), std::numeric_limits<std::size_t>::max());
}

TEST(Summarize, WelfordValues) {
    const std::vector<double> v{1, 2, 3, 4};
    const ScoreSummary s = summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 4.0);
    const std::vector<double> same(17, 0.1 + 0.2);
    EXPECT_EQ(summarize(same).std, 0.0);
    EXPECT_EQ(summarize(std::vector<double>{0.7}).std, 0.0);
}

// Independent argmax over every combination with the documented tie-break.
std::pair<std::vector<std::string>, double> enumerate_best(const Dataset& ds, std::size_t m) {
    std::vector<std::string> best_ids;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& subset : all_combinations(ds.size(), m)) {
        std::vector<std::string> ids = ids_of(ds, subset);
        std::sort(ids.begin(), ids.end());
        const double s = naive_representative(ds, subset);
        if (s > best || (s == best && ids < best_ids)) {
            best = s;
            best_ids = ids;
        }
    }
    return {best_ids, best};
}

TEST(SelectTemplates, ExhaustiveMatchesEnumeration) {
    Rng rng(70);
    const Dataset ds = random_dataset(rng, 5, {8, 8, 2, 3});
    const SelectionReport report = select_templates(ds, 2, 10, 0);
    EXPECT_EQ(report.search_mode, SearchMode::exhaustive);
    EXPECT_EQ(report.trials_evaluated, 10u);
    const auto [ids, score] = enumerate_best(ds, 2);
    EXPECT_EQ(report.best.template_ids, ids);
    EXPECT_EQ(report.best.score, score);
}

TEST(SelectTemplates, HubImageIsChosen) {
    // A shares every vector of B and C; B and C are orthogonal to each other.
    const MapShape shape{4, 4, 1, 3};
    const Dataset ds{
        record(map_from("A", shape, [](int, int r, int) { return axis_vector(3, r < 2 ? 0 : 1); }), {{0, 0}, {0, 3}}),
        record(map_from("B", shape, [](int, int, int) { return axis_vector(3, 0); }), {{1, 1}, {2, 2}}),
        record(map_from("C", shape, [](int, int, int) { return axis_vector(3, 1); }), {{3, 3}, {1, 2}}),
    };
    const SelectionReport report = select_templates(ds, 1, 10, 0);
    ASSERT_EQ(report.best.template_ids, std::vector<std::string>{"A"});
    EXPECT_EQ(report.best.score, 1.0);
    EXPECT_LT(report.top.at(1).score, 1.0);
}

TEST(SelectTemplates, FullSetWhenMEqualsN) {
    Rng rng(71);
    const Dataset ds = random_dataset(rng, 4, {7, 7, 1, 3});
    const SelectionReport report = select_templates(ds, 4, 1, 9);
    EXPECT_EQ(report.trials_evaluated, 1u);
    EXPECT_EQ(report.best.template_ids, (std::vector<std::string>{"im0", "im1", "im2", "im3"}));
    const std::vector<std::string> all{"im0", "im1", "im2", "im3"};
    EXPECT_EQ(report.best.score, representative_score(all, ds).score);
    EXPECT_EQ(report.all_scores_summary.std, 0.0);
}

TEST(SelectTemplates, SampledModeIsDeterministicAndBounded) {
    Rng rng(72);
    const Dataset ds = random_dataset(rng, 10, {8, 8, 2, 3});
    const SimilarityTable table = SimilarityTable::build(ds);
    const SelectionReport a = select_templates(table, 3, 50, 5, 1);
    const SelectionReport b = select_templates(table, 3, 50, 5, 4);
    EXPECT_EQ(a.search_mode, SearchMode::sampled);
    EXPECT_EQ(a.trials_evaluated, 50u);
    std::ostringstream ta, tb;
    write_selection_report(ta, a);
    write_selection_report(tb, b);
    EXPECT_EQ(ta.str(), tb.str());
    EXPECT_EQ(ta.str().rfind("scp-report v1\n", 0), 0u);
    EXPECT_NE(ta.str().find("search_mode\tsampled\n"), std::string::npos);
    ASSERT_EQ(a.top.size(), kReportTop);
    std::set<std::vector<std::string>> distinct;
    for (std::size_t i = 0; i < a.top.size(); ++i) {
        distinct.insert(a.top[i].template_ids);
        if (i) EXPECT_GE(a.top[i - 1].score, a.top[i].score);
    }
    EXPECT_EQ(distinct.size(), a.top.size());
    EXPECT_EQ(a.best.score, a.top.front().score);
    EXPECT_EQ(a.best.template_ids, a.top.front().template_ids);
}

TEST(SelectTemplates, BudgetCapsDistinctDraws) {
    // Only C(4,2) = 6 combinations exist, so asking for 5 sampled ones must
    // still terminate with distinct draws.
    Rng rng(73);
    const Dataset ds = random_dataset(rng, 4, {6, 6, 1, 3});
    const SelectionReport r = select_templates(ds, 2, 5, 1);
    EXPECT_EQ(r.search_mode, SearchMode::sampled);
    EXPECT_EQ(r.trials_evaluated, 5u);
}

TEST(SelectTemplates, Errors) {
    Rng rng(74);
    const Dataset ds = random_dataset(rng, 3, {6, 6, 1, 3});
    EXPECT_THROW(select_templates(ds, 4, 10, 0), CapacityError);
    EXPECT_THROW(select_templates(ds, 0, 10, 0), ArgumentError);
    EXPECT_THROW(select_templates(ds, 1, 0, 0), ArgumentError);
}

TEST(RandomBaseline, DegenerateCases) {
    Rng rng(80);
    const FeatureMap fm = random_map(rng, {6, 6, 2, 3}, "x", 0.0);
    Dataset same;
    for (int i = 0; i < 5; ++i) same.push_back(record(renamed(fm, "d" + std::to_string(i)), {{1, 2}, {4, 4}}));
    const BaselineSummary b = random_baseline(same, 2, 30, 1);
    EXPECT_NEAR(b.mean, 1.0, 1e-12);
    EXPECT_EQ(b.std, 0.0);

    const Dataset ds = random_dataset(rng, 4, {6, 6, 1, 3});
    EXPECT_EQ(random_baseline(ds, 4, 10, 2).std, 0.0);
    EXPECT_THROW(random_baseline(ds, 1, 1, 2), ArgumentError);
    EXPECT_THROW(random_baseline(ds, 5, 10, 2), CapacityError);
}

TEST(RandomBaseline, SelectionDominatesAverage) {
    Rng rng(81);
    const Dataset ds = random_dataset(rng, 8, {8, 8, 2, 3});
    const SimilarityTable table = SimilarityTable::build(ds);
    for (std::size_t m = 1; m <= 3; ++m) {
        const BaselineSummary b = random_baseline(table, m, 100, m);
        EXPECT_GE(select_templates(table, m, 10000, 0).best.score, b.mean);
        EXPECT_EQ(b.scores.size(), 100u);
    }
}

TEST(RandomBaseline, SpreadShrinksWithMoreTemplates) {
    SyntheticDatasetSpec spec;
    spec.n_images = 20;
    spec.seed = 12;
    Dataset ds;
    for (const auto& s : generate_synthetic_dataset(spec)) {
        ds.push_back({extract_features_builtin(s.image), detect_keypoints_dog(s.image), s.landmarks});
    }
    const SimilarityTable table = SimilarityTable::build(ds, 4);
    EXPECT_LT(random_baseline(table, 5, 200, 1).std, random_baseline(table, 1, 200, 1).std);
}

}  // namespace
