#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "scp/descriptor.hpp"
#include "scp/keypoints.hpp"
#include "scp/matching.hpp"
#include "scp/random.hpp"
#include "scp/selection.hpp"
#include "scp/similarity.hpp"
#include "scp/synthetic.hpp"

namespace {

using namespace scp;

struct Fixture {
    std::vector<SyntheticSample> samples;
    std::vector<ImageRecord> records;
};

// Shared synthetic dataset, built once: 64x64 images, builtin features, DoG keypoints.
const Fixture& fixture(int n = 12) {
    static std::optional<Fixture> f;
    if (!f) {
        SyntheticDatasetSpec spec;
        spec.n_images = n;
        f.emplace();
        f->samples = generate_synthetic_dataset(spec);
        for (const auto& s : f->samples) {
            f->records.push_back({extract_features_builtin(s.image), detect_keypoints_dog(s.image, 100), s.landmarks});
        }
    }
    return *f;
}

void BM_Dot(benchmark::State& state) {
    Rng rng(1);
    std::vector<float> a(state.range(0)), b(state.range(0));
    for (auto& x : a) x = static_cast<float>(standard_normal(rng));
    for (auto& x : b) x = static_cast<float>(standard_normal(rng));
    for (auto _ : state) benchmark::DoNotOptimize(dot(a, b));
}
BENCHMARK(BM_Dot)->Arg(32)->Arg(128)->Arg(512);

void BM_CosineSimilarity(benchmark::State& state) {
    Rng rng(2);
    std::vector<float> a(state.range(0)), b(state.range(0));
    for (auto& x : a) x = static_cast<float>(standard_normal(rng));
    for (auto& x : b) x = static_cast<float>(standard_normal(rng));
    for (auto _ : state) benchmark::DoNotOptimize(cosine_similarity(a, b));
}
BENCHMARK(BM_CosineSimilarity)->Arg(32)->Arg(128);

void BM_PointSimilarity(benchmark::State& state) {
    const auto& r = fixture().records;
    for (auto _ : state) benchmark::DoNotOptimize(point_similarity(r[0].features, {20, 30}, r[1].features, {22, 31}));
}
BENCHMARK(BM_PointSimilarity);

void BM_DescriptorBuiltin(benchmark::State& state) {
    const auto& s = fixture().samples;
    for (auto _ : state) benchmark::DoNotOptimize(extract_features_builtin(s[0].image));
}
BENCHMARK(BM_DescriptorBuiltin)->Unit(benchmark::kMillisecond);

void BM_DetectDog(benchmark::State& state) {
    const auto& s = fixture().samples;
    for (auto _ : state) benchmark::DoNotOptimize(detect_keypoints_dog(s[0].image, 100));
}
BENCHMARK(BM_DetectDog)->Unit(benchmark::kMillisecond);

void BM_MatchForward(benchmark::State& state) {
    const auto& r = fixture().records;
    for (auto _ : state) benchmark::DoNotOptimize(match_forward(r[0].features, {32, 32}, r[1].features));
}
BENCHMARK(BM_MatchForward)->Unit(benchmark::kMicrosecond);

void BM_MatchForwardCascade(benchmark::State& state) {
    const auto& r = fixture().records;
    for (auto _ : state) benchmark::DoNotOptimize(match_forward_cascade(r[0].features, {32, 32}, r[1].features));
}
BENCHMARK(BM_MatchForwardCascade)->Unit(benchmark::kMicrosecond);

void BM_MatchReverseBatch(benchmark::State& state) {
    const auto& r = fixture().records;
    std::vector<FeatureRef> tmpls;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(state.range(0)); ++i) tmpls.push_back(r[i].features);
    for (auto _ : state) benchmark::DoNotOptimize(match_reverse_batch(r[0].features, r[0].keypoints, tmpls));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r[0].keypoints.size()));
}
BENCHMARK(BM_MatchReverseBatch)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SimilarityTableBuild(benchmark::State& state) {
    const auto& r = fixture().records;
    for (auto _ : state) benchmark::DoNotOptimize(SimilarityTable::build(r, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_SimilarityTableBuild)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SelectExhaustive(benchmark::State& state) {
    static const SimilarityTable table = SimilarityTable::build(fixture().records, 4);
    for (auto _ : state) benchmark::DoNotOptimize(select_templates(table, state.range(0), kDefaultBudget, 0));
}
BENCHMARK(BM_SelectExhaustive)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
