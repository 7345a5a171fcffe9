#include "scp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "scp/errors.hpp"
#include "scp/matching.hpp"
#include "scp/parallel.hpp"
#include "scp/random.hpp"
#include "scp/similarity.hpp"

namespace scp {

namespace {

void check_dataset(std::span<const ImageRecord> dataset) {
    if (dataset.empty()) throw ArgumentError("dataset is empty");
    for (const ImageRecord& rec : dataset) {
        require_same_structure(dataset.front().features, rec.features);
        if (rec.keypoints.empty()) {
            throw DataError("image '" + rec.id() + "' has no keypoints");
        }
        for (const KeyPoint& kp : rec.keypoints.points) require_in_bounds(rec.features, kp.coord());
    }
}

std::vector<std::string> sorted_ids(const std::vector<std::string>& ids,
                                    std::span<const std::size_t> subset) {
    std::vector<std::string> out;
    out.reserve(subset.size());
    for (std::size_t t : subset) out.push_back(ids[t]);
    std::sort(out.begin(), out.end());
    return out;
}

// Uniform m-subset of [0, n) as sorted indices.
std::vector<std::size_t> draw_subset(Rng& rng, std::size_t n, std::size_t m) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// All m-combinations of [0, n) in lexicographic order.
std::vector<std::vector<std::size_t>> enumerate_combinations(std::size_t n, std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> c(m);
    std::iota(c.begin(), c.end(), std::size_t{0});
    for (;;) {
        out.push_back(c);
        std::size_t i = m;
        while (i > 0 && c[i - 1] == n - m + (i - 1)) --i;
        if (i == 0) break;
        ++c[i - 1];
        for (std::size_t j = i; j < m; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

void check_subset_size(std::size_t n, std::size_t m) {
    if (m == 0) throw ArgumentError("template count must be at least 1");
    if (m > n) {
        throw CapacityError("cannot choose " + std::to_string(m) + " templates from " +
                            std::to_string(n) + " images");
    }
}

}  // namespace

SimilarityTable SimilarityTable::build(std::span<const ImageRecord> dataset, unsigned jobs) {
    check_dataset(dataset);
    SimilarityTable table;
    const std::size_t n_images = dataset.size();
    table.ids_.reserve(n_images);
    table.offsets_.assign(n_images + 1, 0);
    for (std::size_t n = 0; n < n_images; ++n) {
        table.ids_.push_back(dataset[n].id());
        table.offsets_[n + 1] = table.offsets_[n] + dataset[n].keypoints.size();
    }
    table.values_.assign(table.offsets_.back() * n_images, 0.0);

    parallel_for(n_images * n_images, jobs, [&](std::size_t pair) {
        const std::size_t n = pair / n_images;
        const std::size_t t = pair % n_images;
        thread_local std::vector<double> scratch;
        const ImageRecord& image = dataset[n];
        for (std::size_t k = 0; k < image.keypoints.size(); ++k) {
            const QueryProfile query(image.features, image.keypoints.points[k].coord());
            table.values_[(table.offsets_[n] + k) * n_images + t] =
                scan_best(dataset[t].features, query, scratch).similarity;
        }
    });
    return table;
}

double SimilarityTable::score(std::span<const std::size_t> subset, std::vector<double>* per_image) const {
    const std::size_t n_images = ids_.size();
    if (per_image) per_image->assign(n_images, 0.0);
    double acc = 0.0;
    for (std::size_t n = 0; n < n_images; ++n) {
        const std::size_t k_count = keypoint_count(n);
        double acc_k = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            const double* row = values_.data() + (offsets_[n] + k) * n_images;
            double best_value = -std::numeric_limits<double>::infinity();
            for (std::size_t t : subset) best_value = std::max(best_value, row[t]);
            acc_k += best_value;
        }
        const double mean_k = acc_k / static_cast<double>(k_count);
        if (per_image) (*per_image)[n] = mean_k;
        acc += mean_k;
    }
    return acc / static_cast<double>(n_images);
}

CombinationScore SimilarityTable::combination(std::span<const std::size_t> subset) const {
    std::vector<double> per_image;
    CombinationScore out;
    out.score = score(subset, &per_image);
    out.template_ids = sorted_ids(ids_, subset);
    for (std::size_t n = 0; n < ids_.size(); ++n) out.per_image_means.emplace_back(ids_[n], per_image[n]);
    return out;
}

CombinationScore representative_score(std::span<const std::string> tmpl_ids,
                                      std::span<const ImageRecord> dataset, unsigned jobs) {
    if (tmpl_ids.empty()) throw ArgumentError("at least one template id is required");
    std::vector<FeatureRef> tmpls;
    std::set<std::string> seen;
    for (const std::string& id : tmpl_ids) {
        if (!seen.insert(id).second) throw ArgumentError("duplicate template id '" + id + "'");
        tmpls.emplace_back(dataset[find_record(dataset, id)].features);
    }
    check_dataset(dataset);

    CombinationScore out;
    out.template_ids.assign(tmpl_ids.begin(), tmpl_ids.end());
    std::sort(out.template_ids.begin(), out.template_ids.end());
    double acc = 0.0;
    for (const ImageRecord& rec : dataset) {
        const auto matches = match_reverse_batch(rec.features, rec.keypoints, tmpls, jobs);
        double acc_k = 0.0;
        for (const MatchResult& r : matches) acc_k += r.similarity;
        const double mean_k = acc_k / static_cast<double>(matches.size());
        out.per_image_means.emplace_back(rec.id(), mean_k);
        acc += mean_k;
    }
    out.score = acc / static_cast<double>(dataset.size());
    return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (std::size_t i = 0; i < k; ++i) {
        result = result * (n - i) / (i + 1);
        if (result > std::numeric_limits<std::size_t>::max()) {
            return std::numeric_limits<std::size_t>::max();
        }
    }
    return static_cast<std::size_t>(result);
}

ScoreSummary summarize(std::span<const double> values) {
    ScoreSummary s;
    if (values.empty()) return s;
    double mean = 0.0, m2 = 0.0;
    s.min = s.max = values.front();
    std::size_t count = 0;
    for (double v : values) {
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = mean;
    s.std = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0;
    return s;
}

SelectionReport select_templates(const SimilarityTable& table, std::size_t m, std::size_t budget,
                                 std::uint64_t seed, unsigned jobs) {
    const std::size_t n = table.image_count();
    check_subset_size(n, m);
    if (budget == 0) throw ArgumentError("search budget must be at least 1");

    SelectionReport report;
    report.seed = seed;
    report.m = m;
    std::vector<std::vector<std::size_t>> combos;
    if (binomial(n, m) <= budget) {
        report.search_mode = SearchMode::exhaustive;
        combos = enumerate_combinations(n, m);
    } else {
        report.search_mode = SearchMode::sampled;
        Rng rng(seed);
        std::set<std::vector<std::size_t>> seen;
        const std::size_t max_draws = kRedrawFactor * budget;
        for (std::size_t draws = 0; combos.size() < budget && draws < max_draws; ++draws) {
            auto c = draw_subset(rng, n, m);
            if (seen.insert(c).second) combos.push_back(std::move(c));
        }
    }

    std::vector<double> scores(combos.size());
    parallel_for(combos.size(), jobs, [&](std::size_t i) { scores[i] = table.score(combos[i]); });

    std::vector<std::vector<std::string>> names(combos.size());
    for (std::size_t i = 0; i < combos.size(); ++i) names[i] = sorted_ids(table.ids(), combos[i]);

    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return names[a] < names[b];
    };
    std::vector<std::size_t> order(combos.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t top = std::min(kReportTop, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(), better);

    report.trials_evaluated = combos.size();
    report.best = table.combination(combos[order.front()]);
    for (std::size_t i = 0; i < top; ++i) report.top.push_back({names[order[i]], scores[order[i]]});
    report.all_scores_summary = summarize(scores);
    return report;
}

SelectionReport select_templates(std::span<const ImageRecord> dataset, std::size_t m,
                                 std::size_t budget, std::uint64_t seed, unsigned jobs) {
    check_subset_size(dataset.size(), m);
    return select_templates(SimilarityTable::build(dataset, jobs), m, budget, seed, jobs);
}

BaselineSummary random_baseline(const SimilarityTable& table, std::size_t m, std::size_t trials,
                                std::uint64_t seed) {
    check_subset_size(table.image_count(), m);
    if (trials < 2) throw ArgumentError("random baseline needs at least 2 trials");
    Rng rng(seed);
    BaselineSummary out;
    out.scores.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        out.scores.push_back(table.score(draw_subset(rng, table.image_count(), m)));
    }
    const ScoreSummary s = summarize(out.scores);
    out.mean = s.mean;
    out.std = s.std;
    return out;
}

BaselineSummary random_baseline(std::span<const ImageRecord> dataset, std::size_t m,
                                std::size_t trials, std::uint64_t seed, unsigned jobs) {
    check_subset_size(dataset.size(), m);
    if (trials < 2) throw ArgumentError("random baseline needs at least 2 trials");
    return random_baseline(SimilarityTable::build(dataset, jobs), m, trials, seed);
}

std::string_view search_mode_name(SearchMode mode) {
    return mode == SearchMode::exhaustive ? "exhaustive" : "sampled";
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12f", v);
    return buf;
}

}  // namespace

void write_selection_report(std::ostream& out, const SelectionReport& r) {
    out << "scp-report v1\n";
    out << "search_mode\t" << search_mode_name(r.search_mode) << '\n';
    out << "m\t" << r.m << '\n';
    out << "seed\t" << r.seed << '\n';
    out << "trials_evaluated\t" << r.trials_evaluated << '\n';
    out << "best_templates\t" << join(r.best.template_ids, ',') << '\n';
    out << "best_score\t" << fixed(r.best.score) << '\n';
    out << "score_mean\t" << fixed(r.all_scores_summary.mean) << '\n';
    out << "score_std\t" << fixed(r.all_scores_summary.std) << '\n';
    out << "score_min\t" << fixed(r.all_scores_summary.min) << '\n';
    out << "score_max\t" << fixed(r.all_scores_summary.max) << '\n';
    out << "per_image_means\t" << r.best.per_image_means.size() << '\n';
    for (const auto& [id, mean] : r.best.per_image_means) out << id << '\t' << fixed(mean) << '\n';
    out << "top\t" << r.top.size() << '\n';
    out << "rank\tscore\ttemplates\n";
    for (std::size_t i = 0; i < r.top.size(); ++i) {
        out << (i + 1) << '\t' << fixed(r.top[i].score) << '\t' << join(r.top[i].template_ids, ',')
            << '\n';
    }
}

}  // namespace scp
