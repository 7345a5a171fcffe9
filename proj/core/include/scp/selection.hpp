#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scp/dataset.hpp"

namespace scp {

/// Representative score R of one template subset.
struct CombinationScore {
    std::vector<std::string> template_ids;  // sorted
    double score = 0.0;
    /// (image id, mean keypoint similarity) in dataset order.
    std::vector<std::pair<std::string, double>> per_image_means;
};

/// For every image n, keypoint k and candidate template t: the best
/// reverse-match similarity of keypoint k of image n against template t
/// alone. The best similarity against a subset is the max over its members,
/// so any subset can be scored from the table without rescanning.
class SimilarityTable {
public:
    /// Throws DataError if an image has no keypoints and ConfigurationError
    /// if layer structures differ.
    static SimilarityTable build(std::span<const ImageRecord> dataset, unsigned jobs = 1);

    std::size_t image_count() const { return ids_.size(); }
    std::size_t keypoint_count(std::size_t n) const { return offsets_[n + 1] - offsets_[n]; }
    const std::vector<std::string>& ids() const { return ids_; }

    double best(std::size_t n, std::size_t k, std::size_t t) const {
        return values_[(offsets_[n] + k) * ids_.size() + t];
    }

    /// R of the subset given as candidate indices. Fills per-image means if
    /// `per_image` is non-null.
    double score(std::span<const std::size_t> subset, std::vector<double>* per_image = nullptr) const;

    CombinationScore combination(std::span<const std::size_t> subset) const;

private:
    std::vector<std::string> ids_;
    std::vector<std::size_t> offsets_;  // keypoint row offset per image, size N+1
    std::vector<double> values_;        // [row][template]
};

/// Mean over images of the mean over keypoints of the reverse-match
/// similarity against the templates. Template images are included in the
/// average. Throws LookupError for an unknown id, DataError for an image
/// without keypoints.
CombinationScore representative_score(std::span<const std::string> tmpl_ids,
                                      std::span<const ImageRecord> dataset, unsigned jobs = 1);

enum class SearchMode { exhaustive, sampled };

struct ScoreSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single value
    double min = 0.0;
    double max = 0.0;
};

struct RankedCombination {
    std::vector<std::string> template_ids;
    double score = 0.0;
};

struct SelectionReport {
    CombinationScore best;
    std::size_t trials_evaluated = 0;
    SearchMode search_mode = SearchMode::exhaustive;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    ScoreSummary all_scores_summary;
    std::vector<RankedCombination> top;  // best first, at most kReportTop
};

inline constexpr std::size_t kDefaultBudget = 10000;
inline constexpr std::size_t kMaxBudget = 100000;
inline constexpr std::size_t kReportTop = 20;
/// Redraw cap for sampled search, as a multiple of the budget.
inline constexpr std::size_t kRedrawFactor = 50;

/// C(n, k), saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// Subset search. Enumerates every m-combination when C(N, m) <= budget,
/// otherwise scores `budget` distinct uniformly drawn combinations. Ties go
/// to the lexicographically smallest sorted id list.
/// Throws CapacityError if m > N, ArgumentError if m or budget is 0.
SelectionReport select_templates(const SimilarityTable& table, std::size_t m, std::size_t budget,
                                 std::uint64_t seed, unsigned jobs = 1);
SelectionReport select_templates(std::span<const ImageRecord> dataset, std::size_t m,
                                 std::size_t budget, std::uint64_t seed, unsigned jobs = 1);

struct BaselineSummary {
    double mean = 0.0;
    double std = 0.0;
    std::vector<double> scores;
};

/// Scores of `trials` independently drawn random m-subsets.
/// Throws ArgumentError if trials < 2.
BaselineSummary random_baseline(const SimilarityTable& table, std::size_t m, std::size_t trials,
                                std::uint64_t seed);
BaselineSummary random_baseline(std::span<const ImageRecord> dataset, std::size_t m,
                                std::size_t trials, std::uint64_t seed, unsigned jobs = 1);

/// Mean and sample standard deviation via Welford's update. Identical
/// inputs give a standard deviation of exactly 0.
ScoreSummary summarize(std::span<const double> values);

std::string_view search_mode_name(SearchMode mode);

/// "scp-report v1": tab-separated key/value header, per-image means, then the
/// top combinations table.
void write_selection_report(std::ostream& out, const SelectionReport& report);

}  // namespace scp
