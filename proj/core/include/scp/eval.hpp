#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scp/dataset.hpp"
#include "scp/landmarks.hpp"
#include "scp/matching.hpp"
#include "scp/selection.hpp"

namespace scp {

/// A labeled template: its feature map and landmark positions.
struct LabeledTemplate {
    const FeatureMap& features;
    const LandmarkSet& landmarks;
};

/// Predicts every landmark of `target` by joint forward matching against all
/// templates, using each template's landmark rounded to the nearest pixel.
/// Throws SchemaError if templates disagree on the landmark count.
LandmarkSet detect_landmarks(std::span<const LabeledTemplate> tmpls, const FeatureMap& target);

/// Mean over landmarks of spacing_mm * |pred_l - gt_l|.
/// Throws SchemaError on a landmark-count mismatch.
double mre(const LandmarkSet& pred, const LandmarkSet& gt, double spacing_mm);

/// Per-landmark radial errors in millimeters.
std::vector<double> radial_errors(const LandmarkSet& pred, const LandmarkSet& gt, double spacing_mm);

inline const std::vector<double> kDefaultRadiiMm{2.0, 2.5, 3.0, 4.0};

/// Fraction of (image, landmark) pairs with error <= r, for each radius.
/// Throws SchemaError on misaligned inputs, ArgumentError on bad radii.
std::map<double, double> sdr(std::span<const LandmarkSet> preds, std::span<const LandmarkSet> gts,
                             double spacing_mm, std::span<const double> radii_mm);

struct EvalReport {
    double mre_mm = 0.0;
    std::map<double, double> sdr;
    /// Mean error of each landmark index over all evaluated images.
    std::vector<double> per_landmark_errors_mm;
    std::size_t images = 0;
};

EvalReport evaluate_predictions(std::span<const LandmarkSet> preds, std::span<const LandmarkSet> gts,
                                double spacing_mm, std::span<const double> radii_mm);

/// Tab-separated report: a metric/value table followed by per-landmark errors.
void write_eval_report(std::ostream& out, const EvalReport& report);

/// Pearson correlation coefficient. Throws ArgumentError on mismatched or
/// too-short input and DegenerateVarianceError if either series is constant.
double pearson_cc(std::span<const double> xs, std::span<const double> ys);

/// Label-aware representative score: mean over images of the mean over
/// landmarks of the best forward-match similarity from the templates.
/// Throws DataError if any involved image lacks landmarks.
CombinationScore landmark_representative_score(std::span<const std::string> tmpl_ids,
                                               std::span<const ImageRecord> dataset,
                                               unsigned jobs = 1);

/// One row per single-template candidate.
struct SweepRow {
    std::string template_id;
    double r_keypoint = 0.0;  // label-free score, keypoints
    double r_landmark = 0.0;  // label-aware score, landmarks
    double mean_mre_mm = 0.0; // mean MRE over every other image
};

/// Evaluates every image as a single template. Rows follow dataset order.
/// If `table` is given it must have been built from the same dataset.
std::vector<SweepRow> oracle_template_sweep(std::span<const ImageRecord> dataset, unsigned jobs = 1,
                                            const SimilarityTable* table = nullptr);

/// Tab-separated: template_id, r_keypoint, r_landmark, mean_mre_mm.
void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace scp
