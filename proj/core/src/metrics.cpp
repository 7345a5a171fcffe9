#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "scp/errors.hpp"
#include "scp/eval.hpp"

namespace scp {

std::vector<double> radial_errors(const LandmarkSet& pred, const LandmarkSet& gt, double spacing_mm) {
    if (pred.size() != gt.size()) {
        throw SchemaError("prediction for '" + pred.image_id + "' has " +
                          std::to_string(pred.size()) + " landmarks, ground truth has " +
                          std::to_string(gt.size()));
    }
    std::vector<double> errors(pred.size());
    for (std::size_t l = 0; l < pred.size(); ++l) {
        errors[l] = spacing_mm * std::hypot(pred.points[l].x - gt.points[l].x,
                                            pred.points[l].y - gt.points[l].y);
    }
    return errors;
}

double mre(const LandmarkSet& pred, const LandmarkSet& gt, double spacing_mm) {
    const auto errors = radial_errors(pred, gt, spacing_mm);
    if (errors.empty()) throw SchemaError("cannot compute MRE of an empty landmark set");
    double acc = 0.0;
    for (double e : errors) acc += e;
    return acc / static_cast<double>(errors.size());
}

namespace {

void check_radii(std::span<const double> radii_mm) {
    if (radii_mm.empty()) throw ArgumentError("at least one SDR radius is required");
    for (std::size_t i = 0; i < radii_mm.size(); ++i) {
        if (!(radii_mm[i] > 0.0) || (i > 0 && !(radii_mm[i] > radii_mm[i - 1]))) {
            throw ArgumentError("SDR radii must be positive and strictly ascending");
        }
    }
}

void check_aligned(std::span<const LandmarkSet> preds, std::span<const LandmarkSet> gts) {
    if (preds.size() != gts.size() || preds.empty()) {
        throw SchemaError("predictions and ground truth must be non-empty and aligned");
    }
}

}  // namespace

std::map<double, double> sdr(std::span<const LandmarkSet> preds, std::span<const LandmarkSet> gts,
                             double spacing_mm, std::span<const double> radii_mm) {
    return evaluate_predictions(preds, gts, spacing_mm, radii_mm).sdr;
}

EvalReport evaluate_predictions(std::span<const LandmarkSet> preds, std::span<const LandmarkSet> gts,
                                double spacing_mm, std::span<const double> radii_mm) {
    check_aligned(preds, gts);
    check_radii(radii_mm);
    const std::size_t n_landmarks = gts.front().size();
    EvalReport report;
    report.images = preds.size();
    report.per_landmark_errors_mm.assign(n_landmarks, 0.0);
    std::vector<double> all;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (gts[i].size() != n_landmarks) {
            throw SchemaError("ground truth landmark counts differ across images");
        }
        const auto errors = radial_errors(preds[i], gts[i], spacing_mm);
        for (std::size_t l = 0; l < errors.size(); ++l) report.per_landmark_errors_mm[l] += errors[l];
        all.insert(all.end(), errors.begin(), errors.end());
    }
    if (all.empty()) throw SchemaError("no landmarks to evaluate");
    double acc = 0.0;
    for (double& e : report.per_landmark_errors_mm) {
        e /= static_cast<double>(preds.size());
        acc += e;
    }
    report.mre_mm = acc / static_cast<double>(n_landmarks);
    for (double r : radii_mm) {
        const auto hits = std::count_if(all.begin(), all.end(), [r](double e) { return e <= r; });
        report.sdr[r] = static_cast<double>(hits) / static_cast<double>(all.size());
    }
    return report;
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
    char buf[128];
    out << "metric\tvalue\n";
    std::snprintf(buf, sizeof(buf), "images\t%zu\n", report.images);
    out << buf;
    std::snprintf(buf, sizeof(buf), "mre_mm\t%.6f\n", report.mre_mm);
    out << buf;
    for (const auto& [radius, rate] : report.sdr) {
        std::snprintf(buf, sizeof(buf), "sdr_%gmm\t%.6f\n", radius, rate);
        out << buf;
    }
    out << "\nlandmark\terror_mm\n";
    for (std::size_t l = 0; l < report.per_landmark_errors_mm.size(); ++l) {
        std::snprintf(buf, sizeof(buf), "%zu\t%.6f\n", l, report.per_landmark_errors_mm[l]);
        out << buf;
    }
}

double pearson_cc(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ArgumentError("pearson_cc: series lengths differ");
    if (xs.size() < 3) throw ArgumentError("pearson_cc needs at least 3 samples");
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateVarianceError("pearson_cc: constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace scp
