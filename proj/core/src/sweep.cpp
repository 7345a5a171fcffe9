#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include "scp/errors.hpp"
#include "scp/eval.hpp"
#include "scp/parallel.hpp"
#include "scp/similarity.hpp"

namespace scp {

namespace {

const LandmarkSet& require_landmarks(const ImageRecord& rec) {
    if (!rec.landmarks) throw DataError("image '" + rec.id() + "' has no landmarks");
    return *rec.landmarks;
}

}  // namespace

LandmarkSet detect_landmarks(std::span<const LabeledTemplate> tmpls, const FeatureMap& target) {
    if (tmpls.empty()) throw ArgumentError("detect_landmarks needs at least one template");
    const std::size_t n_landmarks = tmpls.front().landmarks.size();
    std::vector<FeatureRef> maps;
    for (const LabeledTemplate& t : tmpls) {
        if (t.landmarks.size() != n_landmarks) {
            throw SchemaError("templates disagree on the number of landmarks");
        }
        maps.emplace_back(t.features);
    }
    LandmarkSet out{target.source_image_id(), {}};
    out.points.reserve(n_landmarks);
    std::vector<PixelCoord> pts(tmpls.size());
    for (std::size_t l = 0; l < n_landmarks; ++l) {
        for (std::size_t m = 0; m < tmpls.size(); ++m) {
            pts[m] = to_pixel(tmpls[m].landmarks.points[l], tmpls[m].features.width(),
                              tmpls[m].features.height());
        }
        const MatchResult r = match_forward_multi(maps, pts, target);
        out.points.push_back({static_cast<double>(r.location.x), static_cast<double>(r.location.y)});
    }
    return out;
}

CombinationScore landmark_representative_score(std::span<const std::string> tmpl_ids,
                                               std::span<const ImageRecord> dataset, unsigned jobs) {
    if (tmpl_ids.empty()) throw ArgumentError("at least one template id is required");
    std::vector<FeatureRef> maps;
    std::vector<const LandmarkSet*> labels;
    std::set<std::string> seen;
    for (const std::string& id : tmpl_ids) {
        if (!seen.insert(id).second) throw ArgumentError("duplicate template id '" + id + "'");
        const ImageRecord& rec = dataset[find_record(dataset, id)];
        maps.emplace_back(rec.features);
        labels.push_back(&require_landmarks(rec));
    }
    for (const ImageRecord& rec : dataset) require_landmarks(rec);
    const std::size_t n_landmarks = labels.front()->size();
    for (const LandmarkSet* lm : labels) {
        if (lm->size() != n_landmarks) throw SchemaError("templates disagree on the number of landmarks");
    }
    if (n_landmarks == 0) throw SchemaError("templates carry no landmarks");

    std::vector<double> per_image(dataset.size());
    parallel_for(dataset.size(), jobs, [&](std::size_t n) {
        std::vector<PixelCoord> pts(maps.size());
        double acc_l = 0.0;
        for (std::size_t l = 0; l < n_landmarks; ++l) {
            for (std::size_t m = 0; m < maps.size(); ++m) {
                const FeatureMap& fm = maps[m];
                pts[m] = to_pixel(labels[m]->points[l], fm.width(), fm.height());
            }
            acc_l += match_forward_multi(maps, pts, dataset[n].features).similarity;
        }
        per_image[n] = acc_l / static_cast<double>(n_landmarks);
    });

    CombinationScore out;
    out.template_ids.assign(tmpl_ids.begin(), tmpl_ids.end());
    std::sort(out.template_ids.begin(), out.template_ids.end());
    double acc = 0.0;
    for (std::size_t n = 0; n < dataset.size(); ++n) {
        out.per_image_means.emplace_back(dataset[n].id(), per_image[n]);
        acc += per_image[n];
    }
    out.score = acc / static_cast<double>(dataset.size());
    return out;
}

std::vector<SweepRow> oracle_template_sweep(std::span<const ImageRecord> dataset, unsigned jobs,
                                            const SimilarityTable* table) {
    if (dataset.empty()) throw ArgumentError("dataset is empty");
    for (const ImageRecord& rec : dataset) require_landmarks(rec);
    SimilarityTable owned;
    if (!table) {
        owned = SimilarityTable::build(dataset, jobs);
        table = &owned;
    }
    if (table->image_count() != dataset.size()) {
        throw ArgumentError("similarity table does not match the dataset");
    }
    const std::size_t n_images = dataset.size();
    std::vector<SweepRow> rows(n_images);
    parallel_for(n_images, jobs, [&](std::size_t t) {
        const ImageRecord& tmpl = dataset[t];
        const LandmarkSet& tmpl_lm = *tmpl.landmarks;
        const std::size_t n_landmarks = tmpl_lm.size();
        if (n_landmarks == 0) throw SchemaError("image '" + tmpl.id() + "' carries no landmarks");
        std::vector<double> scratch;
        std::vector<QueryProfile> queries;
        for (const LandmarkPoint& p : tmpl_lm.points) {
            queries.emplace_back(tmpl.features,
                                 to_pixel(p, tmpl.features.width(), tmpl.features.height()));
        }

        SweepRow row;
        row.template_id = tmpl.id();
        const std::size_t subset[1] = {t};
        row.r_keypoint = table->score(subset);

        double acc_sim = 0.0, acc_mre = 0.0;
        for (std::size_t n = 0; n < n_images; ++n) {
            const ImageRecord& target = dataset[n];
            require_same_structure(tmpl.features, target.features);
            if (target.landmarks->size() != n_landmarks) {
                throw SchemaError("landmark counts differ across the dataset");
            }
            LandmarkSet pred{target.id(), {}};
            double acc_l = 0.0;
            for (std::size_t l = 0; l < n_landmarks; ++l) {
                const MatchResult r = scan_best(target.features, queries[l], scratch);
                acc_l += r.similarity;
                pred.points.push_back({static_cast<double>(r.location.x),
                                       static_cast<double>(r.location.y)});
            }
            acc_sim += acc_l / static_cast<double>(n_landmarks);
            if (n != t) acc_mre += mre(pred, *target.landmarks, target.features.spacing_mm());
        }
        row.r_landmark = acc_sim / static_cast<double>(n_images);
        row.mean_mre_mm = n_images > 1 ? acc_mre / static_cast<double>(n_images - 1) : 0.0;
        rows[t] = std::move(row);
    });
    return rows;
}

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows) {
    out << "template_id\tr_keypoint\tr_landmark\tmean_mre_mm\n";
    char buf[160];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "\t%.9f\t%.9f\t%.6f\n", r.r_keypoint, r.r_landmark,
                      r.mean_mre_mm);
        out << r.template_id << buf;
    }
}

}  // namespace scp
