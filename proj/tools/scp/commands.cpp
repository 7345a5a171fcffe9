#include "scp/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "scp/dataset.hpp"
#include "scp/errors.hpp"
#include "scp/eval.hpp"
#include "scp/feature_io.hpp"
#include "scp/image.hpp"
#include "scp/manifest.hpp"
#include "scp/parallel.hpp"
#include "scp/random.hpp"
#include "scp/selection.hpp"

namespace scp::cli {

unsigned resolve_jobs(std::optional<unsigned> flag) {
    if (flag) return std::max(1u, *flag);
    if (const char* env = std::getenv("SCP_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

namespace {

// Maps library errors onto exit codes and reports them.
template <typename Fn>
int guarded(Streams io, Fn&& fn) {
    try {
        return fn();
    } catch (const ArgumentError& e) {
        io.err << "scp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        io.err << "scp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        io.err << "scp: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        io.err << "scp: " << e.what() << '\n';
        return kExitIo;
    }
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void report_failures(Streams io, const std::vector<std::string>& failures) {
    for (const std::string& f : failures) io.err << "scp: " << f << '\n';
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Loads features, keypoints and (when requested) landmarks for every entry.
// Returns the ids lacking a required artifact through `gaps`.
Dataset load_dataset(const DatasetManifest& m, bool need_keypoints, bool need_landmarks,
                     std::vector<std::string>& gaps) {
    for (const ManifestEntry& e : m.entries) {
        std::string missing;
        if (!e.features) missing += " features";
        if (need_keypoints && !e.keypoints) missing += " keypoints";
        if (need_landmarks && !e.landmarks) missing += " landmarks";
        if (!missing.empty()) gaps.push_back(e.id + ": missing" + missing);
    }
    if (!gaps.empty()) return {};
    Dataset ds;
    ds.reserve(m.entries.size());
    for (const ManifestEntry& e : m.entries) {
        FeatureMap fm = read_feature_file(m.resolve(*e.features));
        if (fm.source_image_id() != e.id) {
            throw DataError("feature file for '" + e.id + "' belongs to '" + fm.source_image_id() + "'");
        }
        KeyPointSet kps{e.id, Detector::dog_sift, {}};
        if (e.keypoints) kps = read_keypoints_file(m.resolve(*e.keypoints));
        std::optional<LandmarkSet> lm;
        if (e.landmarks) lm = read_landmarks_file(m.resolve(*e.landmarks));
        ds.push_back({std::move(fm), std::move(kps), std::move(lm)});
    }
    return ds;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

}  // namespace

int cmd_extract(const CommonOptions& common, const DescriptorConfig& config, const fs::path& out_dir,
                Streams io) {
    return guarded(io, [&] {
        config.validate();
        DatasetManifest m = DatasetManifest::load(common.manifest);
        ensure_directory(out_dir);
        std::vector<std::string> errors(m.entries.size());
        std::vector<std::optional<fs::path>> written(m.entries.size());
        parallel_for(m.entries.size(), common.jobs, [&](std::size_t i) {
            const ManifestEntry& e = m.entries[i];
            try {
                const Image img = read_pgm(m.resolve(e.image), e.id, m.spacing_mm);
                const fs::path dst = out_dir / (e.id + ".scpf");
                write_feature_file(extract_features_builtin(img, config), dst);
                written[i] = dst;
            } catch (const Error& ex) {
                errors[i] = e.id + " (" + m.resolve(e.image).string() + "): " + ex.what();
            }
        });
        std::vector<std::string> failures;
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            if (written[i]) m.entries[i].features = m.relativize(*written[i]);
            if (!errors[i].empty()) failures.push_back(errors[i]);
        }
        m.save(common.manifest);
        report_failures(io, failures);
        io.out << "extracted " << (m.entries.size() - failures.size()) << " of " << m.entries.size()
               << " feature maps\n";
        return failures.empty() ? kExitOk : kExitIo;
    });
}

int cmd_keypoints(const CommonOptions& common, const KeypointOptions& opts, Streams io) {
    return guarded(io, [&] {
        if (opts.k < 1) throw ArgumentError("--keypoints must be at least 1");
        DatasetManifest m = DatasetManifest::load(common.manifest);
        ensure_directory(opts.out_dir);
        std::vector<std::string> errors(m.entries.size());
        std::vector<std::optional<fs::path>> written(m.entries.size());
        parallel_for(m.entries.size(), common.jobs, [&](std::size_t i) {
            const ManifestEntry& e = m.entries[i];
            try {
                const Image img = read_pgm(m.resolve(e.image), e.id, m.spacing_mm);
                KeyPointSet kps;
                switch (opts.detector) {
                    case Detector::dog_sift: kps = detect_keypoints_dog(img, opts.k, opts.min_dist); break;
                    case Detector::grid: kps = detect_keypoints_grid(img, opts.k); break;
                    case Detector::random:
                        kps = detect_keypoints_random(img, opts.k, mix_seed(common.seed, i));
                        break;
                }
                const fs::path dst = opts.out_dir / (e.id + ".kp");
                write_keypoints_file(kps, dst);
                written[i] = dst;
            } catch (const Error& ex) {
                errors[i] = e.id + " (" + m.resolve(e.image).string() + "): " + ex.what();
            }
        });
        std::vector<std::string> failures;
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            if (written[i]) m.entries[i].keypoints = m.relativize(*written[i]);
            if (!errors[i].empty()) failures.push_back(errors[i]);
        }
        m.save(common.manifest);
        report_failures(io, failures);
        io.out << "detector=" << detector_name(opts.detector) << " k=" << opts.k
               << " min_dist=" << opts.min_dist << " images=" << (m.entries.size() - failures.size())
               << '\n';
        return failures.empty() ? kExitOk : kExitIo;
    });
}

int cmd_select(const CommonOptions& common, const SelectOptions& opts, Streams io) {
    return guarded(io, [&] {
        if (opts.budget < 1 || opts.budget > kMaxBudget) {
            throw ArgumentError("--budget must be in [1, " + std::to_string(kMaxBudget) + "]");
        }
        const DatasetManifest m = DatasetManifest::load(common.manifest);
        std::vector<std::string> gaps;
        const Dataset ds = load_dataset(m, true, false, gaps);
        if (!gaps.empty()) {
            report_failures(io, gaps);
            return static_cast<int>(kExitMissing);
        }
        const SelectionReport report = select_templates(ds, opts.m, opts.budget, common.seed, common.jobs);
        std::ofstream out(opts.report, std::ios::trunc);
        if (!out) throw IoError("cannot write report " + opts.report.string());
        write_selection_report(out, report);
        if (!out) throw IoError("failed writing report " + opts.report.string());
        for (const std::string& id : report.best.template_ids) io.out << id << '\n';
        return static_cast<int>(kExitOk);
    });
}

int cmd_evaluate(const CommonOptions& common, const EvaluateOptions& opts, Streams io) {
    return guarded(io, [&] {
        if (opts.templates.empty()) throw ArgumentError("--templates needs at least one id");
        for (std::size_t i = 0; i < opts.radii_mm.size(); ++i) {
            if (!(opts.radii_mm[i] > 0.0) || (i && !(opts.radii_mm[i] > opts.radii_mm[i - 1]))) {
                throw ArgumentError("--radii must be positive and strictly ascending");
            }
        }
        const DatasetManifest m = DatasetManifest::load(common.manifest);
        std::vector<std::string> gaps;
        const Dataset ds = load_dataset(m, false, true, gaps);
        if (!gaps.empty()) {
            report_failures(io, gaps);
            return static_cast<int>(kExitMissing);
        }
        std::set<std::string> chosen;
        std::vector<LabeledTemplate> tmpls;
        for (const std::string& id : opts.templates) {
            if (!chosen.insert(id).second) throw ArgumentError("duplicate template id '" + id + "'");
            const ImageRecord& rec = ds[find_record(ds, id)];
            tmpls.push_back({rec.features, *rec.landmarks});
        }
        std::vector<std::size_t> targets;
        for (std::size_t n = 0; n < ds.size(); ++n) {
            if (!chosen.count(ds[n].id())) targets.push_back(n);
        }
        if (targets.empty()) throw ArgumentError("every image is a template; nothing to evaluate");
        std::vector<LandmarkSet> preds(targets.size()), gts(targets.size());
        parallel_for(targets.size(), common.jobs, [&](std::size_t i) {
            preds[i] = detect_landmarks(tmpls, ds[targets[i]].features);
            gts[i] = *ds[targets[i]].landmarks;
        });
        const EvalReport report = evaluate_predictions(preds, gts, m.spacing_mm, opts.radii_mm);
        std::ofstream out(opts.report, std::ios::trunc);
        if (!out) throw IoError("cannot write report " + opts.report.string());
        write_eval_report(out, report);
        if (!out) throw IoError("failed writing report " + opts.report.string());
        io.out << "mre_mm\t" << fmt("%.6f", report.mre_mm) << '\n';
        return static_cast<int>(kExitOk);
    });
}

namespace {

void write_bench_dataset(const fs::path& dir, const std::vector<SyntheticSample>& samples,
                         double spacing_mm) {
    ensure_directory(dir / "images");
    ensure_directory(dir / "landmarks");
    DatasetManifest m;
    m.root = dir;
    m.spacing_mm = spacing_mm;
    for (const SyntheticSample& s : samples) {
        const fs::path img = fs::path("images") / (s.image.id() + ".pgm");
        const fs::path lm = fs::path("landmarks") / (s.image.id() + ".lm");
        write_pgm(s.image, dir / img);
        write_landmarks_file(s.landmarks, dir / lm);
        m.entries.push_back({s.image.id(), img, std::nullopt, std::nullopt, lm});
    }
    m.save(dir / "manifest.txt");
}

// Mean MRE of a template subset over every non-template image.
double subset_mre(const Dataset& ds, const std::vector<std::size_t>& subset) {
    std::vector<LabeledTemplate> tmpls;
    std::set<std::size_t> members(subset.begin(), subset.end());
    for (std::size_t t : subset) tmpls.push_back({ds[t].features, *ds[t].landmarks});
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < ds.size(); ++n) {
        if (members.count(n)) continue;
        acc += mre(detect_landmarks(tmpls, ds[n].features), *ds[n].landmarks,
                   ds[n].features.spacing_mm());
        ++count;
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

std::string cc_or_na(std::span<const double> xs, std::span<const double> ys) {
    try {
        return fmt("%.6f", pearson_cc(xs, ys));
    } catch (const DegenerateVarianceError&) {
        return "n/a";
    }
}

}  // namespace

int cmd_bench(const CommonOptions& common, const BenchOptions& opts, Streams io) {
    return guarded(io, [&] {
        SyntheticDatasetSpec spec = opts.spec;
        spec.seed = common.seed;
        spec.validate();
        if (opts.random_trials < 2) throw ArgumentError("--random-trials must be at least 2");
        if (opts.m < 1 || opts.m > static_cast<std::size_t>(spec.n_images)) {
            throw ArgumentError("--m must be in [1, n]");
        }
        const auto samples = generate_synthetic_dataset(spec);
        if (opts.write_dataset) write_bench_dataset(*opts.write_dataset, samples, spec.spacing_mm);

        Dataset ds(samples.size(), ImageRecord{
            FeatureMap("", "builtin", 1, 1, 1.0, {FeatureLayer(1, 1, 1, 1, {0.0f})}), {}, {}});
        parallel_for(samples.size(), common.jobs, [&](std::size_t i) {
            ds[i] = ImageRecord{extract_features_builtin(samples[i].image, opts.descriptor),
                                detect_keypoints_dog(samples[i].image, opts.k, opts.min_dist),
                                samples[i].landmarks};
        });

        const SimilarityTable table = SimilarityTable::build(ds, common.jobs);
        const auto rows = oracle_template_sweep(ds, common.jobs, &table);
        const SelectionReport sel = select_templates(table, opts.m, opts.budget, common.seed, common.jobs);

        std::vector<std::size_t> chosen;
        for (const std::string& id : sel.best.template_ids) chosen.push_back(find_record(ds, id));
        std::sort(chosen.begin(), chosen.end());
        const double selected_mre = subset_mre(ds, chosen);

        // Random subsets of the same size, evaluated by ground truth.
        Rng rng(mix_seed(common.seed, 1));
        std::vector<std::vector<std::size_t>> draws(opts.random_trials);
        for (auto& d : draws) {
            std::vector<std::size_t> pool(ds.size());
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t i = 0; i < opts.m; ++i) {
                std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
            }
            d.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(opts.m));
            std::sort(d.begin(), d.end());
        }
        std::vector<double> random_mre(draws.size());
        parallel_for(draws.size(), common.jobs, [&](std::size_t i) {
            random_mre[i] = opts.m == 1 ? rows[draws[i].front()].mean_mre_mm : subset_mre(ds, draws[i]);
        });
        const ScoreSummary random_summary = summarize(random_mre);

        std::vector<double> rk, rl, mm;
        for (const SweepRow& r : rows) {
            rk.push_back(r.r_keypoint);
            rl.push_back(r.r_landmark);
            mm.push_back(r.mean_mre_mm);
        }
        const ScoreSummary candidate_summary = summarize(mm);

        std::ostringstream text;
        text << "scp-bench v1\n";
        text << "seed\t" << common.seed << '\n';
        text << "n_images\t" << spec.n_images << '\n';
        text << "image_size\t" << spec.image_size << '\n';
        text << "n_landmarks\t" << spec.n_landmarks << '\n';
        text << "spacing_mm\t" << fmt("%g", spec.spacing_mm) << '\n';
        text << "geometry_jitter_px\t" << fmt("%g", spec.geometry_jitter_px) << '\n';
        text << "intensity_noise\t" << fmt("%g", spec.intensity_noise) << '\n';
        text << "keypoints\t" << opts.k << '\n';
        text << "m\t" << opts.m << '\n';
        text << "budget\t" << opts.budget << '\n';
        text << "search_mode\t" << search_mode_name(sel.search_mode) << '\n';
        text << "cc_keypoint_vs_mre\t" << cc_or_na(rk, mm) << '\n';
        text << "cc_keypoint_vs_landmark\t" << cc_or_na(rk, rl) << '\n';
        text << "selected\t" << join(sel.best.template_ids, ',') << '\n';
        text << "selected_score\t" << fmt("%.9f", sel.best.score) << '\n';
        text << "selected_mre_mm\t" << fmt("%.6f", selected_mre) << '\n';
        text << "random_mre_mean_mm\t" << fmt("%.6f", random_summary.mean) << '\n';
        text << "random_mre_std_mm\t" << fmt("%.6f", random_summary.std) << '\n';
        text << "candidate_mre_mean_mm\t" << fmt("%.6f", candidate_summary.mean) << '\n';
        text << "candidate_mre_best_mm\t" << fmt("%.6f", candidate_summary.min) << '\n';
        text << "candidate_mre_worst_mm\t" << fmt("%.6f", candidate_summary.max) << '\n';
        text << "\n";
        write_sweep_table(text, rows);

        if (opts.out) {
            std::ofstream out(*opts.out, std::ios::trunc);
            if (!out) throw IoError("cannot write " + opts.out->string());
            out << text.str();
        } else {
            io.out << text.str();
        }
        return static_cast<int>(kExitOk);
    });
}

namespace {

std::vector<double> parse_radii(const std::string& csv) {
    std::vector<double> out;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError("invalid radius '" + item + "' in --radii");
        }
    }
    return out;
}

}  // namespace

int run(int argc, char** argv, Streams io) {
    CLI::App app{"Template selection for few-shot landmark detection", "scp"};
    app.require_subcommand(1);

    CommonOptions common;
    std::optional<unsigned> jobs_flag;
    std::string manifest;
    auto add_common = [&](CLI::App* sub, bool needs_manifest) {
        if (needs_manifest) sub->add_option("--manifest", manifest, "Dataset manifest")->required();
        sub->add_option("--seed", common.seed, "Random seed");
        sub->add_option("--jobs", jobs_flag, "Worker threads (fallback: SCP_JOBS)")
            ->check(CLI::PositiveNumber);
    };

    DescriptorConfig descriptor;
    std::string extract_out = "features";
    auto* extract = app.add_subcommand("extract", "Compute built-in feature maps for every image");
    add_common(extract, true);
    extract->add_option("--out", extract_out, "Output directory for SCPF files");
    extract->add_option("--layers", descriptor.layers, "Descriptor layers");
    extract->add_option("--channels", descriptor.channels, "Channels per layer");
    extract->add_option("--sigma", descriptor.base_sigma, "Base Gaussian scale in pixels");

    KeypointOptions kp_opts;
    std::string detector = "dog_sift";
    std::string kp_out = "keypoints";
    auto* keypoints = app.add_subcommand("keypoints", "Detect key points for every image");
    add_common(keypoints, true);
    keypoints->add_option("--detector", detector, "dog_sift, grid or random")
        ->check(CLI::IsMember({"dog_sift", "grid", "random"}));
    keypoints->add_option("--keypoints,-k", kp_opts.k, "Key points per image")->check(CLI::PositiveNumber);
    keypoints->add_option("--min-dist", kp_opts.min_dist, "Suppression radius in pixels")
        ->check(CLI::NonNegativeNumber);
    keypoints->add_option("--out", kp_out, "Output directory for key point files");

    SelectOptions sel_opts;
    std::string report = "selection.txt";
    auto* select = app.add_subcommand("select", "Choose the most representative templates");
    add_common(select, true);
    select->add_option("--m", sel_opts.m, "Number of templates")->check(CLI::PositiveNumber);
    select->add_option("--budget", sel_opts.budget, "Combinations to evaluate")
        ->check(CLI::Range(std::size_t{1}, kMaxBudget));
    select->add_option("--report", report, "Report path");

    EvaluateOptions eval_opts;
    std::string templates, radii = "2,2.5,3,4", eval_report = "evaluation.tsv";
    auto* evaluate = app.add_subcommand("evaluate", "Detect landmarks from templates and score them");
    add_common(evaluate, true);
    evaluate->add_option("--templates", templates, "Comma-separated template ids")->required();
    evaluate->add_option("--radii", radii, "Comma-separated SDR radii in mm");
    evaluate->add_option("--report", eval_report, "Report path");

    BenchOptions bench_opts;
    std::string bench_out, bench_dataset;
    auto* bench = app.add_subcommand("bench", "Synthetic end-to-end template sweep");
    add_common(bench, false);
    auto& spec = bench_opts.spec;
    bench->add_option("--n", spec.n_images, "Images")->check(CLI::PositiveNumber);
    bench->add_option("--size", spec.image_size, "Image side in pixels");
    bench->add_option("--landmarks", spec.n_landmarks, "Landmarks per image")->check(CLI::PositiveNumber);
    bench->add_option("--spacing", spec.spacing_mm, "Pixel spacing in mm");
    bench->add_option("--jitter", spec.geometry_jitter_px, "Anchor jitter in pixels");
    bench->add_option("--noise", spec.intensity_noise, "Additive noise standard deviation");
    bench->add_option("--outlier-fraction", spec.outlier_fraction, "Fraction of high-jitter images");
    bench->add_option("--keypoints,-k", bench_opts.k, "Key points per image")->check(CLI::PositiveNumber);
    bench->add_option("--min-dist", bench_opts.min_dist, "Suppression radius in pixels");
    bench->add_option("--m", bench_opts.m, "Number of templates")->check(CLI::PositiveNumber);
    bench->add_option("--budget", bench_opts.budget, "Combinations to evaluate")
        ->check(CLI::Range(std::size_t{1}, kMaxBudget));
    bench->add_option("--random-trials", bench_opts.random_trials, "Random subsets for the baseline");
    bench->add_option("--out", bench_out, "Write the tables to this file instead of stdout");
    bench->add_option("--write-dataset", bench_dataset, "Also write the synthetic dataset here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        io.out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        io.out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        io.err << "scp: " << e.what() << '\n';
        return kExitUsage;
    }

    common.manifest = manifest;
    common.jobs = resolve_jobs(jobs_flag);

    if (extract->parsed()) return cmd_extract(common, descriptor, extract_out, io);
    if (keypoints->parsed()) {
        kp_opts.detector = parse_detector(detector);
        kp_opts.out_dir = kp_out;
        return cmd_keypoints(common, kp_opts, io);
    }
    if (select->parsed()) {
        sel_opts.report = report;
        return cmd_select(common, sel_opts, io);
    }
    if (evaluate->parsed()) {
        std::stringstream in(templates);
        std::string id;
        while (std::getline(in, id, ',')) {
            if (!id.empty()) eval_opts.templates.push_back(id);
        }
        eval_opts.report = eval_report;
        return guarded(io, [&] {
            eval_opts.radii_mm = parse_radii(radii);
            return cmd_evaluate(common, eval_opts, io);
        });
    }
    if (bench->parsed()) {
        if (!bench_out.empty()) bench_opts.out = bench_out;
        if (!bench_dataset.empty()) bench_opts.write_dataset = bench_dataset;
        return cmd_bench(common, bench_opts, io);
    }
    return kExitUsage;
}

}  // namespace scp::cli
