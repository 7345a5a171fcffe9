#include "scp/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "scp/errors.hpp"
#include "scp/parallel.hpp"
#include "scp/similarity.hpp"

namespace scp {

QueryProfile::QueryProfile(const FeatureMap& fm, PixelCoord p) {
    require_in_bounds(fm, p);
    vectors_.reserve(fm.layer_count());
    norms_.reserve(fm.layer_count());
    for (const FeatureLayer& layer : fm.layers()) {
        const int d = layer.downsample();
        vectors_.push_back(layer.at(p.y / d, p.x / d));
        norms_.push_back(layer.norm_at(p.y / d, p.x / d));
        widened_.emplace_back(vectors_.back().begin(), vectors_.back().end());
    }
}

MatchResult scan_best(const FeatureMap& searched, const QueryProfile& query,
                      std::vector<double>& scratch) {
    const std::size_t n_layers = searched.layer_count();

    // Cosine of the query against every cell of every layer, layers stored
    // back to back.
    std::vector<std::size_t> offsets(n_layers);
    std::size_t total = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        offsets[l] = total;
        total += static_cast<std::size_t>(searched.layer(l).rows()) * searched.layer(l).cols();
    }
    scratch.resize(total);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const FeatureLayer& layer = searched.layer(l);
        const double qn = query.norm(l);
        const auto ch = static_cast<std::size_t>(layer.channels());
        const float* grid = layer.grid().data();
        const std::span<const double> norms = layer.norms();
        double* out = scratch.data() + offsets[l];
        if (qn == 0.0) {
            std::fill(out, out + norms.size(), 0.0);
            continue;
        }
        const std::span<const double> q = query.widened(l);
        for (std::size_t c = 0; c < norms.size(); ++c) {
            out[c] = cosine_from_parts(dot_widened({grid + c * ch, ch}, q), norms[c], qn);
        }
    }

    // Layer downsample factors are powers of two, so floor division is a shift.
    std::vector<int> shifts(n_layers);
    std::vector<const double*> rows(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        shifts[l] = std::countr_zero(static_cast<unsigned>(searched.layer(l).downsample()));
    }
    const double denom = static_cast<double>(n_layers);
    MatchResult best{{0, 0}, 0, -std::numeric_limits<double>::infinity()};
    for (int y = 0; y < searched.height(); ++y) {
        for (std::size_t l = 0; l < n_layers; ++l) {
            rows[l] = scratch.data() + offsets[l] +
                      static_cast<std::size_t>(y >> shifts[l]) * searched.layer(l).cols();
        }
        for (int x = 0; x < searched.width(); ++x) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n_layers; ++l) acc += rows[l][x >> shifts[l]];
            const double s = acc / denom;
            if (s > best.similarity) best = {{x, y}, 0, s};
        }
    }
    return best;
}

MatchResult match_forward(const FeatureMap& tmpl, PixelCoord p_t, const FeatureMap& target) {
    require_same_structure(tmpl, target);
    std::vector<double> scratch;
    return scan_best(target, QueryProfile(tmpl, p_t), scratch);
}

MatchResult match_forward_multi(std::span<const FeatureRef> tmpls, std::span<const PixelCoord> pts,
                                const FeatureMap& target) {
    if (tmpls.empty()) throw ArgumentError("match_forward_multi needs at least one template");
    if (pts.size() != tmpls.size()) {
        throw ArgumentError("match_forward_multi needs one coordinate per template");
    }
    for (const FeatureMap& t : tmpls) require_same_structure(t, target);
    std::vector<double> scratch;
    MatchResult best{};
    for (std::size_t m = 0; m < tmpls.size(); ++m) {
        MatchResult r = scan_best(target, QueryProfile(tmpls[m], pts[m]), scratch);
        if (m == 0 || r.similarity > best.similarity) {
            best = r;
            best.template_index = m;
        }
    }
    return best;
}

namespace {

MatchResult reverse_with_scratch(const FeatureMap& target, PixelCoord q_k,
                                 std::span<const FeatureRef> tmpls, std::vector<double>& scratch) {
    const QueryProfile query(target, q_k);
    MatchResult best{};
    for (std::size_t m = 0; m < tmpls.size(); ++m) {
        MatchResult r = scan_best(tmpls[m], query, scratch);
        if (m == 0 || r.similarity > best.similarity) {
            best = r;
            best.template_index = m;
        }
    }
    return best;
}

void check_reverse_args(const FeatureMap& target, std::span<const FeatureRef> tmpls) {
    if (tmpls.empty()) throw ArgumentError("reverse matching needs at least one template");
    for (const FeatureMap& t : tmpls) require_same_structure(t, target);
}

}  // namespace

MatchResult match_reverse(const FeatureMap& target, PixelCoord q_k, std::span<const FeatureRef> tmpls) {
    check_reverse_args(target, tmpls);
    std::vector<double> scratch;
    return reverse_with_scratch(target, q_k, tmpls, scratch);
}

std::vector<MatchResult> match_reverse_batch(const FeatureMap& target, const KeyPointSet& kps,
                                             std::span<const FeatureRef> tmpls, unsigned jobs) {
    check_reverse_args(target, tmpls);
    for (const KeyPoint& kp : kps.points) require_in_bounds(target, kp.coord());
    std::vector<MatchResult> out(kps.size());
    parallel_for(kps.size(), jobs, [&](std::size_t i) {
        thread_local std::vector<double> scratch;
        out[i] = reverse_with_scratch(target, kps.points[i].coord(), tmpls, scratch);
    });
    return out;
}

MatchResult match_forward_cascade(const FeatureMap& tmpl, PixelCoord p_t, const FeatureMap& target) {
    require_same_structure(tmpl, target);
    const QueryProfile query(tmpl, p_t);
    const std::size_t n_layers = target.layer_count();

    // Each layer cosine is computed at most once per cell.
    std::vector<std::vector<double>> cosines(n_layers);
    std::vector<std::vector<char>> known(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t cells = static_cast<std::size_t>(target.layer(l).rows()) * target.layer(l).cols();
        cosines[l].resize(cells);
        known[l].assign(cells, 0);
    }
    auto cell_cosine = [&](std::size_t l, int row, int col) {
        const FeatureLayer& layer = target.layer(l);
        const std::size_t i = static_cast<std::size_t>(row) * layer.cols() + col;
        if (!known[l][i]) {
            cosines[l][i] = cosine_from_parts(dot_widened(layer.at(row, col), query.widened(l)),
                                              layer.norm_at(row, col), query.norm(l));
            known[l][i] = 1;
        }
        return cosines[l][i];
    };
    // Mean cosine over layers [from, L) at a full-resolution pixel.
    auto partial_score = [&](std::size_t from, int x, int y) {
        double acc = 0.0;
        for (std::size_t l = from; l < n_layers; ++l) {
            const int d = target.layer(l).downsample();
            acc += cell_cosine(l, y / d, x / d);
        }
        return acc / static_cast<double>(n_layers - from);
    };

    // Candidates are (score, y, x); higher score first, then row-major.
    struct Candidate {
        double score;
        int y;
        int x;
        bool operator<(const Candidate& o) const {
            if (score != o.score) return score > o.score;
            return y != o.y ? y < o.y : x < o.x;
        }
    };
    auto keep_best = [](std::vector<Candidate>& cands) {
        const std::size_t n = std::min(kCascadeBeam, cands.size());
        std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(n), cands.end());
        cands.resize(n);
    };

    const std::size_t coarse = n_layers - 1;
    const FeatureLayer& top = target.layer(coarse);
    std::vector<Candidate> beam;
    for (int r = 0; r < top.rows(); ++r) {
        for (int c = 0; c < top.cols(); ++c) {
            const int d = top.downsample();
            const int x = std::min(c * d + d / 2, target.width() - 1);
            const int y = std::min(r * d + d / 2, target.height() - 1);
            beam.push_back({partial_score(coarse, x, y), y, x});
        }
    }
    keep_best(beam);

    for (std::size_t l = coarse; l-- > 0;) {
        const FeatureLayer& layer = target.layer(l);
        const int d = layer.downsample();
        const int radius = 2 * d;
        std::vector<char> queued(static_cast<std::size_t>(layer.rows()) * layer.cols(), 0);
        std::vector<Candidate> next;
        for (const Candidate& b : beam) {
            const int r0 = std::max(0, (b.y - radius) / d), r1 = std::min(layer.rows() - 1, (b.y + radius) / d);
            const int c0 = std::max(0, (b.x - radius) / d), c1 = std::min(layer.cols() - 1, (b.x + radius) / d);
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    char& q = queued[static_cast<std::size_t>(r) * layer.cols() + c];
                    if (q) continue;
                    q = 1;
                    const int x = std::min(c * d + d / 2, target.width() - 1);
                    const int y = std::min(r * d + d / 2, target.height() - 1);
                    next.push_back({partial_score(l, x, y), y, x});
                }
            }
        }
        keep_best(next);
        beam = std::move(next);
    }
    const PixelCoord loc{beam.front().x, beam.front().y};
    return {loc, 0, point_similarity(tmpl, p_t, target, loc)};
}

}  // namespace scp
