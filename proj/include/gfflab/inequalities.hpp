#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfflab/check_report.hpp"
#include "gfflab/estimators.hpp"
#include "gfflab/events.hpp"
#include "gfflab/gaussian_field.hpp"
#include "gfflab/levelset.hpp"
#include "gfflab/replicas.hpp"

namespace gfflab {

// ---------------------------------------------------------------------------
// FKG: P(A and B) >= P(A) P(B) for increasing A, B.

inline CheckReport check_fkg(const GreenOperator& green, double h, const EventDescriptor& a,
                             const EventDescriptor& b, std::size_t M, std::uint64_t seed,
                             const ReplicaOptions& opts = {}) {
    if (!is_increasing(a) || !is_increasing(b))
        throw std::invalid_argument("check_fkg: both events must come from the increasing catalogue");
    if (M == 0) throw std::invalid_argument("check_fkg: M must be >= 1");
    const BoxLattice& box = green.box();
    validate(a, box);
    validate(b, box);
    using Counts = std::array<std::uint64_t, 3>;
    const Counts c = reduce_replicas(
        green, StreamKey(seed), M, Counts{},
        [&](Counts& acc, std::uint64_t, std::span<const double> grid) {
            const LevelSet ls = threshold(box, grid, h);
            const bool ea = evaluate(a, ls);
            const bool eb = evaluate(b, ls);
            acc[0] += ea;
            acc[1] += eb;
            acc[2] += ea && eb;
        },
        [](Counts& into, const Counts& from) {
            for (std::size_t k = 0; k < 3; ++k) into[k] += from[k];
        },
        opts);
    const double m = static_cast<double>(M);
    const double pa = double(c[0]) / m;
    const double pb = double(c[1]) / m;
    const double pab = double(c[2]) / m;

    CheckReport r;
    r.name = "fkg";
    r.lhs = pa * pb;
    r.rhs = pab;
    r.margin = r.rhs - r.lhs;
    // SE of the sample covariance via its influence function (I_A - pA)(I_B - pB).
    const double cell[4][3] = {{1, 1, pab}, {1, 0, pa - pab}, {0, 1, pb - pab}, {0, 0, 1.0 - pa - pb + pab}};
    double second = 0.0;
    for (const auto& q : cell) {
        const double psi = (q[0] - pa) * (q[1] - pb);
        second += q[2] * psi * psi;
    }
    r.se = std::sqrt(std::max(0.0, second - r.margin * r.margin) / m);
    r.verdict = verdict_for(r.margin, r.se);
    r.params = {{"h", h}, {"M", m}, {"p_a", pa}, {"p_b", pb}, {"p_ab", pab}, {"n", double(box.width())}};
    r.labels = {{"event_a", format_event(a)}, {"event_b", format_event(b)}};
    r.seed = seed;
    return r;
}

struct EventPair {
    EventDescriptor a;
    EventDescriptor b;
};

/// Increasing-event pairs used for FKG checks on a square box of side >= 6.
inline std::vector<EventPair> fkg_catalogue(const BoxLattice& box) {
    if (!box.square() || box.width() < 6) throw std::invalid_argument("fkg_catalogue: need a square box of side >= 6");
    const int n = box.width();
    const Rect inner{1, n - 2, 1, n - 2};
    const Rect r = standard_rect(box);
    const Vertex o = box.origin();
    return {
        {event::Crossing{Direction::horizontal, r}, event::Crossing{Direction::vertical, r}},
        {event::Connected{o, {n - 3, n - 3}}, event::Connected{{2, 2}, {n - 3, 2}}},
        {event::Sites{{o}}, event::Sites{{{o.x + 1, o.y}}}},
        {event::OriginBoundary{n - 1}, event::Crossing{Direction::horizontal, inner}},
        {event::DisjointCrossings{Direction::vertical, 2, inner}, event::Sites{{{2, 2}, {n - 3, n - 3}}}},
    };
}

// ---------------------------------------------------------------------------
// Easy-direction bound for the vertical crossing of the 2n x n rectangle.

/// exp(-(h1 - h2) (N/n) (1 - p)^{2N/n})
inline double lemma2_rhs(double p, double n, double N, double h1, double h2) {
    const double ratio = N / n;
    return std::exp(-(h1 - h2) * ratio * std::pow(1.0 - p, 2.0 * ratio));
}

/// Both sides with a given crossing probability p; margin = rhs - p.
inline CheckReport evaluate_lemma2(double p, double p_se, int n, int N, double h1, double h2) {
    if (h1 < h2) throw std::invalid_argument("check_lemma2_bound: need h1 >= h2");
    if (n < 1 || N < 1) throw std::invalid_argument("check_lemma2_bound: need n, N >= 1");
    CheckReport r;
    r.name = "lemma2";
    const double ratio = double(N) / double(n);
    r.lhs = p;
    r.rhs = lemma2_rhs(p, n, N, h1, h2);
    r.margin = r.rhs - r.lhs;
    // d rhs / dp
    const double slope = r.rhs * (h1 - h2) * ratio * 2.0 * ratio * std::pow(1.0 - p, 2.0 * ratio - 1.0);
    r.se = std::abs(slope - 1.0) * p_se;
    r.verdict = verdict_for(r.margin, r.se);
    r.params = {{"n", double(n)}, {"N", double(N)}, {"h1", h1}, {"h2", h2}, {"N_over_n", ratio},
                {"statement_regime", N >= n ? 1.0 : 0.0}, {"proof_regime", ratio < 0.5 ? 1.0 : 0.0}};
    if (N >= n) r.flags.push_back("regime:N>=n");
    if (ratio < 0.5) r.flags.push_back("regime:N/n<1/2");
    return r;
}

inline CheckReport check_lemma2_bound(int n, int N, double h1, double h2, std::size_t M, std::uint64_t seed,
                                      const ReplicaOptions& opts = {}) {
    if (h1 < h2) throw std::invalid_argument("check_lemma2_bound: need h1 >= h2");
    const ScaleGeometry geo = scale_geometry(n);
    const GreenOperator green = build_green(geo.box);
    const Estimate vc = estimate_event(green, h2, event::Crossing{Direction::vertical, geo.rect}, M, seed, opts);
    CheckReport r = evaluate_lemma2(vc.p_hat, vc.standard_error(), n, N, h1, h2);
    r.params["M"] = double(M);
    r.params["p_vc"] = vc.p_hat;
    r.labels["event"] = vc.event;
    r.seed = seed;
    return r;
}

// ---------------------------------------------------------------------------
// Coupling of crossings across heights:
//   P_h0[HC] (1 - P_h1[HC]) <= (max_u P_h1[u <-> boundary of Lambda_n + u])^{c (h1 - h0)}

struct Corollary2Inputs {
    double p_hc_h0;
    double p_hc_h1;
    double base;  // max over u of the translated boundary-connection probability
    std::size_t M;
};

inline CheckReport evaluate_corollary2(const Corollary2Inputs& in, double h0, double h1) {
    if (!(h0 < h1)) throw std::invalid_argument("check_corollary2: need h0 < h1");
    CheckReport r;
    r.name = "corollary2";
    const double lhs = in.p_hc_h0 * (1.0 - in.p_hc_h1);
    const double dh = h1 - h0;
    r.lhs = lhs;
    r.rhs = in.base;
    r.params = {{"h0", h0}, {"h1", h1}, {"p_hc_h0", in.p_hc_h0}, {"p_hc_h1", in.p_hc_h1},
                {"base", in.base}, {"M", double(in.M)}};
    if (!(h1 < 0.0)) r.flags.push_back("outside-hypothesis:h1>=0");
    if (lhs == 0.0) {
        r.flags.push_back("lhs-zero:holds-for-every-c");
        r.margin = 0.0;
        r.verdict = Verdict::holds;
        return r;
    }
    if (in.base >= 1.0) {
        r.flags.push_back("base-one:rhs-equals-1");
        r.margin = 1.0 - lhs;
        r.verdict = lhs <= 1.0 ? Verdict::holds : Verdict::violated;
        return r;
    }
    if (in.base <= 0.0) {
        r.flags.push_back("base-zero:degenerate");
        r.margin = -lhs;
        r.verdict = Verdict::violated;
        return r;
    }
    // tight constant: lhs = base^{c* dh}
    const double log_base = std::log(in.base);
    const double c_star = std::log(lhs) / (dh * log_base);
    r.margin = c_star;
    r.params["implied_c"] = c_star;
    // delta method, treating the three estimates as independent
    const double m = double(in.M);
    const double da = 1.0 / (in.p_hc_h0 * dh * log_base);
    const double db = -1.0 / ((1.0 - in.p_hc_h1) * dh * log_base);
    const double dbase = -std::log(lhs) / (dh * log_base * log_base * in.base);
    const double va = in.p_hc_h0 * (1.0 - in.p_hc_h0) / m;
    const double vb = in.p_hc_h1 * (1.0 - in.p_hc_h1) / m;
    const double vbase = in.base * (1.0 - in.base) / m;
    r.se = std::sqrt(da * da * va + db * db * vb + dbase * dbase * vbase);
    r.params["implied_c_ci_lo"] = c_star - kWilsonZ * r.se;
    r.params["implied_c_ci_hi"] = c_star + kWilsonZ * r.se;
    if (in.p_hc_h0 == 1.0 || in.p_hc_h1 == 1.0 || in.p_hc_h1 == 0.0) r.flags.push_back("degenerate-estimate");
    r.verdict = c_star > 0.0 ? Verdict::holds : verdict_for(c_star, r.se);
    return r;
}

inline CheckReport check_corollary2(int n, double h0, double h1, std::size_t M, std::uint64_t seed,
                                    const ReplicaOptions& opts = {}) {
    if (!(h0 < h1)) throw std::invalid_argument("check_corollary2: need h0 < h1");
    if (M == 0) throw std::invalid_argument("check_corollary2: M must be >= 1");
    if (n < 3) throw std::invalid_argument("check_corollary2: need n >= 3");
    const ScaleGeometry geo = scale_geometry(n);
    const BoxLattice& box = geo.box;
    const GreenOperator green = build_green(box);

    // candidate centres u whose translated Lambda_n fits in the box
    const int back = (n - 1) / 2;
    std::vector<Vertex> centres;
    for (Vertex u : box.interior())
        if (u.x - back >= 0 && u.y - back >= 0 && u.x - back + n - 1 < box.width() &&
            u.y - back + n - 1 < box.height())
            centres.push_back(u);

    struct Acc {
        std::uint64_t hc0 = 0;
        std::uint64_t hc1 = 0;
        std::vector<std::uint64_t> reach;
    };
    Acc init;
    init.reach.assign(centres.size(), 0);
    const Acc acc = reduce_replicas(
        green, StreamKey(seed), M, init,
        [&](Acc& a, std::uint64_t, std::span<const double> grid) {
            a.hc0 += crossing(threshold(box, grid, h0), geo.rect, Direction::horizontal);
            const LevelSet ls = threshold(box, grid, h1);
            a.hc1 += crossing(ls, geo.rect, Direction::horizontal);
            // extent of every open cluster, keyed by root label
            std::vector<Extent> ext(box.vertex_count(), Extent{box.width(), -1, box.height(), -1});
            for (int y = 0; y < box.height(); ++y)
                for (int x = 0; x < box.width(); ++x) {
                    const long l = ls.primal_label({x, y});
                    if (l < 0) continue;
                    Extent& e = ext[static_cast<std::size_t>(l)];
                    e.x_min = std::min(e.x_min, x);
                    e.x_max = std::max(e.x_max, x);
                    e.y_min = std::min(e.y_min, y);
                    e.y_max = std::max(e.y_max, y);
                }
            for (std::size_t k = 0; k < centres.size(); ++k) {
                const Vertex u = centres[k];
                const long l = ls.primal_label(u);
                if (l < 0) continue;
                const SubBox s{u.x - back, u.x - back + n - 1, u.y - back, u.y - back + n - 1};
                a.reach[k] += reaches_ring(s, ext[static_cast<std::size_t>(l)]);
            }
        },
        [](Acc& into, const Acc& from) {
            into.hc0 += from.hc0;
            into.hc1 += from.hc1;
            for (std::size_t k = 0; k < into.reach.size(); ++k) into.reach[k] += from.reach[k];
        },
        opts);

    const double m = static_cast<double>(M);
    std::uint64_t best = 0;
    Vertex argmax = box.origin();
    for (std::size_t k = 0; k < centres.size(); ++k)
        if (acc.reach[k] > best) {
            best = acc.reach[k];
            argmax = centres[k];
        }
    CheckReport r = evaluate_corollary2({double(acc.hc0) / m, double(acc.hc1) / m, double(best) / m, M}, h0, h1);
    r.params["n"] = double(n);
    r.params["argmax_u_x"] = argmax.x;
    r.params["argmax_u_y"] = argmax.y;
    r.params["centres"] = double(centres.size());
    r.seed = seed;
    return r;
}

// ---------------------------------------------------------------------------
// Exponential decay of closed *-connections.

struct DualDecayResult {
    CheckReport report;
    std::optional<DecayFit> fit;
    std::vector<Estimate> points;
};

inline DualDecayResult check_dual_decay(double h, int box_side, const std::vector<int>& distances, std::size_t M,
                                        std::uint64_t seed, const ReplicaOptions& opts = {}) {
    if (distances.empty()) throw std::invalid_argument("check_dual_decay: empty distance list");
    if (M == 0) throw std::invalid_argument("check_dual_decay: M must be >= 1");
    const BoxLattice box = build_box(box_side);
    const GreenOperator green = build_green(box);
    const Vertex o = box.origin();
    std::vector<Vertex> targets;
    for (int d : distances) {
        const Vertex t{o.x + d, o.y};
        detail::require_in_box(box, t);
        targets.push_back(t);
    }
    using Counts = std::vector<std::uint64_t>;
    const Counts counts = reduce_replicas(
        green, StreamKey(seed), M, Counts(targets.size(), 0),
        [&](Counts& acc, std::uint64_t, std::span<const double> grid) {
            const LevelSet ls = threshold(box, grid, h);
            for (std::size_t k = 0; k < targets.size(); ++k) acc[k] += dual_connected(ls, o, targets[k]);
        },
        [](Counts& into, const Counts& from) {
            for (std::size_t k = 0; k < into.size(); ++k) into[k] += from[k];
        },
        opts);

    DualDecayResult out;
    std::vector<DecayPoint> pts;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        out.points.push_back(make_estimate(format_event(event::DualConnected{o, targets[k]}), h, box_side,
                                           counts[k], M, seed));
        pts.push_back({double(distances[k]), out.points.back().p_hat});
    }
    CheckReport& r = out.report;
    r.name = "dual-decay";
    r.seed = seed;
    r.params = {{"h", h}, {"n", double(box_side)}, {"M", double(M)}};
    if (!(h < 0.0)) r.flags.push_back("outside-hypothesis:h>=0");
    std::size_t positive = 0;
    for (const auto& p : pts) positive += p.probability > 0.0;
    if (positive < 3) {
        r.flags.push_back("holds-vacuously:decay-too-fast-to-resolve");
        r.verdict = Verdict::holds;
        return out;
    }
    out.fit = fit_decay(pts);
    const DecayFit& fit = *out.fit;
    r.lhs = 0.0;
    r.rhs = fit.c;
    r.margin = fit.c;
    r.se = fit.c_se;
    r.params["c"] = fit.c;
    r.params["intercept"] = fit.intercept;
    r.params["r2"] = fit.r2;
    if (fit.degenerate) r.flags.push_back("degenerate-fit:c=0");
    if (fit.c > 0.0 && fit.r2 > 0.9)
        r.verdict = Verdict::holds;
    else if (fit.c >= -3.0 * fit.c_se)
        r.verdict = Verdict::violated_within_noise;
    else
        r.verdict = Verdict::violated;
    return out;
}

}  // namespace gfflab
