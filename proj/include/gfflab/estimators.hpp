#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfflab/events.hpp"
#include "gfflab/gaussian_field.hpp"
#include "gfflab/levelset.hpp"
#include "gfflab/replicas.hpp"
#include "gfflab/rng.hpp"

namespace gfflab {

inline constexpr double kWilsonZ = 1.96;

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for k successes out of m trials.
inline Interval wilson_interval(std::uint64_t k, std::uint64_t m, double z = kWilsonZ) {
    if (m == 0) throw std::invalid_argument("wilson_interval: no trials");
    const double n = static_cast<double>(m);
    const double p = static_cast<double>(k) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

struct Estimate {
    std::string event;
    double h = 0.0;
    int n = 0;  // box side (width for rectangular boxes)
    std::uint64_t M = 0;
    std::uint64_t successes = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> flags;

    double standard_error() const { return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(M)); }
};

inline Estimate make_estimate(std::string event, double h, int n, std::uint64_t k, std::uint64_t m,
                              std::uint64_t seed) {
    Estimate e;
    e.event = std::move(event);
    e.h = h;
    e.n = n;
    e.M = m;
    e.successes = k;
    e.p_hat = static_cast<double>(k) / static_cast<double>(m);
    const Interval ci = wilson_interval(k, m);
    e.ci_lo = ci.lo;
    e.ci_hi = ci.hi;
    e.seed = seed;
    return e;
}

namespace detail {
inline void require_replicas(std::size_t m) {
    if (m == 0) throw std::invalid_argument("replica count M must be >= 1");
}
}  // namespace detail

/// P_h[event] over M replicas of the field; one estimate per height in
/// `heights`, all evaluated on the same replicas.
inline std::vector<Estimate> estimate_event_scan(const GreenOperator& green, std::span<const double> heights,
                                                 const EventDescriptor& event, std::size_t M, std::uint64_t seed,
                                                 const ReplicaOptions& opts = {}) {
    detail::require_replicas(M);
    const BoxLattice& box = green.box();
    validate(event, box);
    using Counts = std::vector<std::uint64_t>;
    const Counts counts = reduce_replicas(
        green, StreamKey(seed), M, Counts(heights.size(), 0),
        [&](Counts& acc, std::uint64_t, std::span<const double> grid) {
            for (std::size_t k = 0; k < heights.size(); ++k)
                if (evaluate(event, threshold(box, grid, heights[k]))) ++acc[k];
        },
        [](Counts& into, const Counts& from) {
            for (std::size_t k = 0; k < into.size(); ++k) into[k] += from[k];
        },
        opts);
    std::vector<Estimate> out;
    const std::string name = format_event(event);
    for (std::size_t k = 0; k < heights.size(); ++k) {
        out.push_back(make_estimate(name, heights[k], box.width(), counts[k], M, seed));
        if (degenerate_geometry(event, box)) out.back().flags.push_back("degenerate-rectangle");
    }
    return out;
}

inline Estimate estimate_event(const GreenOperator& green, double h, const EventDescriptor& event, std::size_t M,
                               std::uint64_t seed, const ReplicaOptions& opts = {}) {
    const double hs[1] = {h};
    return estimate_event_scan(green, hs, event, M, seed, opts).front();
}

inline Estimate estimate_event(const BoxLattice& box, double h, const EventDescriptor& event, std::size_t M,
                               std::uint64_t seed, const ReplicaOptions& opts = {}) {
    validate(event, box);
    return estimate_event(build_green(box), h, event, M, seed, opts);
}

// ---------------------------------------------------------------------------
// Origin-to-boundary connection curves and decay fits.

struct CurvePoint {
    int n;
    Estimate estimate;
};

struct BoundaryCurve {
    double h = 0.0;
    int host_side = 0;
    std::vector<CurvePoint> points;
};

/// P_h[origin <-> ring inside the frame of Lambda_n] for every n, all in one
/// host box. The events are nested, so on shared replicas the estimates are
/// non-increasing in n.
inline BoundaryCurve boundary_connection_curve(const GreenOperator& host, double h, std::vector<int> n_list,
                                               std::size_t M, std::uint64_t seed, const ReplicaOptions& opts = {}) {
    detail::require_replicas(M);
    if (n_list.empty()) throw std::invalid_argument("boundary_connection_curve: empty n list");
    std::sort(n_list.begin(), n_list.end());
    const BoxLattice& box = host.box();
    std::vector<SubBox> rings;
    for (int n : n_list) {
        if (n < 3) throw std::invalid_argument("boundary_connection_curve: every n must be >= 3");
        rings.push_back(centred_subbox(box, n));
    }
    using Counts = std::vector<std::uint64_t>;
    const Counts counts = reduce_replicas(
        host, StreamKey(seed), M, Counts(n_list.size(), 0),
        [&](Counts& acc, std::uint64_t, std::span<const double> grid) {
            const LevelSet ls = threshold(box, grid, h);
            const auto ext = cluster_extent(ls, box.origin());
            if (!ext) return;
            for (std::size_t k = 0; k < rings.size(); ++k)
                if (reaches_ring(rings[k], *ext)) ++acc[k];
        },
        [](Counts& into, const Counts& from) {
            for (std::size_t k = 0; k < into.size(); ++k) into[k] += from[k];
        },
        opts);
    BoundaryCurve curve{h, box.width(), {}};
    for (std::size_t k = 0; k < n_list.size(); ++k)
        curve.points.push_back(
            {n_list[k], make_estimate("origin-boundary:" + std::to_string(n_list[k]), h, box.width(), counts[k], M, seed)});
    return curve;
}

inline BoundaryCurve boundary_connection_curve(double h, const std::vector<int>& n_list, std::size_t M,
                                               std::uint64_t seed, const ReplicaOptions& opts = {}) {
    if (n_list.empty()) throw std::invalid_argument("boundary_connection_curve: empty n list");
    const int host = *std::max_element(n_list.begin(), n_list.end());
    return boundary_connection_curve(build_green(build_box(host)), h, n_list, M, seed, opts);
}

struct DecayPoint {
    double distance;
    double probability;
};

/// -log p = c * distance + intercept, least squares over points with p > 0.
struct DecayFit {
    double c = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double c_se = 0.0;  // standard error of the slope from the residuals
    std::size_t points_used = 0;
    bool degenerate = false;  // no spread in -log p: r2 undefined, reported as 0
};

inline DecayFit fit_decay(std::span<const DecayPoint> points) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const DecayPoint& p : points)
        if (p.probability > 0.0) {
            xs.push_back(p.distance);
            ys.push_back(-std::log(p.probability));
        }
    if (xs.size() < 3) throw std::invalid_argument("fit_decay: fewer than 3 points with positive probability");
    const double m = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_decay: all points share one distance");
    DecayFit fit;
    fit.points_used = xs.size();
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    if (*ymax - *ymin <= 1e-14 * std::max(1.0, std::abs(*ymax))) {
        fit.degenerate = true;
        fit.c = 0.0;
        fit.intercept = my;
        fit.r2 = 0.0;
        return fit;
    }
    fit.c = sxy / sxx;
    fit.intercept = my - fit.c * mx;
    fit.r2 = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    const double ss_res = std::max(0.0, syy - fit.c * sxy);
    fit.c_se = xs.size() > 2 ? std::sqrt(ss_res / (m - 2.0) / sxx) : 0.0;
    return fit;
}

inline DecayFit fit_decay(const BoundaryCurve& curve) {
    std::vector<DecayPoint> pts;
    for (const CurvePoint& p : curve.points) pts.push_back({static_cast<double>(p.n), p.estimate.p_hat});
    return fit_decay(pts);
}

// ---------------------------------------------------------------------------
// Critical-height proxies.

enum class CriticalCriterion {
    crossing_half,  // P_h[HC(n, 2n)] >= 1/2
    decay_rate,     // fitted origin-to-boundary decay rate c <= epsilon
};

inline const char* to_string(CriticalCriterion c) {
    return c == CriticalCriterion::crossing_half ? "crossing-half" : "decay-rate";
}

enum class BracketSide { inside, below, above };

inline const char* to_string(BracketSide s) {
    switch (s) {
        case BracketSide::below: return "below";
        case BracketSide::above: return "above";
        default: return "inside";
    }
}

struct CriticalOptions {
    double bracket_lo = -8.0;
    double bracket_hi = 8.0;
    double epsilon = 0.0;           // decay threshold; 0 selects 1/n
    std::vector<int> ring_sides;    // decay curve sides; empty selects n/2, 3n/4, n, 3n/2, 2n
};

/// Bisection result. The criterion holds at h_lo and fails at h_hi; with a
/// one-sided result the critical height lies outside the initial bracket.
struct CriticalEstimate {
    CriticalCriterion criterion{};
    int n = 0;
    std::size_t M = 0;
    double tol = 0.0;
    double epsilon = 0.0;
    double h_lo = 0.0;
    double h_hi = 0.0;
    int halvings = 0;
    BracketSide side = BracketSide::inside;
    std::uint64_t seed = 0;

    double width() const { return h_hi - h_lo; }
    double midpoint() const { return 0.5 * (h_lo + h_hi); }
};

/// Per-replica critical heights at scale n: the largest h at which
/// HC(n, 2n) occurs, and the largest h at which the origin reaches each ring.
/// Any criterion at any h is then a count over replicas, identical to
/// thresholding the same fields.
class CriticalSurface {
public:
    CriticalSurface(int n, std::size_t M, std::uint64_t seed, std::vector<int> ring_sides,
                    const ReplicaOptions& opts = {})
        : n_(n), m_(M), seed_(seed), sides_(std::move(ring_sides)) {
        detail::require_replicas(M);
        const ScaleGeometry geo = scale_geometry(n);
        const GreenOperator green = build_green(geo.box);
        init(green, geo.rect, opts);
    }

    CriticalSurface(const GreenOperator& green, const Rect& rect, std::size_t M, std::uint64_t seed,
                    std::vector<int> ring_sides, const ReplicaOptions& opts = {})
        : n_(rect.height()), m_(M), seed_(seed), sides_(std::move(ring_sides)) {
        detail::require_replicas(M);
        init(green, rect, opts);
    }

    int n() const { return n_; }
    std::size_t replicas() const { return m_; }
    const std::vector<int>& ring_sides() const { return sides_; }

    double crossing_probability(double h) const { return fraction(crossing_, h); }
    double ring_probability(std::size_t ring, double h) const { return fraction(rings_[ring], h); }

    std::optional<DecayFit> decay_fit(double h) const {
        std::vector<DecayPoint> pts;
        for (std::size_t k = 0; k < sides_.size(); ++k) pts.push_back({double(sides_[k]), ring_probability(k, h)});
        try {
            return fit_decay(pts);
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }

    bool holds(CriticalCriterion c, double h, double epsilon) const {
        if (c == CriticalCriterion::crossing_half) return crossing_probability(h) >= 0.5;
        const auto fit = decay_fit(h);
        return fit && fit->c <= epsilon;
    }

private:
    void init(const GreenOperator& green, const Rect& rect, const ReplicaOptions& opts) {
        const BoxLattice& box = green.box();
        std::vector<std::vector<Vertex>> ring_sets;
        for (int side : sides_) ring_sets.push_back(ring_vertices(centred_subbox(box, side)));
        const std::size_t rings = sides_.size();
        const auto per_replica = map_replicas<std::vector<double>>(
            green, StreamKey(seed_), m_,
            [&](std::uint64_t, std::span<const double> grid) {
                std::vector<double> out(1 + rings);
                out[0] = crossing_threshold(box, grid, rect, Direction::horizontal);
                const std::vector<double> best = bottleneck_from(box, grid, box.origin());
                for (std::size_t k = 0; k < rings; ++k) {
                    double top = -std::numeric_limits<double>::infinity();
                    for (Vertex v : ring_sets[k]) top = std::max(top, best[box.index(v)]);
                    out[1 + k] = top;
                }
                return out;
            },
            opts);
        crossing_.reserve(m_);
        rings_.assign(rings, {});
        for (const auto& r : per_replica) {
            crossing_.push_back(r[0]);
            for (std::size_t k = 0; k < rings; ++k) rings_[k].push_back(r[1 + k]);
        }
        std::sort(crossing_.begin(), crossing_.end());
        for (auto& r : rings_) std::sort(r.begin(), r.end());
    }

    /// Fraction of sorted thresholds t with t >= h.
    double fraction(const std::vector<double>& sorted, double h) const {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), h);
        return static_cast<double>(sorted.end() - it) / static_cast<double>(m_);
    }

    int n_;
    std::size_t m_;
    std::uint64_t seed_;
    std::vector<int> sides_;
    std::vector<double> crossing_;
    std::vector<std::vector<double>> rings_;
};

/// n/2, 3n/4, n, 3n/2, 2n, dropping sides below 3 and repeats.
inline std::vector<int> default_ring_sides(int n) {
    std::vector<int> out;
    for (int s : {n / 2, 3 * n / 4, n, 3 * n / 2, 2 * n})
        if (s >= 3 && (out.empty() || out.back() != s)) out.push_back(s);
    return out;
}

inline CriticalEstimate bisect_critical(const CriticalSurface& surface, CriticalCriterion criterion, double tol,
                                        std::uint64_t seed, const CriticalOptions& opts = {}) {
    if (!(tol > 0.0)) throw std::invalid_argument("estimate_critical_height: tol must be > 0");
    CriticalEstimate est;
    est.criterion = criterion;
    est.n = surface.n();
    est.M = surface.replicas();
    est.tol = tol;
    est.seed = seed;
    est.epsilon = opts.epsilon > 0.0 ? opts.epsilon : 1.0 / surface.n();
    double lo = opts.bracket_lo;
    double hi = opts.bracket_hi;
    if (!surface.holds(criterion, lo, est.epsilon)) {
        est.side = BracketSide::below;
        est.h_lo = -std::numeric_limits<double>::infinity();
        est.h_hi = lo;
        return est;
    }
    if (surface.holds(criterion, hi, est.epsilon)) {
        est.side = BracketSide::above;
        est.h_lo = hi;
        est.h_hi = std::numeric_limits<double>::infinity();
        return est;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (surface.holds(criterion, mid, est.epsilon))
            lo = mid;
        else
            hi = mid;
        ++est.halvings;
    }
    est.h_lo = lo;
    est.h_hi = hi;
    return est;
}

inline CriticalEstimate estimate_critical_height(CriticalCriterion criterion, int n, std::size_t M, double tol,
                                                 std::uint64_t seed, const CriticalOptions& opts = {},
                                                 const ReplicaOptions& ropts = {}) {
    const CriticalSurface surface(n, M, seed, opts.ring_sides.empty() ? default_ring_sides(n) : opts.ring_sides,
                                  ropts);
    return bisect_critical(surface, criterion, tol, seed, opts);
}

/// Largest gap between the two brackets; <= 0 when they intersect.
inline double bracket_gap(const CriticalEstimate& a, const CriticalEstimate& b) {
    return std::max(a.h_lo, b.h_lo) - std::min(a.h_hi, b.h_hi);
}

inline bool brackets_agree(const CriticalEstimate& a, const CriticalEstimate& b) {
    return bracket_gap(a, b) <= a.tol + b.tol;
}

// ---------------------------------------------------------------------------
// Influence and the differential inequality.

struct InfluenceEstimate {
    Vertex x;
    std::string event;
    double h = 0.0;
    std::uint64_t n_above = 0;  // replicas with phi_x >= h
    std::uint64_t n_below = 0;
    std::uint64_t hits_above = 0;  // ... of which the event holds
    std::uint64_t hits_below = 0;
    double i_hat = 0.0;
    double se = 0.0;
    bool undefined = false;  // some branch received no replicas
};

namespace detail {
inline InfluenceEstimate finish_influence(InfluenceEstimate r) {
    if (r.n_above == 0 || r.n_below == 0) {
        r.undefined = true;
        r.i_hat = std::numeric_limits<double>::quiet_NaN();
        r.se = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const double pa = double(r.hits_above) / double(r.n_above);
    const double pb = double(r.hits_below) / double(r.n_below);
    r.i_hat = pa - pb;
    r.se = std::sqrt(pa * (1.0 - pa) / double(r.n_above) + pb * (1.0 - pb) / double(r.n_below));
    return r;
}
}  // namespace detail

/// I = P(A | phi_x >= h) - P(A | phi_x < h), by splitting unconditional
/// replicas on the value at x.
inline InfluenceEstimate estimate_influence(const GreenOperator& green, double h, const EventDescriptor& event,
                                            Vertex x, std::size_t M, std::uint64_t seed,
                                            const ReplicaOptions& opts = {}) {
    detail::require_replicas(M);
    const BoxLattice& box = green.box();
    validate(event, box);
    detail::require_in_box(box, x);
    using Counts = std::array<std::uint64_t, 4>;
    const std::size_t xi = box.index(x);
    const Counts c = reduce_replicas(
        green, StreamKey(seed), M, Counts{},
        [&](Counts& acc, std::uint64_t, std::span<const double> grid) {
            const bool above = grid[xi] >= h;
            const bool hit = evaluate(event, threshold(box, grid, h));
            ++acc[above ? 0 : 1];
            if (hit) ++acc[above ? 2 : 3];
        },
        [](Counts& into, const Counts& from) {
            for (std::size_t k = 0; k < 4; ++k) into[k] += from[k];
        },
        opts);
    InfluenceEstimate r;
    r.x = x;
    r.event = format_event(event);
    r.h = h;
    r.n_above = c[0];
    r.n_below = c[1];
    r.hits_above = c[2];
    r.hits_below = c[3];
    return detail::finish_influence(r);
}

struct DifferentialReport {
    std::string event;
    double h = 0.0;
    double dh = 0.0;
    std::size_t M = 0;
    std::uint64_t seed = 0;
    double p = 0.0;        // P_h[A]
    double p_minus = 0.0;  // P_{h-dh}[A]
    double p_plus = 0.0;   // P_{h+dh}[A]
    double derivative = 0.0;     // (p_plus - p_minus) / (2 dh)
    double derivative_se = 0.0;
    Vertex argmax_vertex{};
    double max_influence = 0.0;
    double log_term = 0.0;       // log(1 / (2 I_max))
    double rhs_factor = 0.0;     // P (1 - P) log(1 / (2 I_max))
    double implied_c = 0.0;      // derivative / rhs_factor
    double implied_c_reflected = 0.0;  // same with h -> -h
    std::vector<std::string> flags;
};

/// dP/dh by a central difference on common random numbers, against
/// P(1-P) log(I^{-1}/2) with I the largest single-site influence.
inline DifferentialReport differential_inequality_report(const GreenOperator& green, const EventDescriptor& event,
                                                         double h, double dh, std::size_t M, std::uint64_t seed,
                                                         const ReplicaOptions& opts = {}) {
    if (!(dh > 0.0)) throw std::invalid_argument("differential_inequality_report: dh must be > 0");
    detail::require_replicas(M);
    const BoxLattice& box = green.box();
    validate(event, box);
    const FieldLayout& layout = green.layout();
    const std::size_t sites = layout.size();

    // [0..2]: event at h-dh, h, h+dh; [3]: flips between h-dh and h+dh;
    // then per active site x: #(phi_x >= h), #(phi_x >= h and A at h).
    struct Acc {
        std::array<std::uint64_t, 4> head{};
        std::vector<std::uint64_t> above;
        std::vector<std::uint64_t> above_hit;
    };
    Acc init;
    init.above.assign(sites, 0);
    init.above_hit.assign(sites, 0);
    std::vector<std::size_t> grid_index(sites);
    for (std::size_t s = 0; s < sites; ++s) grid_index[s] = box.index(layout.active[s]);

    const Acc acc = reduce_replicas(
        green, StreamKey(seed), M, init,
        [&](Acc& a, std::uint64_t, std::span<const double> grid) {
            const bool lo = evaluate(event, threshold(box, grid, h - dh));
            const bool mid = evaluate(event, threshold(box, grid, h));
            const bool hi = evaluate(event, threshold(box, grid, h + dh));
            a.head[0] += lo;
            a.head[1] += mid;
            a.head[2] += hi;
            a.head[3] += lo != hi;
            for (std::size_t s = 0; s < sites; ++s)
                if (grid[grid_index[s]] >= h) {
                    ++a.above[s];
                    a.above_hit[s] += mid;
                }
        },
        [](Acc& into, const Acc& from) {
            for (std::size_t k = 0; k < 4; ++k) into.head[k] += from.head[k];
            for (std::size_t s = 0; s < into.above.size(); ++s) {
                into.above[s] += from.above[s];
                into.above_hit[s] += from.above_hit[s];
            }
        },
        opts);

    DifferentialReport r;
    r.event = format_event(event);
    r.h = h;
    r.dh = dh;
    r.M = M;
    r.seed = seed;
    const double m = static_cast<double>(M);
    r.p_minus = double(acc.head[0]) / m;
    r.p = double(acc.head[1]) / m;
    r.p_plus = double(acc.head[2]) / m;
    r.derivative = (r.p_plus - r.p_minus) / (2.0 * dh);
    // paired difference d_i = 1{A, h+dh} - 1{A, h-dh}
    const double mean_d = r.p_plus - r.p_minus;
    const double second = double(acc.head[3]) / m;
    r.derivative_se = std::sqrt(std::max(0.0, second - mean_d * mean_d) / m) / (2.0 * dh);

    r.max_influence = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sites; ++s) {
        InfluenceEstimate inf;
        inf.n_above = acc.above[s];
        inf.n_below = M - acc.above[s];
        inf.hits_above = acc.above_hit[s];
        inf.hits_below = acc.head[1] - acc.above_hit[s];
        inf = detail::finish_influence(inf);
        if (!inf.undefined && inf.i_hat > r.max_influence) {
            r.max_influence = inf.i_hat;
            r.argmax_vertex = layout.active[s];
        }
    }
    if (!(r.derivative <= 0.0) && is_increasing(event)) r.flags.push_back("increasing-event-derivative-positive");
    if (is_increasing(event)) r.flags.push_back("sign-convention:dP/dh<=0-for-increasing-events");
    if (!std::isfinite(r.max_influence) || r.max_influence <= 0.0) {
        r.flags.push_back("log-term-undefined");
        r.log_term = std::numeric_limits<double>::quiet_NaN();
        r.rhs_factor = std::numeric_limits<double>::quiet_NaN();
        r.implied_c = std::numeric_limits<double>::quiet_NaN();
        r.implied_c_reflected = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    if (r.max_influence >= 0.5) r.flags.push_back("log-term-nonpositive");
    r.log_term = std::log(1.0 / (2.0 * r.max_influence));
    r.rhs_factor = r.p * (1.0 - r.p) * r.log_term;
    if (r.rhs_factor == 0.0) {
        r.flags.push_back("rhs-zero");
        r.implied_c = std::numeric_limits<double>::quiet_NaN();
        r.implied_c_reflected = std::numeric_limits<double>::quiet_NaN();
    } else {
        r.implied_c = r.derivative / r.rhs_factor;
        r.implied_c_reflected = -r.derivative / r.rhs_factor;
    }
    return r;
}

}  // namespace gfflab
