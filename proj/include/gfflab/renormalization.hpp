#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfflab/check_report.hpp"

namespace gfflab {

// The sequence builders are templates over the number type so the exact
// identities can be checked with rationals while everyday use stays in
// double. `Real` needs +, -, *, /, comparisons and construction from int.

enum class RenormMode { easy, hard };

inline const char* to_string(RenormMode m) { return m == RenormMode::easy ? "easy" : "hard"; }

template <class Real>
struct RenormSequences {
    RenormMode mode = RenormMode::easy;
    std::vector<Real> deltas;   // easy mode only
    std::vector<Real> scales;   // n_k
    std::vector<Real> heights;  // h_k
    Real delta_sum{};             // sum_k delta_k (easy)
    std::vector<Real> delta_sq_products;  // prod_{i<=k} delta_i^2 (easy)
    std::vector<std::string> flags;

    int K() const { return static_cast<int>(scales.size()) - 1; }
};

/// Forward form of the scale recursion:
///   delta_{k+1} = delta_k^2,  n_{k+1} = n_k / delta_k^2,  h_{k+1} = h_k - delta_k.
template <class Real>
RenormSequences<Real> easy_sequences(const Real& delta0, const Real& n0, const Real& h0, int K) {
    if (!(delta0 > Real(0) && delta0 < Real(1))) throw std::invalid_argument("easy_sequences: delta0 must lie in (0,1)");
    if (!(n0 >= Real(1))) throw std::invalid_argument("easy_sequences: n0 must be >= 1");
    if (K < 0) throw std::invalid_argument("easy_sequences: K must be >= 0");
    RenormSequences<Real> s;
    s.mode = RenormMode::easy;
    Real d = delta0;
    Real n = n0;
    Real h = h0;
    Real prod(1);
    Real sum(0);
    for (int k = 0; k <= K; ++k) {
        s.deltas.push_back(d);
        s.scales.push_back(n);
        s.heights.push_back(h);
        prod = prod * d * d;
        sum = sum + d;
        s.delta_sq_products.push_back(prod);
        const Real d2 = d * d;
        n = n / d2;
        h = h - d;
        d = d2;
    }
    s.delta_sum = sum;
    return s;
}

/// Dyadic scales with heights walking from h0 down to h:
///   n_k = 2^{-k} n0,  h_k = h0 - (h0 - h) sum_{i=1..k} 2^{-i}.
template <class Real>
RenormSequences<Real> hard_sequences(const Real& n0, const Real& h0, const Real& h, int K) {
    if (!(n0 >= Real(1))) throw std::invalid_argument("hard_sequences: n0 must be >= 1");
    if (!(h0 > h)) throw std::invalid_argument("hard_sequences: need h0 > h");
    if (K < 0) throw std::invalid_argument("hard_sequences: K must be >= 0");
    RenormSequences<Real> s;
    s.mode = RenormMode::hard;
    Real n = n0;
    Real partial(0);
    Real weight(1);
    const Real gap = h0 - h;
    for (int k = 0; k <= K; ++k) {
        s.scales.push_back(n);
        s.heights.push_back(h0 - gap * partial);
        weight = weight / Real(2);
        partial = partial + weight;
        n = n / Real(2);
    }
    if (s.scales.back() < Real(1)) s.flags.push_back("scale-below-lattice-spacing");
    return s;
}

template <class Real>
struct ProductBound {
    Real product;  // prod_{i=0..k} delta_i^2
    Real bound;    // 2 n_0 / n_{k+1}
    bool holds;
};

/// prod_{i<=k} delta_i^2 <= 2 n_0 / n_{k+1}; n_{k+1} is produced by one more
/// step of the recursion when k = K.
template <class Real>
ProductBound<Real> product_bound(const RenormSequences<Real>& seq, int k) {
    if (seq.mode != RenormMode::easy) throw std::invalid_argument("product bound needs easy-mode sequences");
    if (k < 0 || k > seq.K()) throw std::invalid_argument("product bound: k out of range");
    const auto ku = static_cast<std::size_t>(k);
    Real next = seq.scales[ku];
    if (ku + 1 < seq.scales.size())
        next = seq.scales[ku + 1];
    else
        next = next / (seq.deltas[ku] * seq.deltas[ku]);
    const Real bound = Real(2) * seq.scales.front() / next;
    return {seq.delta_sq_products[ku], bound, seq.delta_sq_products[ku] <= bound};
}

inline CheckReport check_product_bound(const RenormSequences<double>& seq, int k) {
    const ProductBound<double> b = product_bound(seq, k);
    CheckReport r;
    r.name = "product-bound";
    r.lhs = b.product;
    r.rhs = b.bound;
    r.margin = b.bound - b.product;
    r.se = 0.0;
    r.verdict = b.holds ? Verdict::holds : Verdict::violated;
    r.params = {{"k", double(k)}, {"delta0", seq.deltas.front()}, {"n0", seq.scales.front()}};
    return r;
}

// ---------------------------------------------------------------------------

/// f(x) = log(-1/x) / log(log(-1/x)) for x < 0 and -inf for x >= 0.
/// The denominator is positive only for x in (-1/e, 0); for x <= -1/e the
/// value is reported as undefined rather than as a sign-flipped number.
struct FValue {
    enum class Kind { value, minus_infinity, undefined };
    Kind kind = Kind::undefined;
    double value = std::numeric_limits<double>::quiet_NaN();

    bool defined() const { return kind == Kind::value; }
};

inline FValue f_corollary1(double x) {
    if (std::isnan(x)) return {};
    if (x >= 0.0) return {FValue::Kind::minus_infinity, -std::numeric_limits<double>::infinity()};
    const double t = -1.0 / x;
    const double a = std::log(t);
    if (!(a > 0.0)) return {};
    const double b = std::log(a);
    if (!(b > 0.0)) return {};
    return {FValue::Kind::value, a / b};
}

namespace detail {
inline bool lemma3_holds(long i, double p, double c0, double c1) {
    const double di = static_cast<double>(i);
    return di * di <= c0 * std::pow(p, 1.0 - c1 / di);
}
}  // namespace detail

/// Largest integer I >= 1 with I^2 <= c0 p^{1 - c1/I}, or 0 when none.
/// Since p^{1 - c1/I} <= p^{-c1}, only I <= sqrt(c0 p^{-c1}) can qualify.
inline long lemma3_max_I(double p, double c0, double c1) {
    if (!(c0 > 0.0) || !(c1 > 0.0)) throw std::invalid_argument("lemma3_max_I: c0 and c1 must be > 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("lemma3_max_I: p must lie in [0,1]");
    if (p == 0.0) return 0;
    const double cap = std::sqrt(c0 * std::pow(p, -c1));
    if (!(cap < 1e8)) throw std::invalid_argument("lemma3_max_I: search range too large");
    for (long i = static_cast<long>(cap) + 1; i >= 1; --i)
        if (detail::lemma3_holds(i, p, c0, c1)) return i;
    return 0;
}

// ---------------------------------------------------------------------------

struct BetaIteration {
    std::vector<double> betas;       // beta_0 .. beta_k (upper-bound map)
    std::vector<double> simplified;  // exp(-c3 (h2-h1) exp(c4 f(beta_k))) alongside
    std::vector<double> f_values;
    int halted_at = -1;  // step whose f was undefined, -1 if none
    bool collapsed = false;    // trajectory reached 0
    bool non_increasing = true;
    bool non_increasing_after_first = true;
    std::vector<std::string> flags;
};

/// Iterates beta_{k+1} = exp(-c3 * 2 * (h2 - h1) * delta * exp(c3 f(beta_k)))
/// (the scale ratio n_k / n_{k+1} is 2). f is evaluated at -beta_k, the
/// reflection that puts a probability into f's negative-axis domain.
inline BetaIteration beta_iteration(double beta0, double h2, double h1, double delta, double c3, double c4, int K) {
    if (!(beta0 > 0.0 && beta0 < 1.0)) throw std::invalid_argument("beta_iteration: beta0 must lie in (0,1)");
    if (!(delta > 0.0 && c3 > 0.0 && c4 > 0.0)) throw std::invalid_argument("beta_iteration: constants must be > 0");
    if (h2 < h1) throw std::invalid_argument("beta_iteration: need h2 >= h1");
    if (K < 0) throw std::invalid_argument("beta_iteration: K must be >= 0");
    BetaIteration it;
    if (h2 == h1) it.flags.push_back("non-informative:h2=h1");
    it.betas.push_back(beta0);
    for (int k = 0; k < K; ++k) {
        const double b = it.betas.back();
        if (b == 0.0) {
            it.collapsed = true;
            break;
        }
        const FValue f = f_corollary1(-b);
        if (!f.defined()) {
            it.halted_at = k;
            it.flags.push_back("f-undefined-at-step-" + std::to_string(k));
            break;
        }
        it.f_values.push_back(f.value);
        const double next = std::exp(-c3 * 2.0 * (h2 - h1) * delta * std::exp(c3 * f.value));
        it.simplified.push_back(std::exp(-c3 * (h2 - h1) * std::exp(c4 * f.value)));
        it.betas.push_back(next);
    }
    if (!it.betas.empty() && it.betas.back() == 0.0) it.collapsed = true;
    for (std::size_t i = 1; i < it.betas.size(); ++i) {
        if (it.betas[i] > it.betas[i - 1]) {
            it.non_increasing = false;
            if (i >= 2) it.non_increasing_after_first = false;
        }
    }
    return it;
}

}  // namespace gfflab
