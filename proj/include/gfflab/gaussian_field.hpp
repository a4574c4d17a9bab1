#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gfflab/lattice.hpp"
#include "gfflab/rng.hpp"

namespace gfflab {

/// Which box vertices carry a random value. Every other vertex is pinned
/// to zero (the frame, plus any extra killed vertices).
struct FieldLayout {
    BoxLattice box;
    std::vector<Vertex> active;
    std::vector<int> slot;  // per box vertex: index into `active`, or -1

    FieldLayout(BoxLattice b, std::vector<Vertex> act)
        : box(b), active(std::move(act)), slot(b.vertex_count(), -1) {
        for (std::size_t i = 0; i < active.size(); ++i) slot[box.index(active[i])] = static_cast<int>(i);
    }

    int slot_of(Vertex v) const { return box.contains(v) ? slot[box.index(v)] : -1; }
    std::size_t size() const { return active.size(); }
};

using LayoutPtr = std::shared_ptr<const FieldLayout>;

/// One realization of the field: values on the active vertices, zero elsewhere.
class FieldSample {
public:
    FieldSample(LayoutPtr layout, std::vector<double> values)
        : layout_(std::move(layout)), values_(std::move(values)) {
        if (values_.size() != layout_->size())
            throw std::invalid_argument("FieldSample: value count does not match layout");
    }

    const BoxLattice& box() const { return layout_->box; }
    const FieldLayout& layout() const { return *layout_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double at(Vertex v) const {
        const int s = layout_->slot_of(v);
        return s < 0 ? 0.0 : values_[static_cast<std::size_t>(s)];
    }

    /// Heights for every box vertex in row-major order.
    std::vector<double> to_grid() const {
        std::vector<double> grid(layout_->box.vertex_count(), 0.0);
        for (std::size_t i = 0; i < values_.size(); ++i)
            grid[layout_->box.index(layout_->active[i])] = values_[i];
        return grid;
    }

private:
    LayoutPtr layout_;
    std::vector<double> values_;
};

struct GreenOptions {
    std::size_t max_interior = 4096;
};

/// Covariance of the zero-boundary field: expected visit counts of simple
/// random walk started at u, seen at v, killed on entering a pinned vertex.
/// Holds G and its lower Cholesky factor L (L L^T = G).
class GreenOperator {
public:
    GreenOperator(LayoutPtr layout, Eigen::MatrixXd g, Eigen::MatrixXd l)
        : layout_(std::move(layout)), g_(std::move(g)), l_(std::move(l)) {}

    const BoxLattice& box() const { return layout_->box; }
    const FieldLayout& layout() const { return *layout_; }
    const LayoutPtr& layout_ptr() const { return layout_; }
    const Eigen::MatrixXd& covariance() const { return g_; }
    const Eigen::MatrixXd& factor() const { return l_; }
    std::size_t size() const { return layout_->size(); }

    double operator()(Vertex u, Vertex v) const {
        const int a = layout_->slot_of(u);
        const int b = layout_->slot_of(v);
        if (a < 0 || b < 0) return 0.0;
        return g_(a, b);
    }

    /// max |L L^T - G| / max |G|
    double factorization_residual() const {
        const Eigen::MatrixXd r = l_ * l_.transpose() - g_;
        return r.cwiseAbs().maxCoeff() / g_.cwiseAbs().maxCoeff();
    }

private:
    LayoutPtr layout_;
    Eigen::MatrixXd g_;
    Eigen::MatrixXd l_;
};

namespace detail {

/// I - P restricted to the active vertices, P the simple-random-walk kernel.
inline Eigen::MatrixXd killed_walk_generator(const FieldLayout& layout) {
    const std::size_t m = layout.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const Vertex v = layout.active[i];
        for (int k = 0; k < 4; ++k) {
            const int s = layout.slot_of(Vertex{v.x + kPrimalDx[k], v.y + kPrimalDy[k]});
            if (s >= 0) a(static_cast<Eigen::Index>(i), s) -= 0.25;
        }
    }
    return a;
}

inline Eigen::MatrixXd lower_factor(const Eigen::MatrixXd& g) {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("Cholesky factorization failed: covariance is not positive definite");
    return llt.matrixL();
}

}  // namespace detail

/// Green operator of the box with its frame and `killed` pinned to zero.
inline GreenOperator build_green(const BoxLattice& box, std::span<const Vertex> killed,
                                 const GreenOptions& opts = {}) {
    std::vector<char> dead(box.vertex_count(), 0);
    for (Vertex k : killed) {
        if (!box.is_interior(k)) throw std::invalid_argument("build_green: killed vertex is not interior");
        dead[box.index(k)] = 1;
    }
    std::vector<Vertex> active;
    for (Vertex v : box.interior())
        if (!dead[box.index(v)]) active.push_back(v);
    if (active.empty()) throw std::invalid_argument("build_green: box has empty interior");
    if (active.size() > opts.max_interior)
        throw std::invalid_argument("build_green: interior of " + std::to_string(active.size()) +
                                    " vertices exceeds the configured cap of " +
                                    std::to_string(opts.max_interior));

    auto layout = std::make_shared<const FieldLayout>(box, std::move(active));
    const Eigen::MatrixXd a = detail::killed_walk_generator(*layout);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("build_green: I - P is not positive definite");
    Eigen::MatrixXd g = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::MatrixXd l = detail::lower_factor(g);
    return GreenOperator(std::move(layout), std::move(g), std::move(l));
}

inline GreenOperator build_green(const BoxLattice& box, const GreenOptions& opts = {}) {
    return build_green(box, std::span<const Vertex>{}, opts);
}

/// phi = L z for a caller-supplied standard normal vector z.
inline FieldSample sample_from_normals(const GreenOperator& green, std::span<const double> z) {
    if (z.size() != green.size()) throw std::invalid_argument("sample: normal vector has wrong length");
    const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::VectorXd phi = green.factor().triangularView<Eigen::Lower>() * zv;
    return FieldSample(green.layout_ptr(), std::vector<double>(phi.data(), phi.data() + phi.size()));
}

inline FieldSample sample(const GreenOperator& green, NormalStream& stream) {
    std::vector<double> z(green.size());
    stream.fill_normals(z);
    return sample_from_normals(green, z);
}

inline FieldSample sample(const GreenOperator& green, const StreamKey& key) {
    NormalStream stream(key);
    return sample(green, stream);
}

/// Fields for replicas [first, first + count): column j is L z_j with z_j
/// drawn from derive(key, first + j).
inline Eigen::MatrixXd sample_block(const GreenOperator& green, const StreamKey& key,
                                    std::uint64_t first, std::size_t count) {
    const auto m = static_cast<Eigen::Index>(green.size());
    Eigen::MatrixXd z(m, static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j) {
        NormalStream stream(key.derive(first + j));
        stream.fill_normals(std::span<double>(z.col(static_cast<Eigen::Index>(j)).data(),
                                              static_cast<std::size_t>(m)));
    }
    return green.factor().triangularView<Eigen::Lower>() * z;
}

/// Draws from the field conditioned on its values on K.
///
/// The conditional law on U = active \ K is Gaussian with mean
/// G_UK G_KK^{-1} phi_K and covariance G_UU - G_UK G_KK^{-1} G_KU.
class ConditionalSampler {
public:
    ConditionalSampler(const GreenOperator& green, std::span<const Vertex> k_set,
                       std::span<const double> k_values) {
        if (k_set.size() != k_values.size())
            throw std::invalid_argument("conditional_sample: K and values differ in length");
        const FieldLayout& base = green.layout();
        std::vector<int> k_slots;
        std::vector<char> in_k(base.size(), 0);
        for (std::size_t i = 0; i < k_set.size(); ++i) {
            const int s = base.slot_of(k_set[i]);
            if (s < 0) throw std::invalid_argument("conditional_sample: K must lie in the interior");
            if (!std::isfinite(k_values[i])) throw std::invalid_argument("conditional_sample: non-finite value on K");
            if (in_k[static_cast<std::size_t>(s)]) throw std::invalid_argument("conditional_sample: repeated vertex in K");
            in_k[static_cast<std::size_t>(s)] = 1;
            k_slots.push_back(s);
        }
        std::vector<int> u_slots;
        std::vector<Vertex> u_vertices;
        for (std::size_t i = 0; i < base.size(); ++i)
            if (!in_k[i]) {
                u_slots.push_back(static_cast<int>(i));
                u_vertices.push_back(base.active[i]);
            }
        layout_ = std::make_shared<const FieldLayout>(base.box, std::move(u_vertices));

        const auto nu = static_cast<Eigen::Index>(u_slots.size());
        const auto nk = static_cast<Eigen::Index>(k_slots.size());
        mean_ = Eigen::VectorXd::Zero(nu);
        if (nu == 0) return;
        const Eigen::MatrixXd& g = green.covariance();
        Eigen::MatrixXd guu(nu, nu);
        for (Eigen::Index i = 0; i < nu; ++i)
            for (Eigen::Index j = 0; j < nu; ++j) guu(i, j) = g(u_slots[i], u_slots[j]);
        if (nk == 0) {
            factor_ = green.factor();
            return;
        }
        Eigen::MatrixXd guk(nu, nk);
        Eigen::MatrixXd gkk(nk, nk);
        Eigen::VectorXd phik(nk);
        for (Eigen::Index i = 0; i < nu; ++i)
            for (Eigen::Index j = 0; j < nk; ++j) guk(i, j) = g(u_slots[i], k_slots[j]);
        for (Eigen::Index i = 0; i < nk; ++i) {
            phik(i) = k_values[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < nk; ++j) gkk(i, j) = g(k_slots[i], k_slots[j]);
        }
        Eigen::LLT<Eigen::MatrixXd> kk(gkk);
        if (kk.info() != Eigen::Success) throw std::runtime_error("conditional_sample: G_KK not positive definite");
        mean_ = guk * kk.solve(phik);
        Eigen::MatrixXd schur = guu - guk * kk.solve(guk.transpose());
        schur = 0.5 * (schur + schur.transpose()).eval();
        factor_ = detail::lower_factor(schur);
    }

    const FieldLayout& layout() const { return *layout_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    std::size_t size() const { return layout_->size(); }

    FieldSample draw(NormalStream& stream) const {
        if (size() == 0) return FieldSample(layout_, {});
        Eigen::VectorXd z(static_cast<Eigen::Index>(size()));
        stream.fill_normals(std::span<double>(z.data(), size()));
        const Eigen::VectorXd phi = mean_ + factor_.triangularView<Eigen::Lower>() * z;
        return FieldSample(layout_, std::vector<double>(phi.data(), phi.data() + phi.size()));
    }

private:
    LayoutPtr layout_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd factor_;
};

inline FieldSample conditional_sample(const GreenOperator& green, std::span<const Vertex> k_set,
                                      std::span<const double> k_values, NormalStream& stream) {
    return ConditionalSampler(green, k_set, k_values).draw(stream);
}

/// Glues a conditional draw on U and the conditioning values on K back into
/// one field over `green`'s layout.
inline FieldSample compose(const GreenOperator& green, const FieldSample& rest,
                           std::span<const Vertex> k_set, std::span<const double> k_values) {
    std::vector<double> values(green.size(), 0.0);
    for (std::size_t i = 0; i < k_set.size(); ++i)
        values[static_cast<std::size_t>(green.layout().slot_of(k_set[i]))] = k_values[i];
    for (std::size_t i = 0; i < rest.size(); ++i)
        values[static_cast<std::size_t>(green.layout().slot_of(rest.layout().active[i]))] = rest.values()[i];
    return FieldSample(green.layout_ptr(), std::move(values));
}

/// CSV export "row,col,value" over active-vertex indices. The coordinates
/// behind each index come from write_layout_csv.
inline void write_green_csv(std::ostream& out, const GreenOperator& green) {
    out << "row,col,value\n";
    const Eigen::MatrixXd& g = green.covariance();
    char buf[64];
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", g(i, j));
            out << i << ',' << j << ',' << buf << '\n';
        }
}

inline void write_layout_csv(std::ostream& out, const FieldLayout& layout) {
    out << "index,x,y\n";
    for (std::size_t i = 0; i < layout.size(); ++i)
        out << i << ',' << layout.active[i].x << ',' << layout.active[i].y << '\n';
}

}  // namespace gfflab
