#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfflab/gaussian_field.hpp"
#include "gfflab/lattice.hpp"
#include "gfflab/max_flow.hpp"
#include "gfflab/union_find.hpp"

namespace gfflab {

/// Site configuration {v : phi_v >= h} on a box, with 4-connected open
/// clusters and 8-connected closed clusters labelled at construction.
class LevelSet {
public:
    LevelSet(const BoxLattice& box, std::vector<char> open,
             double h = std::numeric_limits<double>::quiet_NaN())
        : box_(box), h_(h), open_(std::move(open)) {
        if (open_.size() != box_.vertex_count())
            throw std::invalid_argument("LevelSet: configuration size does not match box");
        label();
    }

    const BoxLattice& box() const { return box_; }
    double height() const { return h_; }
    std::span<const char> sites() const { return open_; }

    bool is_open(Vertex v) const { return open_[box_.index(v)] != 0; }

    /// Root of the open cluster containing v, or -1 when v is closed.
    long primal_label(Vertex v) const { return primal_[box_.index(v)]; }
    /// Root of the closed *-cluster containing v, or -1 when v is open.
    long dual_label(Vertex v) const { return dual_[box_.index(v)]; }

    std::size_t open_count() const {
        return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), char{1}));
    }

private:
    void label() {
        const std::size_t n = box_.vertex_count();
        DisjointSet primal(n);
        DisjointSet dual(n);
        for (int y = 0; y < box_.height(); ++y)
            for (int x = 0; x < box_.width(); ++x) {
                const Vertex v{x, y};
                const std::size_t i = box_.index(v);
                // forward half of each neighbourhood covers every pair once
                const int dx[4] = {1, 0, 1, -1};
                const int dy[4] = {0, 1, 1, 1};
                for (int k = 0; k < 4; ++k) {
                    const Vertex u{x + dx[k], y + dy[k]};
                    if (!box_.contains(u)) continue;
                    const std::size_t j = box_.index(u);
                    if (open_[i] && open_[j] && k < 2) primal.unite(i, j);
                    if (!open_[i] && !open_[j]) dual.unite(i, j);
                }
            }
        primal_.assign(n, -1);
        dual_.assign(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            if (open_[i])
                primal_[i] = static_cast<long>(primal.find(i));
            else
                dual_[i] = static_cast<long>(dual.find(i));
        }
    }

    BoxLattice box_;
    double h_;
    std::vector<char> open_;
    std::vector<long> primal_;
    std::vector<long> dual_;
};

/// Threshold a full-grid height vector (row-major over the box).
inline LevelSet threshold(const BoxLattice& box, std::span<const double> heights, double h) {
    if (heights.size() != box.vertex_count())
        throw std::invalid_argument("threshold: height grid does not match box");
    std::vector<char> open(heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) open[i] = heights[i] >= h ? 1 : 0;
    return LevelSet(box, std::move(open), h);
}

inline LevelSet threshold(const FieldSample& field, double h) {
    const std::vector<double> grid = field.to_grid();
    return threshold(field.box(), grid, h);
}

inline bool connected(const LevelSet& ls, Vertex x, Vertex y) {
    detail::require_in_box(ls.box(), x);
    detail::require_in_box(ls.box(), y);
    const long a = ls.primal_label(x);
    return a >= 0 && a == ls.primal_label(y);
}

inline bool dual_connected(const LevelSet& ls, Vertex u, Vertex v) {
    detail::require_in_box(ls.box(), u);
    detail::require_in_box(ls.box(), v);
    const long a = ls.dual_label(u);
    return a >= 0 && a == ls.dual_label(v);
}

namespace detail {

inline bool on_start_side(const Rect& r, Direction d, Vertex v) {
    return d == Direction::vertical ? v.y == r.y0 : v.x == r.x0;
}
inline bool on_end_side(const Rect& r, Direction d, Vertex v) {
    return d == Direction::vertical ? v.y == r.y1 : v.x == r.x1;
}

/// Flood fill inside `r` over sites where `member` holds, from the start
/// side; true when the end side is reached.
template <class Member>
bool restricted_crossing(const BoxLattice& box, const Rect& r, Direction d, bool eight, Member member) {
    std::vector<char> seen(r.size(), 0);
    auto local = [&](Vertex v) {
        return static_cast<std::size_t>(v.y - r.y0) * static_cast<std::size_t>(r.width()) +
               static_cast<std::size_t>(v.x - r.x0);
    };
    std::vector<Vertex> stack;
    for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x) {
            const Vertex v{x, y};
            if (on_start_side(r, d, v) && member(v)) {
                seen[local(v)] = 1;
                stack.push_back(v);
            }
        }
    const int degree = eight ? 8 : 4;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        if (on_end_side(r, d, v)) return true;
        for (int k = 0; k < degree; ++k) {
            const Vertex u{v.x + kDualDx[k], v.y + kDualDy[k]};
            if (!r.contains(u) || !box.contains(u) || seen[local(u)] || !member(u)) continue;
            seen[local(u)] = 1;
            stack.push_back(u);
        }
    }
    return false;
}

}  // namespace detail

/// Open 4-connected path inside `rect` joining the two sides named by `d`.
/// Degenerate (zero-area) rectangles never cross.
inline bool crossing(const LevelSet& ls, const Rect& rect, Direction d) {
    require_rect_in_box(ls.box(), rect);
    if (rect.degenerate()) return false;
    return detail::restricted_crossing(ls.box(), rect, d, false, [&](Vertex v) { return ls.is_open(v); });
}

/// Closed 8-connected path inside `rect` joining the sides named by `d`.
inline bool dual_crossing(const LevelSet& ls, const Rect& rect, Direction d) {
    require_rect_in_box(ls.box(), rect);
    if (rect.degenerate()) return false;
    return detail::restricted_crossing(ls.box(), rect, d, true, [&](Vertex v) { return !ls.is_open(v); });
}

struct ClusterReport {
    std::vector<Vertex> cluster;
    std::size_t size = 0;
    int radius = 0;  // max Chebyshev distance from the seed
};

inline ClusterReport cluster_of(const LevelSet& ls, Vertex x) {
    detail::require_in_box(ls.box(), x);
    ClusterReport report;
    const long label = ls.primal_label(x);
    if (label < 0) return report;
    const BoxLattice& box = ls.box();
    for (std::size_t i = 0; i < box.vertex_count(); ++i) {
        const Vertex v = box.vertex(i);
        if (ls.primal_label(v) != label) continue;
        report.cluster.push_back(v);
        report.radius = std::max(report.radius, chebyshev(v, x));
    }
    report.size = report.cluster.size();
    return report;
}

/// Maximum number of vertex-disjoint open crossings of `rect` in direction
/// `d`, as a unit vertex-capacity max flow between the two sides.
inline int count_disjoint_crossings(const LevelSet& ls, const Rect& rect, Direction d) {
    require_rect_in_box(ls.box(), rect);
    if (rect.degenerate()) return 0;
    const std::size_t cells = rect.size();
    const std::size_t source = 2 * cells;
    const std::size_t sink = source + 1;
    FlowNetwork net(2 * cells + 2);
    auto local = [&](Vertex v) {
        return static_cast<std::size_t>(v.y - rect.y0) * static_cast<std::size_t>(rect.width()) +
               static_cast<std::size_t>(v.x - rect.x0);
    };
    for (int y = rect.y0; y <= rect.y1; ++y)
        for (int x = rect.x0; x <= rect.x1; ++x) {
            const Vertex v{x, y};
            if (!ls.is_open(v)) continue;
            const std::size_t in = 2 * local(v);
            const std::size_t out = in + 1;
            net.add_edge(in, out, 1);
            if (detail::on_start_side(rect, d, v)) net.add_edge(source, in, 1);
            if (detail::on_end_side(rect, d, v)) net.add_edge(out, sink, 1);
            for (int k = 0; k < 4; ++k) {
                const Vertex u{x + detail::kPrimalDx[k], y + detail::kPrimalDy[k]};
                if (rect.contains(u) && ls.is_open(u)) net.add_edge(out, 2 * local(u), 1);
            }
        }
    return net.max_flow(source, sink);
}

/// Largest h at which an open crossing of `rect` exists, given full-grid
/// heights: the best bottleneck over crossing paths. The crossing holds at
/// h exactly when h <= this value.
inline double crossing_threshold(const BoxLattice& box, std::span<const double> heights, const Rect& rect,
                                 Direction d) {
    require_rect_in_box(box, rect);
    if (rect.degenerate()) return -std::numeric_limits<double>::infinity();
    std::vector<double> best(box.vertex_count(), -std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item> pq;
    for (int y = rect.y0; y <= rect.y1; ++y)
        for (int x = rect.x0; x <= rect.x1; ++x) {
            const Vertex v{x, y};
            if (!detail::on_start_side(rect, d, v)) continue;
            const std::size_t i = box.index(v);
            best[i] = heights[i];
            pq.push({best[i], i});
        }
    while (!pq.empty()) {
        const auto [value, i] = pq.top();
        pq.pop();
        if (value < best[i]) continue;
        const Vertex v = box.vertex(i);
        if (detail::on_end_side(rect, d, v)) return value;
        for (int k = 0; k < 4; ++k) {
            const Vertex u{v.x + detail::kPrimalDx[k], v.y + detail::kPrimalDy[k]};
            if (!rect.contains(u)) continue;
            const std::size_t j = box.index(u);
            const double through = std::min(value, heights[j]);
            if (through > best[j]) {
                best[j] = through;
                pq.push({through, j});
            }
        }
    }
    return -std::numeric_limits<double>::infinity();
}

/// Best bottleneck height from `seed` to every vertex of the box (4-paths,
/// seed included). seed connects to v at level h iff h <= result[v].
inline std::vector<double> bottleneck_from(const BoxLattice& box, std::span<const double> heights, Vertex seed) {
    detail::require_in_box(box, seed);
    std::vector<double> best(box.vertex_count(), -std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item> pq;
    const std::size_t s = box.index(seed);
    best[s] = heights[s];
    pq.push({best[s], s});
    while (!pq.empty()) {
        const auto [value, i] = pq.top();
        pq.pop();
        if (value < best[i]) continue;
        const Vertex v = box.vertex(i);
        for (int k = 0; k < 4; ++k) {
            const Vertex u{v.x + detail::kPrimalDx[k], v.y + detail::kPrimalDy[k]};
            if (!box.contains(u)) continue;
            const std::size_t j = box.index(u);
            const double through = std::min(value, heights[j]);
            if (through > best[j]) {
                best[j] = through;
                pq.push({through, j});
            }
        }
    }
    return best;
}

/// Rows of '0'/'1', one line per y from 0 upward.
inline void write_grid(std::ostream& out, const LevelSet& ls) {
    const BoxLattice& box = ls.box();
    for (int y = 0; y < box.height(); ++y) {
        for (int x = 0; x < box.width(); ++x) out << (ls.is_open({x, y}) ? '1' : '0');
        out << '\n';
    }
}

inline LevelSet read_grid(std::istream& in) {
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!rows.empty() && line.size() != rows.front().size())
            throw std::invalid_argument("read_grid: ragged rows");
        if (line.find_first_not_of("01") != std::string::npos)
            throw std::invalid_argument("read_grid: rows must contain only 0 and 1");
        rows.push_back(line);
    }
    if (rows.empty()) throw std::invalid_argument("read_grid: empty grid");
    const BoxLattice box(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    std::vector<char> open(box.vertex_count());
    for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x)
            open[box.index({x, y})] = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '1';
    return LevelSet(box, std::move(open));
}

}  // namespace gfflab
