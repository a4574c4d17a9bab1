#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfflab {

struct Vertex {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(Vertex, Vertex) = default;
};

inline int chebyshev(Vertex a, Vertex b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

enum class Direction { horizontal, vertical };

inline const char* to_string(Direction d) {
    return d == Direction::horizontal ? "horizontal" : "vertical";
}

inline Direction parse_direction(const std::string& s) {
    if (s == "horizontal" || s == "h") return Direction::horizontal;
    if (s == "vertical" || s == "v") return Direction::vertical;
    throw std::invalid_argument("unknown crossing direction: " + s);
}

/// Axis-aligned rectangle of lattice vertices, corners inclusive.
///
/// A vertical crossing joins row y0 to row y1; a horizontal crossing joins
/// column x0 to column x1.
struct Rect {
    int x0 = 0;
    int x1 = 0;
    int y0 = 0;
    int y1 = 0;

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    std::size_t size() const {
        return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
    }
    bool contains(Vertex v) const {
        return v.x >= x0 && v.x <= x1 && v.y >= y0 && v.y <= y1;
    }
    /// Zero geometric area: a single row or column of vertices.
    bool degenerate() const { return x0 == x1 || y0 == y1; }

    friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// Finite box of Z^2 with `width` x `height` vertices.
///
/// The frame (outermost ring) plays the role of the boundary: the field is
/// pinned to zero there. Everything else is interior. Square boxes are the
/// common case; rectangular boxes exist so that small hand-checkable
/// interiors (e.g. two adjacent vertices) are expressible.
class BoxLattice {
public:
    BoxLattice() = default;

    BoxLattice(int width, int height) : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("box side must be >= 1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    /// Side length; only meaningful for square boxes.
    int side() const { return width_; }
    bool square() const { return width_ == height_; }

    std::size_t vertex_count() const {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }

    bool contains(Vertex v) const {
        return v.x >= 0 && v.x < width_ && v.y >= 0 && v.y < height_;
    }
    bool contains(const Rect& r) const {
        return r.x0 <= r.x1 && r.y0 <= r.y1 && contains(Vertex{r.x0, r.y0}) &&
               contains(Vertex{r.x1, r.y1});
    }

    bool on_boundary(Vertex v) const {
        return v.x == 0 || v.y == 0 || v.x == width_ - 1 || v.y == height_ - 1;
    }
    bool is_interior(Vertex v) const { return contains(v) && !on_boundary(v); }

    std::size_t index(Vertex v) const {
        return static_cast<std::size_t>(v.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(v.x);
    }
    Vertex vertex(std::size_t i) const {
        return Vertex{static_cast<int>(i % static_cast<std::size_t>(width_)),
                      static_cast<int>(i / static_cast<std::size_t>(width_))};
    }

    Vertex origin() const { return Vertex{(width_ - 1) / 2, (height_ - 1) / 2}; }

    Rect bounds() const { return Rect{0, width_ - 1, 0, height_ - 1}; }

    std::vector<Vertex> vertices() const {
        std::vector<Vertex> out;
        out.reserve(vertex_count());
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x) out.push_back({x, y});
        return out;
    }
    std::vector<Vertex> interior() const {
        std::vector<Vertex> out;
        for (int y = 1; y + 1 < height_; ++y)
            for (int x = 1; x + 1 < width_; ++x) out.push_back({x, y});
        return out;
    }
    std::vector<Vertex> boundary() const {
        std::vector<Vertex> out;
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x)
                if (on_boundary({x, y})) out.push_back({x, y});
        return out;
    }

    std::size_t interior_count() const {
        if (width_ < 3 || height_ < 3) return 0;
        return static_cast<std::size_t>(width_ - 2) * static_cast<std::size_t>(height_ - 2);
    }

    friend bool operator==(const BoxLattice&, const BoxLattice&) = default;

private:
    int width_ = 1;
    int height_ = 1;
};

inline BoxLattice build_box(int n) {
    if (n < 1) throw std::invalid_argument("build_box: n must be >= 1");
    return BoxLattice(n, n);
}

inline BoxLattice build_box(int width, int height) { return BoxLattice(width, height); }

namespace detail {
inline void require_in_box(const BoxLattice& box, Vertex v) {
    if (!box.contains(v))
        throw std::out_of_range("vertex (" + std::to_string(v.x) + "," + std::to_string(v.y) +
                                ") outside box");
}
inline constexpr int kPrimalDx[4] = {1, -1, 0, 0};
inline constexpr int kPrimalDy[4] = {0, 0, 1, -1};
inline constexpr int kDualDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
inline constexpr int kDualDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
}  // namespace detail

/// 4-adjacency clipped to the box.
inline std::vector<Vertex> primal_neighbors(const BoxLattice& box, Vertex v) {
    detail::require_in_box(box, v);
    std::vector<Vertex> out;
    out.reserve(4);
    for (int k = 0; k < 4; ++k) {
        Vertex u{v.x + detail::kPrimalDx[k], v.y + detail::kPrimalDy[k]};
        if (box.contains(u)) out.push_back(u);
    }
    return out;
}

/// 8-adjacency clipped to the box; used for *-connectivity of closed sites.
inline std::vector<Vertex> dual_neighbors(const BoxLattice& box, Vertex v) {
    detail::require_in_box(box, v);
    std::vector<Vertex> out;
    out.reserve(8);
    for (int k = 0; k < 8; ++k) {
        Vertex u{v.x + detail::kDualDx[k], v.y + detail::kDualDy[k]};
        if (box.contains(u)) out.push_back(u);
    }
    return out;
}

inline void require_rect_in_box(const BoxLattice& box, const Rect& r) {
    if (!box.contains(r))
        throw std::out_of_range("rectangle [" + std::to_string(r.x0) + "," + std::to_string(r.x1) +
                                "]x[" + std::to_string(r.y0) + "," + std::to_string(r.y1) +
                                "] leaves the box");
}

/// The 2:1 rectangle used for R(n, 2n) style crossings inside `box`:
/// full interior width, half of it in height, vertically centred.
inline Rect standard_rect(const BoxLattice& box) {
    if (box.interior_count() == 0) return box.bounds();
    const int w = box.width() - 2;
    const int h = std::clamp(w / 2, 1, box.height() - 2);
    const int y0 = 1 + (box.height() - 2 - h) / 2;
    return Rect{1, w, y0, y0 + h - 1};
}

/// Host box of side 2n+2 whose interior is exactly 2n x 2n, and the
/// rectangle of 2n x n vertices centred in it.
struct ScaleGeometry {
    BoxLattice box;
    Rect rect;
};

inline ScaleGeometry scale_geometry(int n) {
    if (n < 1) throw std::invalid_argument("scale n must be >= 1");
    BoxLattice box = build_box(2 * n + 2);
    const int y0 = 1 + n / 2;
    return {box, Rect{1, 2 * n, y0, y0 + n - 1}};
}

}  // namespace gfflab
