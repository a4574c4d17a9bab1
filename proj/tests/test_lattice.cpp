#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <utility>

#include "gfflab/lattice.hpp"

using namespace gfflab;

TEST(BoxLattice, CountsInteriorAndBoundary) {
    for (int n = 1; n <= 9; ++n) {
        const BoxLattice box = build_box(n);
        const auto interior = box.interior();
        const auto boundary = box.boundary();
        EXPECT_EQ(interior.size() + boundary.size(), box.vertex_count());
        EXPECT_EQ(interior.size(), box.interior_count());
        const std::size_t expected = n >= 3 ? std::size_t((n - 2) * (n - 2)) : 0;
        EXPECT_EQ(interior.size(), expected);
        for (Vertex v : interior) EXPECT_TRUE(box.is_interior(v));
        for (Vertex v : boundary) EXPECT_TRUE(box.on_boundary(v));
    }
}

TEST(BoxLattice, RejectsEmptyBox) {
    EXPECT_THROW(build_box(0), std::invalid_argument);
    EXPECT_THROW(build_box(-3), std::invalid_argument);
    EXPECT_THROW(build_box(4, 0), std::invalid_argument);
}

TEST(BoxLattice, IndexRoundTrip) {
    const BoxLattice box(7, 4);
    for (std::size_t i = 0; i < box.vertex_count(); ++i) EXPECT_EQ(box.index(box.vertex(i)), i);
    EXPECT_EQ(box.index({0, 1}), 7u);
}

TEST(BoxLattice, OriginIsCentral) {
    EXPECT_EQ(build_box(5).origin(), (Vertex{2, 2}));
    EXPECT_EQ(build_box(6).origin(), (Vertex{2, 2}));
    EXPECT_EQ(build_box(4, 3).origin(), (Vertex{1, 1}));
}

TEST(Neighbors, PrimalDegreeAndSymmetry) {
    const BoxLattice box = build_box(5);
    for (Vertex v : box.vertices()) {
        const auto nb = primal_neighbors(box, v);
        const int expected = 4 - (v.x == 0) - (v.x == 4) - (v.y == 0) - (v.y == 4);
        EXPECT_EQ(int(nb.size()), expected);
        for (Vertex u : nb) {
            const auto back = primal_neighbors(box, u);
            EXPECT_NE(std::find(back.begin(), back.end(), v), back.end());
            EXPECT_EQ(std::abs(u.x - v.x) + std::abs(u.y - v.y), 1);
        }
    }
}

TEST(Neighbors, DualIsChebyshevBall) {
    const BoxLattice box = build_box(6);
    for (Vertex v : box.vertices()) {
        std::set<std::pair<int, int>> got;
        for (Vertex u : dual_neighbors(box, v)) got.insert({u.x, u.y});
        std::set<std::pair<int, int>> want;
        for (Vertex u : box.vertices())
            if (chebyshev(u, v) == 1) want.insert({u.x, u.y});
        EXPECT_EQ(got, want);
    }
}

TEST(Neighbors, OutsideVertexThrows) {
    const BoxLattice box = build_box(3);
    EXPECT_THROW(primal_neighbors(box, {3, 0}), std::out_of_range);
    EXPECT_THROW(dual_neighbors(box, {-1, 1}), std::out_of_range);
}

TEST(Rect, DegenerateAndContainment) {
    EXPECT_TRUE((Rect{2, 2, 0, 5}).degenerate());
    EXPECT_TRUE((Rect{0, 5, 3, 3}).degenerate());
    EXPECT_FALSE((Rect{0, 1, 0, 1}).degenerate());
    const BoxLattice box = build_box(6);
    EXPECT_TRUE(box.contains(Rect{0, 5, 0, 5}));
    EXPECT_FALSE(box.contains(Rect{0, 6, 0, 5}));
    EXPECT_THROW(require_rect_in_box(box, Rect{1, 2, 4, 7}), std::out_of_range);
}

TEST(ScaleGeometry, RectIsTwoByOneInsideInterior) {
    for (int n = 1; n <= 20; ++n) {
        const ScaleGeometry g = scale_geometry(n);
        EXPECT_EQ(g.box.width(), 2 * n + 2);
        EXPECT_EQ(g.rect.width(), 2 * n);
        EXPECT_EQ(g.rect.height(), n);
        for (Vertex v : {Vertex{g.rect.x0, g.rect.y0}, Vertex{g.rect.x1, g.rect.y1}})
            EXPECT_TRUE(g.box.is_interior(v));
    }
}

TEST(StandardRect, FitsInterior) {
    const BoxLattice box = build_box(10);
    const Rect r = standard_rect(box);
    EXPECT_EQ(r.width(), 8);
    EXPECT_EQ(r.height(), 4);
    EXPECT_TRUE(box.is_interior({r.x0, r.y0}));
    EXPECT_TRUE(box.is_interior({r.x1, r.y1}));
}

TEST(Direction, ParsesShortAndLongNames) {
    EXPECT_EQ(parse_direction("h"), Direction::horizontal);
    EXPECT_EQ(parse_direction("vertical"), Direction::vertical);
    EXPECT_THROW(parse_direction("diagonal"), std::invalid_argument);
}
