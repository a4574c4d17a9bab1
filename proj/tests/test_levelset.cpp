#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "gfflab/levelset.hpp"
#include "oracles.hpp"

using namespace gfflab;

namespace {

std::vector<char> random_config(const BoxLattice& box, std::mt19937_64& rng, double p = 0.55) {
    std::bernoulli_distribution open(p);
    std::vector<char> c(box.vertex_count());
    for (char& v : c) v = open(rng) ? 1 : 0;
    return c;
}

LevelSet from_pattern(int w, int h, std::uint32_t bits) {
    const BoxLattice box(w, h);
    std::vector<char> open(box.vertex_count());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) open[box.index({x, y})] = (bits >> (y * w + x)) & 1u;
    return LevelSet(box, std::move(open));
}

}  // namespace

TEST(DisjointSet, UniteAndFind) {
    DisjointSet ds(6);
    EXPECT_TRUE(ds.unite(0, 1));
    EXPECT_TRUE(ds.unite(2, 3));
    EXPECT_FALSE(ds.unite(1, 0));
    EXPECT_TRUE(ds.same(0, 1));
    EXPECT_FALSE(ds.same(1, 2));
    ds.unite(1, 3);
    EXPECT_TRUE(ds.same(0, 2));
    EXPECT_FALSE(ds.same(4, 5));
}

TEST(FlowNetwork, SmallNetwork) {
    FlowNetwork net(4);
    net.add_edge(0, 1, 3);
    net.add_edge(0, 2, 2);
    net.add_edge(1, 2, 1);
    net.add_edge(1, 3, 2);
    net.add_edge(2, 3, 3);
    EXPECT_EQ(net.max_flow(0, 3), 5);
}

TEST(Threshold, OpenIffAtLeastHeight) {
    const BoxLattice box(3, 1);
    const std::vector<double> heights{-1.0, 0.0, 1.0};
    const LevelSet ls = threshold(box, heights, 0.0);
    EXPECT_FALSE(ls.is_open({0, 0}));
    EXPECT_TRUE(ls.is_open({1, 0}));
    EXPECT_TRUE(ls.is_open({2, 0}));
    EXPECT_EQ(ls.open_count(), 2u);
    EXPECT_EQ(ls.height(), 0.0);
}

TEST(Threshold, BoundaryFollowsZeroConvention) {
    const GreenOperator g = build_green(build_box(5));
    const FieldSample s = sample(g, StreamKey(1));
    EXPECT_EQ(threshold(s, 0.0).open_count() >= 16, true);
    EXPECT_EQ(threshold(s, 1e-9).is_open({0, 0}), false);
    EXPECT_EQ(threshold(s, -1e-9).is_open({0, 0}), true);
}

TEST(Connectivity, UnionFindMatchesBfs) {
    std::mt19937_64 rng(11);
    const BoxLattice box = build_box(8);
    for (int trial = 0; trial < 300; ++trial) {
        const auto cfg = random_config(box, rng);
        const LevelSet ls(box, cfg);
        for (int q = 0; q < 40; ++q) {
            const Vertex a = box.vertex(rng() % box.vertex_count());
            const Vertex b = box.vertex(rng() % box.vertex_count());
            EXPECT_EQ(connected(ls, a, b), oracle::connected(box, cfg, a, b));
        }
    }
}

TEST(Connectivity, DualUsesEightNeighbours) {
    // closed diagonal pair is *-connected but the open anti-diagonal is not connected
    const LevelSet ls = from_pattern(2, 2, 0b0110);
    EXPECT_TRUE(dual_connected(ls, {0, 0}, {1, 1}));
    EXPECT_FALSE(connected(ls, {1, 0}, {0, 1}));
    EXPECT_FALSE(dual_connected(ls, {1, 0}, {0, 0}));
}

TEST(Cluster, MatchesBfsAndRadius) {
    std::mt19937_64 rng(5);
    const BoxLattice box = build_box(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto cfg = random_config(box, rng);
        const LevelSet ls(box, cfg);
        const Vertex x = box.origin();
        const ClusterReport rep = cluster_of(ls, x);
        if (!cfg[box.index(x)]) {
            EXPECT_EQ(rep.size, 0u);
            continue;
        }
        const auto seen = oracle::bfs(box, box.bounds(), {x}, false, [&](Vertex v) { return cfg[box.index(v)] != 0; });
        std::size_t count = 0;
        int radius = 0;
        for (Vertex v : box.vertices())
            if (seen[box.index(v)]) {
                ++count;
                radius = std::max(radius, chebyshev(v, x));
            }
        EXPECT_EQ(rep.size, count);
        EXPECT_EQ(rep.radius, radius);
    }
}

TEST(Crossing, MatchesBfsInsideRectangles) {
    std::mt19937_64 rng(21);
    const BoxLattice box(10, 7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto cfg = random_config(box, rng, 0.5);
        const LevelSet ls(box, cfg);
        std::vector<char> closed(cfg.size());
        for (std::size_t i = 0; i < cfg.size(); ++i) closed[i] = !cfg[i];
        const int x0 = int(rng() % 5), y0 = int(rng() % 3);
        const Rect r{x0, x0 + 2 + int(rng() % 4), y0, y0 + 1 + int(rng() % 4)};
        for (Direction d : {Direction::horizontal, Direction::vertical}) {
            EXPECT_EQ(crossing(ls, r, d), oracle::side_crossing(box, r, d, false, cfg));
            EXPECT_EQ(dual_crossing(ls, r, d), oracle::side_crossing(box, r, d, true, closed));
        }
    }
}

TEST(Crossing, DegenerateRectangleNeverCrosses) {
    const BoxLattice box = build_box(5);
    const LevelSet ls(box, std::vector<char>(box.vertex_count(), 1));
    EXPECT_FALSE(crossing(ls, Rect{2, 2, 0, 4}, Direction::vertical));
    EXPECT_FALSE(crossing(ls, Rect{0, 4, 1, 1}, Direction::horizontal));
    EXPECT_EQ(count_disjoint_crossings(ls, Rect{2, 2, 0, 4}, Direction::vertical), 0);
    EXPECT_TRUE(crossing(ls, Rect{0, 4, 0, 4}, Direction::vertical));
    EXPECT_THROW(crossing(ls, Rect{0, 5, 0, 4}, Direction::vertical), std::out_of_range);
}

TEST(Duality, HorizontalOpenXorVerticalClosedStar) {
    std::mt19937_64 rng(77);
    const BoxLattice box(12, 8);
    for (int trial = 0; trial < 2000; ++trial) {
        const LevelSet ls(box, random_config(box, rng, 0.5));
        const bool open_h = crossing(ls, box.bounds(), Direction::horizontal);
        const bool closed_v = dual_crossing(ls, box.bounds(), Direction::vertical);
        EXPECT_NE(open_h, closed_v);
    }
}

TEST(DisjointCrossings, ExhaustiveThreeByThree) {
    for (std::uint32_t bits = 0; bits < (1u << 9); ++bits) {
        const LevelSet ls = from_pattern(3, 3, bits);
        for (Direction d : {Direction::horizontal, Direction::vertical})
            EXPECT_EQ(count_disjoint_crossings(ls, ls.box().bounds(), d), oracle::disjoint_crossings(3, 3, bits, d))
                << bits;
    }
}

TEST(DisjointCrossings, RandomFourByFive) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const auto bits = static_cast<std::uint32_t>(rng() & ((1u << 20) - 1));
        const LevelSet ls = from_pattern(4, 5, bits);
        for (Direction d : {Direction::horizontal, Direction::vertical})
            EXPECT_EQ(count_disjoint_crossings(ls, ls.box().bounds(), d), oracle::disjoint_crossings(4, 5, bits, d));
    }
}

TEST(DisjointCrossings, AllOpenEqualsSideLength) {
    const BoxLattice box(6, 4);
    const LevelSet ls(box, std::vector<char>(box.vertex_count(), 1));
    EXPECT_EQ(count_disjoint_crossings(ls, box.bounds(), Direction::vertical), 6);
    EXPECT_EQ(count_disjoint_crossings(ls, box.bounds(), Direction::horizontal), 4);
}

TEST(CrossingThreshold, AgreesWithThresholding) {
    const BoxLattice box = build_box(12);
    const GreenOperator g = build_green(box);
    const Rect r{1, 10, 3, 8};
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> grid = sample(g, StreamKey(8).derive(k)).to_grid();
        for (Direction d : {Direction::horizontal, Direction::vertical}) {
            const double t = crossing_threshold(box, grid, r, d);
            EXPECT_TRUE(crossing(threshold(box, grid, t), r, d));
            EXPECT_FALSE(crossing(threshold(box, grid, std::nextafter(t, 1e300)), r, d));
        }
    }
}

TEST(Bottleneck, AgreesWithConnectivity) {
    const BoxLattice box = build_box(10);
    const GreenOperator g = build_green(box);
    for (int k = 0; k < 30; ++k) {
        const std::vector<double> grid = sample(g, StreamKey(9).derive(k)).to_grid();
        const std::vector<double> best = bottleneck_from(box, grid, box.origin());
        for (double h : {-0.5, 0.0, 0.3}) {
            const LevelSet ls = threshold(box, grid, h);
            for (Vertex v : box.vertices()) EXPECT_EQ(best[box.index(v)] >= h, connected(ls, box.origin(), v));
        }
    }
}

TEST(Monotonicity, IncreasingQueriesAcrossHeights) {
    const BoxLattice box = build_box(10);
    const GreenOperator g = build_green(box);
    const Rect r = standard_rect(box);
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> grid = sample(g, StreamKey(13).derive(k)).to_grid();
        bool prev_cross = true;
        int prev_count = 1 << 20;
        for (double h = -2.0; h <= 2.0; h += 0.25) {
            const LevelSet ls = threshold(box, grid, h);
            const bool c = crossing(ls, r, Direction::horizontal);
            const int n = count_disjoint_crossings(ls, r, Direction::vertical);
            EXPECT_TRUE(prev_cross || !c);
            EXPECT_LE(n, prev_count);
            prev_cross = c;
            prev_count = n;
        }
    }
}

TEST(GridIo, RoundTrip) {
    std::mt19937_64 rng(1);
    const BoxLattice box(7, 4);
    const LevelSet ls(box, random_config(box, rng));
    std::stringstream buf;
    write_grid(buf, ls);
    const LevelSet back = read_grid(buf);
    EXPECT_EQ(back.box(), box);
    for (Vertex v : box.vertices()) EXPECT_EQ(back.is_open(v), ls.is_open(v));
    std::stringstream bad("010\n01\n");
    EXPECT_THROW(read_grid(bad), std::invalid_argument);
}
