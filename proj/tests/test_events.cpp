#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "gfflab/events.hpp"
#include "oracles.hpp"

using namespace gfflab;

TEST(EventText, RoundTrip) {
    for (const char* text : {"always", "crossing:vertical", "crossing:horizontal@1,6,2,4", "disjoint:vertical:2",
                             "disjoint:horizontal:3@0,4,0,4", "connected:1,2:3,4", "dual:0,0:5,5",
                             "origin-boundary", "origin-boundary:7", "site:2,3", "sites:1,1;2,2;3,3"}) {
        EXPECT_EQ(format_event(parse_event(text)), text);
    }
    EXPECT_EQ(format_event(parse_event("crossing:h")), "crossing:horizontal");
}

TEST(EventText, RejectsMalformed) {
    for (const char* text : {"", "crossing", "crossing:up", "crossing:vertical@1,2,3", "connected:1,2", "dual:1:2:3",
                             "always@0,1,0,1", "site:1,1;2,2", "sites:1", "disjoint:vertical:x", "wobble",
                             "crossing:vertical@3,1,0,1"}) {
        EXPECT_THROW(parse_event(text), std::invalid_argument) << text;
    }
}

TEST(EventValidate, GeometryMustFit) {
    const BoxLattice box = build_box(6);
    EXPECT_NO_THROW(validate(parse_event("crossing:vertical@0,5,0,5"), box));
    EXPECT_THROW(validate(parse_event("crossing:vertical@0,6,0,5"), box), std::out_of_range);
    EXPECT_THROW(validate(parse_event("connected:0,0:6,6"), box), std::out_of_range);
    EXPECT_THROW(validate(parse_event("origin-boundary:9"), box), std::out_of_range);
    EXPECT_THROW(validate(parse_event("disjoint:vertical:-1"), box), std::invalid_argument);
    EXPECT_THROW(validate(parse_event("origin-boundary"), build_box(6, 5)), std::out_of_range);
}

TEST(EventCatalogue, OnlyDualConnectionIsDecreasing) {
    EXPECT_TRUE(is_increasing(parse_event("crossing:vertical")));
    EXPECT_TRUE(is_increasing(parse_event("site:1,1")));
    EXPECT_TRUE(is_increasing(parse_event("origin-boundary")));
    EXPECT_FALSE(is_increasing(parse_event("dual:1,1:2,2")));
}

TEST(EventEvaluate, AllOpenAndAllClosed) {
    const BoxLattice box = build_box(7);
    const LevelSet open(box, std::vector<char>(box.vertex_count(), 1));
    const LevelSet closed(box, std::vector<char>(box.vertex_count(), 0));
    for (const char* text : {"always", "crossing:vertical", "disjoint:horizontal:7", "connected:0,0:6,6",
                             "origin-boundary", "sites:3,3;1,5"})
        EXPECT_TRUE(evaluate(parse_event(text), open)) << text;
    for (const char* text : {"crossing:vertical", "disjoint:horizontal:1", "connected:0,0:6,6", "origin-boundary"})
        EXPECT_FALSE(evaluate(parse_event(text), closed)) << text;
    EXPECT_TRUE(evaluate(parse_event("dual:0,0:6,6"), closed));
    EXPECT_FALSE(evaluate(parse_event("dual:0,0:6,6"), open));
    EXPECT_TRUE(evaluate(parse_event("disjoint:vertical:0"), closed));
    EXPECT_TRUE(evaluate(parse_event("always"), closed));
}

TEST(SubBox, CentredAndChecked) {
    const BoxLattice box = build_box(9);
    const SubBox s = centred_subbox(box, 5);
    EXPECT_EQ(s.x_lo, 2);
    EXPECT_EQ(s.x_hi, 6);
    EXPECT_THROW(centred_subbox(box, 2), std::out_of_range);
    EXPECT_THROW(centred_subbox(box, 10), std::out_of_range);
    EXPECT_EQ(ring_vertices(s).size(), 8u);
}

TEST(OriginBoundary, MatchesBfsToRing) {
    std::mt19937_64 rng(4);
    std::bernoulli_distribution coin(0.6);
    const BoxLattice box = build_box(11);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<char> cfg(box.vertex_count());
        for (char& c : cfg) c = coin(rng);
        const LevelSet ls(box, cfg);
        const auto seen = oracle::bfs(box, box.bounds(), {box.origin()}, false,
                                      [&](Vertex v) { return cfg[box.index(v)] != 0; });
        for (int side : {3, 5, 7, 9, 11}) {
            bool want = false;
            for (Vertex v : ring_vertices(centred_subbox(box, side))) want = want || seen[box.index(v)];
            EXPECT_EQ(evaluate(event::OriginBoundary{side}, ls), want) << side;
        }
    }
}

TEST(DegenerateGeometry, FlagsZeroAreaRectangles) {
    const BoxLattice box = build_box(6);
    EXPECT_TRUE(degenerate_geometry(parse_event("crossing:vertical@2,2,0,5"), box));
    EXPECT_FALSE(degenerate_geometry(parse_event("crossing:vertical@2,3,0,5"), box));
    EXPECT_FALSE(degenerate_geometry(parse_event("always"), box));
}
