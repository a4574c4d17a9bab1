#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gfflab/rng.hpp"

using namespace gfflab;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
    const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
    const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(StreamKey, DerivationIsDeterministicAndDistinct) {
    const StreamKey root(42);
    EXPECT_EQ(root.derive(3), derive(root, 3));
    EXPECT_EQ(root.derive(3).stream_id(), StreamKey(42).derive(3).stream_id());
    EXPECT_NE(root.derive(3).stream_id(), root.derive(4).stream_id());
    EXPECT_NE(root.derive(1).derive(2).stream_id(), root.derive(2).derive(1).stream_id());
    EXPECT_NE(root.stream_id(), root.derive(0).stream_id());
}

TEST(NormalStream, SameKeySameNumbers) {
    const auto a = next_standard_normals(StreamKey(7).derive(11), 257);
    const auto b = next_standard_normals(StreamKey(7).derive(11), 257);
    EXPECT_EQ(a, b);
    const auto c = next_standard_normals(StreamKey(8).derive(11), 257);
    EXPECT_NE(a, c);
}

TEST(NormalStream, PrefixStable) {
    const auto longer = next_standard_normals(StreamKey(5), 100);
    const auto shorter = next_standard_normals(StreamKey(5), 37);
    EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

TEST(NormalStream, UniformInHalfOpenUnit) {
    EXPECT_GT(NormalStream::to_unit(0), 0.0);
    EXPECT_EQ(NormalStream::to_unit(~std::uint64_t{0}), 1.0);
    NormalStream s(StreamKey(1));
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_uniform();
        EXPECT_GT(u, 0.0);
        EXPECT_LE(u, 1.0);
    }
}

TEST(NormalStream, MomentsMatchStandardNormal) {
    const std::size_t n = 400000;
    const auto z = next_standard_normals(StreamKey(2024), n);
    double m1 = 0, m2 = 0, m4 = 0;
    for (double v : z) {
        m1 += v;
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    // standard errors: 1/sqrt(n), sqrt(2/n), sqrt(96/n)
    EXPECT_LT(std::abs(m1), 4.0 / std::sqrt(double(n)));
    EXPECT_LT(std::abs(m2 - 1.0), 4.0 * std::sqrt(2.0 / n));
    EXPECT_LT(std::abs(m4 - 3.0), 4.0 * std::sqrt(96.0 / n));
}

TEST(NormalStream, KolmogorovSmirnov) {
    const std::size_t n = 20000;
    auto z = next_standard_normals(StreamKey(99).derive(1), n);
    std::sort(z.begin(), z.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        d = std::max({d, cdf - double(i) / n, double(i + 1) / n - cdf});
    }
    // 1% critical value 1.628 / sqrt(n)
    EXPECT_LT(d, 1.628 / std::sqrt(double(n)));
}

TEST(NormalStream, PairsAreUncorrelated) {
    const std::size_t n = 200000;
    const auto z = next_standard_normals(StreamKey(3), 2 * n);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += z[2 * i] * z[2 * i + 1];
    EXPECT_LT(std::abs(c / n), 4.0 / std::sqrt(double(n)));
}
