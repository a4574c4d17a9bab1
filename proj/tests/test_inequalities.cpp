#include <gtest/gtest.h>

#include <cmath>

#include "gfflab/inequalities.hpp"

using namespace gfflab;

TEST(Verdict, Thresholds) {
    EXPECT_EQ(verdict_for(0.0, 0.1), Verdict::holds);
    EXPECT_EQ(verdict_for(-0.2, 0.1), Verdict::violated_within_noise);
    EXPECT_EQ(verdict_for(-0.31, 0.1), Verdict::violated);
    EXPECT_STREQ(to_string(Verdict::violated_within_noise), "violated-within-noise");
}

TEST(Fkg, CataloguePairsHold) {
    const BoxLattice box = build_box(8);
    const GreenOperator g = build_green(box);
    const auto pairs = fkg_catalogue(box);
    ASSERT_EQ(pairs.size(), 5u);
    for (const auto& p : pairs) {
        const CheckReport r = check_fkg(g, 0.0, p.a, p.b, 5000, 17);
        EXPECT_NE(r.verdict, Verdict::violated) << r.labels.at("event_a");
        EXPECT_GE(r.margin, -3.0 * r.se);
        EXPECT_DOUBLE_EQ(r.margin, r.rhs - r.lhs);
    }
}

TEST(Fkg, IdenticalEventsGiveVariance) {
    const GreenOperator g = build_green(build_box(6));
    const auto a = parse_event("site:2,2");
    const CheckReport r = check_fkg(g, 0.0, a, a, 4000, 2);
    const double p = r.params.at("p_a");
    EXPECT_NEAR(r.margin, p * (1 - p), 1e-12);
}

TEST(Fkg, RejectsDecreasingEvents) {
    const GreenOperator g = build_green(build_box(6));
    EXPECT_THROW(check_fkg(g, 0.0, parse_event("dual:1,1:4,4"), parse_event("site:2,2"), 10, 1),
                 std::invalid_argument);
}

TEST(Lemma2, ClosedFormValues) {
    const CheckReport r = evaluate_lemma2(0.5, 0.0, 1, 1, 1.0, 0.0);
    EXPECT_NEAR(r.rhs, std::exp(-0.25), 1e-15);
    EXPECT_NEAR(r.margin, std::exp(-0.25) - 0.5, 1e-15);
    EXPECT_EQ(r.verdict, Verdict::holds);
    ASSERT_EQ(r.flags.size(), 1u);
    EXPECT_EQ(r.flags[0], "regime:N>=n");
}

TEST(Lemma2, EqualHeightsIsTrivial) {
    const CheckReport r = evaluate_lemma2(0.7, 0.01, 8, 8, 0.3, 0.3);
    EXPECT_DOUBLE_EQ(r.rhs, 1.0);
    EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Lemma2, SmallRatioRegimeFlagged) {
    const CheckReport r = evaluate_lemma2(0.3, 0.01, 10, 4, 1.0, 0.5);
    EXPECT_EQ(r.params.at("proof_regime"), 1.0);
    EXPECT_EQ(r.params.at("statement_regime"), 0.0);
    EXPECT_EQ(r.flags.back(), "regime:N/n<1/2");
}

TEST(Lemma2, RejectsReversedHeights) {
    EXPECT_THROW(evaluate_lemma2(0.5, 0.0, 1, 1, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(check_lemma2_bound(4, 4, 0.0, 1.0, 10, 1), std::invalid_argument);
}

TEST(Lemma2, PipelineRuns) {
    const CheckReport r = check_lemma2_bound(4, 8, 0.5, 0.0, 2000, 3);
    EXPECT_EQ(r.name, "lemma2");
    EXPECT_GE(r.lhs, 0.0);
    EXPECT_LE(r.lhs, 1.0);
    EXPECT_EQ(r.params.at("p_vc"), r.lhs);
}

TEST(Corollary2, ImpliedConstant) {
    const CheckReport r = evaluate_corollary2({0.8, 0.5, 0.5, 1000}, -2.0, -1.0);
    EXPECT_NEAR(r.params.at("implied_c"), std::log(0.4) / std::log(0.5), 1e-12);
    EXPECT_EQ(r.verdict, Verdict::holds);
    EXPECT_GT(r.se, 0.0);
    EXPECT_LT(r.params.at("implied_c_ci_lo"), r.params.at("implied_c"));
}

TEST(Corollary2, EdgeCases) {
    const CheckReport zero = evaluate_corollary2({0.0, 0.5, 0.3, 10}, -1.0, -0.5);
    EXPECT_EQ(zero.verdict, Verdict::holds);
    EXPECT_EQ(zero.flags.back(), "lhs-zero:holds-for-every-c");
    const CheckReport one = evaluate_corollary2({0.6, 0.5, 1.0, 10}, -1.0, -0.5);
    EXPECT_EQ(one.verdict, Verdict::holds);
    EXPECT_EQ(one.flags.back(), "base-one:rhs-equals-1");
    const CheckReport none = evaluate_corollary2({0.6, 0.5, 0.0, 10}, -1.0, -0.5);
    EXPECT_EQ(none.verdict, Verdict::violated);
    const CheckReport outside = evaluate_corollary2({0.6, 0.5, 0.5, 10}, -1.0, 0.5);
    EXPECT_EQ(outside.flags.front(), "outside-hypothesis:h1>=0");
    EXPECT_THROW(evaluate_corollary2({0.6, 0.5, 0.5, 10}, 0.0, 0.0), std::invalid_argument);
}

TEST(Corollary2, PipelineRuns) {
    const CheckReport r = check_corollary2(4, -0.5, 0.0, 1000, 5);
    EXPECT_EQ(r.name, "corollary2");
    EXPECT_GT(r.params.at("centres"), 0.0);
    EXPECT_GE(r.params.at("base"), 0.0);
    EXPECT_LE(r.params.at("base"), 1.0);
}

TEST(DualDecay, ResolvableDecay) {
    const DualDecayResult r = check_dual_decay(-0.25, 14, {1, 2, 3, 4}, 4000, 9);
    ASSERT_EQ(r.points.size(), 4u);
    for (std::size_t k = 1; k < r.points.size(); ++k) EXPECT_LE(r.points[k].p_hat, r.points[k - 1].p_hat + 0.05);
    EXPECT_EQ(r.report.name, "dual-decay");
}

TEST(DualDecay, VacuousWhenNothingIsClosed) {
    const DualDecayResult r = check_dual_decay(-50.0, 10, {2, 3, 4}, 200, 1);
    EXPECT_EQ(r.report.verdict, Verdict::holds);
    EXPECT_FALSE(r.fit.has_value());
    EXPECT_EQ(r.report.flags.back(), "holds-vacuously:decay-too-fast-to-resolve");
}

TEST(DualDecay, TargetOutsideBoxThrows) {
    EXPECT_THROW(check_dual_decay(-1.0, 8, {2, 9}, 10, 1), std::out_of_range);
    EXPECT_THROW(check_dual_decay(-1.0, 8, {}, 10, 1), std::invalid_argument);
}
