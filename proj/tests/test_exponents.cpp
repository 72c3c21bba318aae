#include <gtest/gtest.h>

#include <algorithm>

#include "imethod/exponents.hpp"

using namespace imethod;

namespace {

bool all_true(const std::array<bool, 5>& a) {
    return std::all_of(a.begin(), a.end(), [](bool b) { return b; });
}

Rational q(long long num, long long den = 1) { return Rational(num, den); }

}  // namespace

TEST(ParseRational, FormsAndErrors) {
    EXPECT_EQ(parse_rational("7"), q(7));
    EXPECT_EQ(parse_rational(" -3/2 "), q(-3, 2));
    EXPECT_EQ(parse_rational("2.75"), q(11, 4));
    EXPECT_EQ(parse_rational("-0.5"), q(-1, 2));
    EXPECT_EQ(to_string(q(6, 4)), "3/2");
    EXPECT_EQ(to_string(q(4, 2)), "2");
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
    EXPECT_THROW(parse_rational("1e3"), std::invalid_argument);
}

TEST(CheckSubcritical, TableValues) {
    const auto a = check_subcritical(3, q(3));
    EXPECT_TRUE(a.h1_subcritical);
    EXPECT_FALSE(a.l2_subcritical);
    EXPECT_EQ(a.s_c, q(1, 2));
    const auto b = check_subcritical(2, q(3));
    EXPECT_TRUE(b.h1_subcritical);
    EXPECT_FALSE(b.l2_subcritical);
    EXPECT_EQ(b.s_c, q(0));
    const auto c = check_subcritical(1, q(3));
    EXPECT_TRUE(c.l2_subcritical);
    EXPECT_EQ(c.s_c, q(-1, 2));
    EXPECT_EQ(check_subcritical(1, q(5)).s_c, q(0));
    EXPECT_FALSE(check_subcritical(3, q(5)).h1_subcritical);
    EXPECT_THROW(check_subcritical(1, q(1)), std::invalid_argument);
}

TEST(SolveExponents, QuinticLine) {
    const auto e = solve_exponents(1, q(5));
    EXPECT_EQ(e.beta, q(3, 4));
    EXPECT_EQ(e.r0, q(7));
    EXPECT_EQ(e.q0, q(56, 3));
    EXPECT_EQ(e.r1, q(14, 3));
    EXPECT_EQ(e.q1, q(7));
    EXPECT_TRUE(all_true(verify_exponents(e)));
    EXPECT_TRUE(exponents_in_range(e));
}

TEST(VerifyExponents, AlternativeQuinticTuple) {
    // Another admissible tuple for n = 1, p = 5.
    const StrichartzExponents e{1, q(5), q(3, 4), q(16), q(8), q(8), q(4)};
    EXPECT_TRUE(all_true(verify_exponents(e)));
    EXPECT_TRUE(exponents_in_range(e));
    EXPECT_TRUE(r1_bound_holds(e));
    EXPECT_TRUE(dual_identity_holds(e));
}

TEST(VerifyExponents, PerturbedR0BreaksSpaceRelations) {
    auto e = solve_exponents(1, q(5));
    e.r0 += 1;
    const auto rel = verify_exponents(e);
    EXPECT_TRUE(rel[0]);
    EXPECT_FALSE(rel[1]);  // scaling-beta
    EXPECT_FALSE(rel[2]);  // gap-space
}

TEST(VerifyExponents, DegenerateTupleFails) {
    const StrichartzExponents e{2, q(3), q(1, 2), q(2), q(2), q(2), q(2)};
    const auto rel = verify_exponents(e);
    EXPECT_GE(std::count(rel.begin(), rel.end(), false), 2);
    EXPECT_FALSE(exponents_in_range(e));
}

TEST(SolveExponents, PlaneCubic) {
    const auto e = solve_exponents(2, q(3));
    EXPECT_TRUE(all_true(verify_exponents(e)));
    EXPECT_TRUE(exponents_in_range(e));
    EXPECT_EQ(e.r0, q(5));
    EXPECT_EQ(e.q0, q(20));
}

TEST(SolveExponents, RejectsH1CriticalPower) {
    EXPECT_THROW(solve_exponents(3, q(5)), std::domain_error);
    EXPECT_THROW(solve_exponents(4, q(3)), std::domain_error);
}

TEST(SolveExponents, HighDimensionsUseFractionalR0) {
    for (auto [n, p] : {std::pair{4, q(5, 2)}, std::pair{5, q(11, 5)}}) {
        const auto e = solve_exponents(n, p);
        EXPECT_TRUE(all_true(verify_exponents(e))) << n;
        EXPECT_TRUE(exponents_in_range(e)) << n;
        EXPECT_TRUE(r1_bound_holds(e));
        EXPECT_TRUE(dual_identity_holds(e));
    }
}

TEST(SolveExponents, SweepOfSubcriticalPowers) {
    int checked = 0;
    for (int n = 1; n <= 3; ++n) {
        for (int k = 1; k <= 200; ++k) {
            // n = 1, 2: p in (1, 11]; n = 3: p in (1, 5)
            const Rational p = n < 3 ? q(1) + q(k, 20) : q(1) + q(4 * k, 201);
            const auto e = solve_exponents(n, p);
            ASSERT_TRUE(all_true(verify_exponents(e))) << "n = " << n << " p = " << to_string(p);
            ASSERT_TRUE(exponents_in_range(e));
            ASSERT_TRUE(r1_bound_holds(e));
            ASSERT_TRUE(dual_identity_holds(e));
            ++checked;
        }
    }
    EXPECT_EQ(checked, 600);
}

TEST(ExponentReport, KeyValueLines) {
    const auto text = exponent_report(solve_exponents(1, q(5)));
    EXPECT_NE(text.find("q0 = 56/3\n"), std::string::npos);
    EXPECT_NE(text.find("relation.gap-space = true\n"), std::string::npos);
    EXPECT_NE(text.find("dual_identity = true\n"), std::string::npos);
    // s_c = 0 here, so the only false line is the L2 flag
    EXPECT_NE(text.find("l2_subcritical = false\n"), std::string::npos);
    EXPECT_EQ(text.find("false"), text.rfind("false"));
}
