#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "tsqmc/lp.hpp"

using namespace tsqmc;

namespace {

// Random feasible, bounded standard-form LP: b = A y0 with y0 >= 0 and
// c = A^T pi0 + s with s >= 0, so both primal and dual are feasible.
LinearProgram random_standard_lp(std::mt19937_64& gen, std::size_t m, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
    auto lp = LinearProgram::nonnegative(m, n);
    std::vector<double> y0(n), pi0(m);
    for (auto& v : y0) v = pos(gen) < 0.4 ? 0.0 : pos(gen);
    for (auto& v : pi0) v = u(gen);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.a(i, j) = u(gen);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.rhs[i] += lp.a(i, j) * y0[j];
    for (std::size_t j = 0; j < n; ++j) {
        double s = pos(gen) < 0.3 ? 0.0 : pos(gen);
        for (std::size_t i = 0; i < m; ++i) s += lp.a(i, j) * pi0[i];
        lp.objective[j] = s;
    }
    return lp;
}

}  // namespace

TEST(SolveLp, TwoVariableExample) {
    auto lp = LinearProgram::nonnegative(1, 2);
    lp.objective = {1.0, 1.0};
    lp.a = Matrix{{1.0, -1.0}};
    lp.rhs = {1.0};
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 1.0, 1e-12);
    EXPECT_NEAR(s.x[0], 1.0, 1e-12);
    EXPECT_NEAR(s.x[1], 0.0, 1e-12);
}

TEST(SolveLp, StrikePriceRecourse) {
    auto lp = LinearProgram::nonnegative(1, 2);
    lp.objective = {1.0, 0.0};
    lp.a = Matrix{{1.0, -1.0}};
    lp.rhs = {2.0};
    const auto s = solve_lp(lp);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.value, 2.0, 1e-12);
    EXPECT_NEAR(s.duals[0], 1.0, 1e-12);
}

TEST(SolveLp, UnboundedWithoutRows) {
    auto lp = LinearProgram::nonnegative(0, 1);
    lp.objective = {-1.0};
    EXPECT_EQ(solve_lp(lp).status, LpStatus::unbounded);
}

TEST(SolveLp, Infeasible) {
    auto lp = LinearProgram::nonnegative(1, 2);
    lp.objective = {1.0, 1.0};
    lp.a = Matrix{{1.0, 1.0}};
    lp.rhs = {-1.0};
    EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);
}

TEST(SolveLp, BoundedVariablesAndFreeColumns) {
    // min -x0 - x1 + 0 x2, x0 + x1 + x2 = 3, x0 in [0, 1], x1 in [-2, 1.5], x2 free in [-inf, inf]... capped by x2 >= 0.2
    LinearProgram lp;
    lp.objective = {-1.0, -1.0, 0.0};
    lp.a = Matrix{{1.0, 1.0, 1.0}};
    lp.rhs = {3.0};
    lp.lower = {0.0, -2.0, 0.2};
    lp.upper = {1.0, 1.5, kInf};
    const auto s = solve_lp(lp);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.value, -2.5, 1e-12);
    EXPECT_LE(primal_residual(lp, s.x), 1e-10);
    EXPECT_LE(complementarity_gap(lp, s), 1e-9);
}

TEST(SolveLp, BealeCyclingExampleTerminates) {
    auto lp = LinearProgram::nonnegative(3, 7);
    lp.objective = {0.0, 0.0, 0.0, -0.75, 20.0, -0.5, 6.0};
    lp.a = Matrix{{1.0, 0.0, 0.0, 0.25, -8.0, -1.0, 9.0},
                  {0.0, 1.0, 0.0, 0.5, -12.0, -0.5, 3.0},
                  {0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0}};
    lp.rhs = {0.0, 0.0, 1.0};
    LpOptions opt;
    opt.bland_after = 0;  // Bland from the first pivot
    for (const auto& o : {opt, LpOptions{}}) {
        const auto s = solve_lp(lp, o);
        ASSERT_EQ(s.status, LpStatus::optimal);
        EXPECT_NEAR(s.value, -1.25, 1e-12);
        EXPECT_LE(s.pivots, 10u * 10u * 10u);
    }
}

TEST(SolveLp, RandomInstancesStrongDuality) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 7), n = m + 3 + static_cast<std::size_t>(trial % 11);
        const auto lp = random_standard_lp(gen, m, n);
        const auto s = solve_lp(lp);
        ASSERT_EQ(s.status, LpStatus::optimal) << "trial " << trial;
        double dual = 0.0;
        for (std::size_t i = 0; i < m; ++i) dual += lp.rhs[i] * s.duals[i];
        EXPECT_NEAR(s.value, dual, 1e-7 * (1.0 + std::abs(s.value))) << "trial " << trial;
        // dual feasibility: A^T pi <= c
        for (std::size_t j = 0; j < n; ++j) {
            double atpi = 0.0;
            for (std::size_t i = 0; i < m; ++i) atpi += lp.a(i, j) * s.duals[i];
            EXPECT_LE(atpi, lp.objective[j] + 1e-8);
        }
        EXPECT_LE(primal_residual(lp, s.x), 1e-8);
        EXPECT_LE(complementarity_gap(lp, s), 1e-7);
    }
}

TEST(SolveLp, RejectsMalformedInput) {
    auto lp = LinearProgram::nonnegative(1, 2);
    lp.objective = {1.0};
    EXPECT_THROW(solve_lp(lp), InvalidArgument);
    lp.objective = {1.0, std::nan("")};
    EXPECT_THROW(solve_lp(lp), InvalidArgument);
    lp.objective = {1.0, 1.0};
    lp.lower[0] = 2.0;
    lp.upper[0] = 1.0;
    EXPECT_THROW(solve_lp(lp), InvalidArgument);
}

TEST(LpDump, RoundTrip) {
    std::mt19937_64 gen(3);
    auto lp = random_standard_lp(gen, 3, 6);
    lp.upper[2] = 4.5;
    lp.lower[4] = -kInf;
    std::stringstream ss;
    dump_lp(ss, lp);
    const auto back = read_lp_dump(ss);
    EXPECT_EQ(back.objective, lp.objective);
    EXPECT_EQ(back.rhs, lp.rhs);
    EXPECT_EQ(back.lower, lp.lower);
    EXPECT_EQ(back.upper, lp.upper);
    EXPECT_EQ(max_abs_diff(back.a, lp.a), 0.0);
}

TEST(LpDump, RejectsGarbage) {
    std::istringstream in("LQ 1 1\n");
    EXPECT_THROW(read_lp_dump(in), InvalidArgument);
}
