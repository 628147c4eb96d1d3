#include <gtest/gtest.h>

#include <random>

#include "tsqmc/points.hpp"
#include "tsqmc/problem_io.hpp"
#include "tsqmc/production_model.hpp"
#include "tsqmc/saa.hpp"

using namespace tsqmc;

namespace {

Matrix normal_scenarios(std::size_t n, std::size_t d, std::uint64_t seed, double mean = 0.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(mean, 1.0);
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = nd(gen);
    return m;
}

ProductionModelSpec tiny_spec(std::uint64_t seed) {
    ProductionModelSpec s;
    s.horizon = 3 + seed % 2;
    s.units = 1 + seed % 2;
    s.providers1 = 1;
    s.providers2 = 1;
    s.parameter_seed = seed;
    return s;
}

}  // namespace

TEST(Saa, StrikeModelPicksTheMedianScenario) {
    const auto p = strike_example();
    const auto xi = normal_scenarios(41, 1, 3, 2.0);
    // 0.5 x + mean (xi - x)^+ is piecewise linear with kinks at the scenarios
    double best = kInf;
    for (std::size_t i = 0; i < xi.rows(); ++i) {
        const double x = std::clamp(xi(i, 0), 0.0, 10.0);
        double v = 0.5 * x;
        for (std::size_t j = 0; j < xi.rows(); ++j) v += std::max(0.0, xi(j, 0) - x) / 41.0;
        best = std::min(best, v);
    }
    for (auto m : {SaaMethod::extensive, SaaMethod::l_shaped}) {
        const auto s = solve_saa(p, xi, m);
        EXPECT_NEAR(s.value, best, 1e-9) << to_string(m);
        const std::vector<double> x = s.x;
        EXPECT_NEAR(dot(p.c, x) + expected_recourse(p, x, xi), s.value, 1e-9);
    }
}

TEST(Saa, ExtensiveAndLShapedAgreeOnTinyInstances) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = generate_model(tiny_spec(seed));
        const std::size_t n = 4 + seed % 5;
        const auto pts = scramble_linear(n, p.d(), seed);
        const auto xi = to_gaussian(pts, p.factor, p.mean);
        const auto ext = solve_saa(p, xi, SaaMethod::extensive);
        LShapedOptions o;
        o.gap_tol = 1e-9;
        const auto ls = solve_saa(p, xi, SaaMethod::l_shaped, o);
        EXPECT_NEAR(ls.value, ext.value, 1e-6 * std::abs(ext.value)) << "seed " << seed;
        EXPECT_LE(p.x_set.violation(ls.x), 1e-8);
        EXPECT_LE(p.x_set.violation(ext.x), 1e-8);
        // the L-shaped point is optimal for the extensive objective too
        EXPECT_NEAR(dot(p.c, ls.x) + expected_recourse(p, ls.x, xi), ext.value, 1e-6 * std::abs(ext.value));
    }
}

TEST(Saa, TwoDimensionalExampleAgrees) {
    const auto p = smooth_example();
    const auto xi = normal_scenarios(30, 2, 8);
    const auto a = solve_saa(p, xi, SaaMethod::extensive);
    const auto b = solve_saa(p, xi, SaaMethod::l_shaped);
    EXPECT_NEAR(a.value, b.value, 1e-6 * (1.0 + std::abs(a.value)));
    EXPECT_EQ(a.iterations, 1u);
    EXPECT_GE(b.iterations, 1u);
}

TEST(Saa, RejectsBadScenarioMatrices) {
    const auto p = smooth_example();
    EXPECT_THROW(solve_saa(p, Matrix(0, 2), SaaMethod::extensive), InvalidArgument);
    EXPECT_THROW(solve_saa(p, Matrix(3, 3), SaaMethod::l_shaped), InvalidArgument);
    const std::vector<double> x{0.0, 0.0};
    EXPECT_THROW(expected_recourse(p, x, Matrix(2, 1)), InvalidArgument);
}
