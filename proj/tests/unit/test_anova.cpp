#include <gtest/gtest.h>

#include <cmath>

#include "tsqmc/anova.hpp"
#include "tsqmc/problem_io.hpp"
#include "tsqmc/recourse.hpp"

using namespace tsqmc;

namespace {

EstimatorOptions opts(std::size_t points = 4096, std::size_t reps = 10, std::uint64_t seed = 1) {
    EstimatorOptions o;
    o.points = points;
    o.replications = reps;
    o.seed = seed;
    return o;
}

// sum_j c_j (x_j - 1/2): additive with sigma_j^2 = c_j^2 / 12
CubeFunction additive(std::vector<double> c) {
    const std::size_t d = c.size();
    return {d, [c = std::move(c)](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * (x[j] - 0.5);
                return s;
            }};
}

// (2 x_1 - 1)(2 x_2 - 1): a pure interaction
CubeFunction centred_product() {
    return {2, [](std::span<const double> x) { return (2.0 * x[0] - 1.0) * (2.0 * x[1] - 1.0); }};
}

}  // namespace

// ---------------------------------------------------------------------------
// exhaustive decomposition

TEST(SmallAnova, AdditiveHasNoInteraction) {
    const auto t = anova_terms_small_d([](std::span<const double> x) { return x[0] + x[1]; }, 2);
    for (double v : t.term(0b11)) EXPECT_NEAR(v, 0.0, 1e-8);
    EXPECT_NEAR(t.variance(0b01), 1.0 / 12.0, 1e-12);
}

TEST(SmallAnova, ProductMean) {
    const auto t = anova_terms_small_d([](std::span<const double> x) { return x[0] * x[1]; }, 2);
    EXPECT_NEAR(t.mean(), 0.25, 1e-14);
    // sigma_1^2 = sigma_2^2 = 1/48, sigma_12^2 = 1/144
    EXPECT_NEAR(t.variance(0b01), 1.0 / 48.0, 1e-12);
    EXPECT_NEAR(t.variance(0b11), 1.0 / 144.0, 1e-12);
}

TEST(SmallAnova, TermsAreOrthogonalAndAddUp) {
    const Integrand f = [](std::span<const double> x) { return std::exp(x[0]) * std::sin(2.0 * x[1]) + x[2] * x[2] * x[0]; };
    const auto t = anova_terms_small_d(f, 3);
    double sum = 0.0;
    for (std::uint32_t u = 0; u < 8; ++u) {
        sum += t.variance(u);
        for (std::uint32_t v = 0; v < 8; ++v) {
            if (u != v) {
                EXPECT_LE(std::abs(t.inner(u, v)), 1e-8) << u << " " << v;
            }
        }
    }
    EXPECT_NEAR(sum, t.total_variance(), 1e-6 * t.total_variance());
    // and against an independent sampling estimate of the total variance
    const auto est = total_variance({3, f}, opts(1 << 14));
    EXPECT_NEAR(sum, est.variance.value, 1e-3 * sum + 3 * est.variance.se);
}

TEST(SmallAnova, GaussianGrid) {
    SmallAnovaOptions o;
    o.kind = QuadratureKind::gaussian;
    const auto t = anova_terms_small_d([](std::span<const double> z) { return z[0] + z[0] * z[1]; }, 2, o);
    EXPECT_NEAR(t.mean(), 0.0, 1e-12);
    EXPECT_NEAR(t.variance(0b01), 1.0, 1e-10);
    EXPECT_NEAR(t.variance(0b10), 0.0, 1e-10);
    EXPECT_NEAR(t.variance(0b11), 1.0, 1e-10);
    EXPECT_NEAR(t.mean_dimension(), 1.5, 1e-10);
}

TEST(SmallAnova, NonconvergenceIsReported) {
    const Integrand step = [](std::span<const double> x) { return x[0] < 0.3 ? 1.0 : 0.0; };
    EXPECT_THROW(anova_terms_small_d(step, 1), QuadratureNotConverged);
    EXPECT_THROW(anova_terms_small_d(step, 4), InvalidArgument);
}

// ---------------------------------------------------------------------------
// sampling estimators

TEST(TotalVariance, KnownMoments) {
    const auto c = total_variance({1, [](std::span<const double>) { return 3.0; }}, opts());
    EXPECT_NEAR(c.variance.value, 0.0, 1e-14);
    EXPECT_TRUE(c.zero);
    const auto u = total_variance({1, [](std::span<const double> x) { return x[0]; }}, opts());
    EXPECT_NEAR(u.variance.value, 1.0 / 12.0, 1e-4);
    EXPECT_FALSE(u.zero);
    const auto g = total_variance(gaussian_to_cube(1, [](std::span<const double> z) { return z[0]; }), opts());
    EXPECT_NEAR(g.variance.value, 1.0, 1e-2);
}

TEST(SobolIndices, SingleCoordinate) {
    const CubeFunction f{2, [](std::span<const double> x) { return x[0]; }};
    const std::size_t u1[] = {0}, u2[] = {1};
    EXPECT_NEAR(sobol_indices(f, u1, opts()).closed.value, 1.0, 1e-3);
    EXPECT_NEAR(sobol_indices(f, u2, opts()).total.value, 0.0, 1e-12);
}

TEST(SobolIndices, AdditiveClosedEqualsTotal) {
    const auto f = additive({1.0, 2.0, 3.0});
    for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t u[] = {j};
        const auto s = sobol_indices(f, u, opts());
        const double exact = (j + 1.0) * (j + 1.0) / 14.0;
        EXPECT_NEAR(s.closed.value, exact, 2e-3);
        EXPECT_NEAR(s.total.value, exact, 2e-3);
    }
}

TEST(SobolIndices, PureInteraction) {
    const auto f = centred_product();
    const std::size_t u1[] = {0}, u2[] = {1}, u12[] = {0, 1};
    EXPECT_NEAR(sobol_indices(f, u1, opts()).closed.value, 0.0, 5e-3);
    EXPECT_NEAR(sobol_indices(f, u2, opts()).closed.value, 0.0, 5e-3);
    EXPECT_NEAR(sobol_indices(f, u12, opts()).closed.value, 1.0, 5e-3);
    EXPECT_NEAR(sobol_indices(f, u1, opts()).total.value, 1.0, 5e-3);
}

TEST(SobolIndices, UnbiasedOverReplications) {
    // (x1 - 1/2) + 2 (x2 - 1/2) + 4 (x1 - 1/2)(x2 - 1/2): variances 1/12, 4/12, 1/9
    const CubeFunction f{2, [](std::span<const double> x) {
                             const double a = x[0] - 0.5, b = x[1] - 0.5;
                             return a + 2.0 * b + 4.0 * a * b;
                         }};
    const double total = 1.0 / 12.0 + 4.0 / 12.0 + 1.0 / 9.0;
    for (auto sampler : {EstimatorSampler::sobol, EstimatorSampler::mc}) {
        auto o = opts(512, 30, 7);
        o.sampler = sampler;
        const std::size_t u1[] = {0};
        const auto s = sobol_indices(f, u1, o);
        EXPECT_NEAR(s.closed.value, (1.0 / 12.0) / total, 3.0 * s.closed.se + 1e-3);
        EXPECT_NEAR(s.total.value, (1.0 / 12.0 + 1.0 / 9.0) / total, 3.0 * s.total.se + 1e-3);
    }
}

TEST(SobolIndices, Errors) {
    const CubeFunction c{2, [](std::span<const double>) { return 1.0; }};
    const std::size_t u[] = {0}, bad[] = {2};
    EXPECT_THROW(sobol_indices(c, u, opts()), ZeroVariance);
    EXPECT_THROW(sobol_indices(additive({1.0, 1.0}), bad, opts()), InvalidArgument);
    EXPECT_THROW(sobol_indices(additive({1.0, 1.0}), u, opts(4096, 1)), InvalidArgument);
}

TEST(MeanDimension, AdditiveIsOne) {
    const auto e = mean_dimension(additive({1.0, 0.5, 0.25, 2.0}), opts());
    EXPECT_NEAR(e.value, 1.0, 0.02);
}

TEST(MeanDimension, ProductAgainstExhaustiveOracle) {
    const Integrand f = [](std::span<const double> x) { return x[0] * x[1]; };
    const double exact = anova_terms_small_d(f, 2).mean_dimension();  // (2/48 + 2/144) / (2/48 + 1/144)
    EXPECT_NEAR(exact, 8.0 / 7.0, 1e-12);
    const auto e = mean_dimension({2, f}, opts(1024, 20, 3));
    EXPECT_NEAR(e.value, exact, 3.0 * e.se + 1e-4);
}

TEST(MeanDimension, OneDimensional) {
    const auto e = mean_dimension({1, [](std::span<const double> x) { return x[0] * x[0]; }}, opts());
    EXPECT_EQ(e.value, 1.0);
}

TEST(TruncationDimension, DecayingAdditive) {
    const std::size_t d = 10;
    std::vector<double> c(d), var(d);
    for (std::size_t j = 0; j < d; ++j) {
        c[j] = 1.0 / ((j + 1.0) * (j + 1.0));  // sigma_j^2 proportional to j^-4
        var[j] = c[j] * c[j];
    }
    const double total = std::accumulate(var.begin(), var.end(), 0.0);
    std::size_t analytic = d;
    for (std::size_t s = 1; s <= d; ++s) {
        const double tail = std::accumulate(var.begin() + static_cast<std::ptrdiff_t>(s), var.end(), 0.0);
        if (tail / total <= 0.01) {
            analytic = s;
            break;
        }
    }
    EXPECT_EQ(analytic, 3u);
    const auto r = truncation_dimension(additive(c), 0.01, opts());
    EXPECT_EQ(r.dimension, analytic);
    EXPECT_FALSE(r.widened);
}

TEST(TruncationDimension, OnlyFirstCoordinate) {
    const CubeFunction f{5, [](std::span<const double> x) { return std::sin(6.0 * x[0]); }};
    for (double eps : {0.001, 0.01, 0.5}) EXPECT_EQ(truncation_dimension(f, eps, opts()).dimension, 1u);
    EXPECT_THROW(truncation_dimension(f, 0.0, opts()), InvalidArgument);
}

TEST(TruncationDimension, LeadingBlockVarianceIsMonotone) {
    const CubeFunction f{6, [](std::span<const double> x) {
                             return x[0] * x[3] + std::exp(x[1]) - x[2] * x[5] + 0.3 * x[4];
                         }};
    const auto o = opts(2048);
    auto prev = detail::truncation_tail(f, 1, o);
    for (std::size_t s = 2; s <= 6; ++s) {
        const auto e = detail::truncation_tail(f, s, o);
        EXPECT_LE(e.value, prev.value + 2.0 * std::hypot(e.se, prev.se)) << "s=" << s;
        prev = e;
    }
    EXPECT_NEAR(prev.value, 0.0, 1e-14);
}

TEST(Superposition, Additive) {
    const auto p = superposition_profile(additive({1.0, 2.0, 0.5}), 0.01, opts());
    EXPECT_NEAR(p.order1.value, 1.0, 5e-3);
    EXPECT_TRUE(p.order1_certified);
    for (const auto& pr : p.pairs) EXPECT_NEAR(pr.share.value, 0.0, 5e-3);
}

TEST(Superposition, PureInteraction) {
    const auto p = superposition_profile(centred_product(), 0.01, opts());
    EXPECT_NEAR(p.order1.value, 0.0, 5e-3);
    ASSERT_EQ(p.pairs.size(), 1u);
    EXPECT_NEAR(p.pairs[0].share.value, 1.0, 5e-3);
    EXPECT_NEAR(p.order12.value, 1.0, 5e-3);
    EXPECT_FALSE(p.order1_certified);
    EXPECT_TRUE(p.order12_certified);
}

TEST(DimensionReport, InvariantsAndJson) {
    const CubeFunction f{4, [](std::span<const double> x) { return x[0] * x[1] + x[2] + 0.1 * x[3] * x[0]; }};
    const auto o = opts(2048);
    const auto r = dimension_report(f, 0.01, o);
    EXPECT_GE(r.mean_dimension.value, 1.0 - 3 * r.mean_dimension.se);
    EXPECT_LE(r.mean_dimension.value, 4.0);
    std::size_t prev = f.dim;
    for (double eps : {0.001, 0.01, 0.05, 0.2, 0.5}) {
        const auto t = truncation_dimension(f, eps, o).dimension;
        EXPECT_LE(t, prev) << "eps=" << eps;
        prev = t;
    }
    const auto j = to_json(r);
    EXPECT_TRUE(j["mean_dimension"].contains("se"));
    EXPECT_TRUE(j["total_variance"].contains("se"));
    EXPECT_EQ(j["first_order"].size(), 4u);
    EXPECT_EQ(j["first_order"][0]["index"], 1);
    EXPECT_TRUE(j["order12_ratio"].contains("se"));
}

TEST(Transform, GaussianAndCubeAgree) {
    const Integrand f = [](std::span<const double> z) { return z[0] + 0.5 * z[0] * z[1] + 0.3 * z[1] * z[1]; };
    SmallAnovaOptions so;
    so.kind = QuadratureKind::gaussian;
    const double exact = anova_terms_small_d(f, 2, so).mean_dimension();
    const auto e = mean_dimension(gaussian_to_cube(2, f), opts(4096, 20, 9));
    EXPECT_NEAR(e.value, exact, 3.0 * e.se + 2e-3);
}

TEST(Sensitivity, EstimatedTotalsRespectTheVertexBound) {
    const auto p = smooth_example();
    const std::vector<double> x{0.0, 0.0};
    const auto spec = IntegrandSpec::from_problem(p, x);
    const auto g = gaussian_to_cube(2, [&spec](std::span<const double> z) { return spec(z); });
    const auto var = total_variance(g, opts(1 << 16, 4));
    const std::vector<double> marg{1.0, 1.0};
    const auto bounds = sensitivity_upper_bounds(spec.vertices, marg, var.variance.value);
    EXPECT_NEAR(bounds.total_index[0] * var.variance.value, 4.0, 1e-12);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t u[] = {i};
        const auto s = sobol_indices(g, u, opts(4096, 10, 5));
        EXPECT_LE(s.total.value, bounds.total_index[i] + 3.0 * s.total.se);
    }
    const auto md = mean_dimension(g, opts());
    EXPECT_LE(md.value, bounds.mean_dimension + 3.0 * md.se);
}
