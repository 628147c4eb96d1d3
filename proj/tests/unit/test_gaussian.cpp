#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "tsqmc/gaussian.hpp"
#include "tsqmc/points.hpp"

using namespace tsqmc;

namespace {

// Quantile by bisection on the extended-precision complementary error function.
double quantile_oracle(double u) {
    long double lo = -40.0L, hi = 40.0L;
    const long double target = u;
    for (int it = 0; it < 200 && hi - lo > 1e-18L; ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double cdf = 0.5L * std::erfc(-mid / std::sqrt(2.0L));
        (cdf < target ? lo : hi) = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace

TEST(InvNormCdf, CentreAndKnownQuantile) {
    EXPECT_EQ(inv_norm_cdf(0.5), 0.0);
    EXPECT_NEAR(inv_norm_cdf(0.975), 1.959964, 1e-5);
}

TEST(InvNormCdf, Antisymmetric) {
    for (double u = 0.001; u < 0.5; u += 0.0137) EXPECT_NEAR(inv_norm_cdf(u), -inv_norm_cdf(1.0 - u), 1e-12) << u;
}

TEST(InvNormCdf, MoroAccuracyAgainstOracle) {
    const int n = 100000;
    const double a = 1e-6, b = 1.0 - 1e-6;
    double worst = 0.0, at = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = a + (b - a) * k / (n - 1);
        const double err = std::abs(inv_norm_cdf(u) - quantile_oracle(u));
        if (err > worst) {
            worst = err;
            at = u;
        }
    }
    EXPECT_LE(worst, 3e-9) << "at u = " << at;
}

TEST(InvNormCdf, StrictlyIncreasingAndRoundTrips) {
    double prev = -1e300;
    for (int k = 1; k < 100000; ++k) {
        const double u = k / 100000.0;
        const double x = inv_norm_cdf(u);
        EXPECT_GT(x, prev);
        prev = x;
        EXPECT_NEAR(norm_cdf(x), u, 1e-8);
    }
}

TEST(InvNormCdf, RejectsBoundary) {
    EXPECT_THROW(inv_norm_cdf(0.0), InvalidArgument);
    EXPECT_THROW(inv_norm_cdf(1.0), InvalidArgument);
}

TEST(NormCdf, ValuesAndDensity) {
    EXPECT_EQ(norm_cdf(0.0), 0.5);
    EXPECT_NEAR(norm_pdf(0.0), 0.3989422804, 1e-9);
    EXPECT_NEAR(norm_cdf(1.0) - norm_cdf(-1.0), 0.6826894921370859, 1e-12);
    EXPECT_NEAR(norm_sf(3.0), 1.3498980316300946e-3, 1e-15);
}

TEST(PartialMoment, WholeLineAndHalfLine) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto all = partial_moment(-inf, inf);
    EXPECT_EQ(all.mass, 1.0);
    EXPECT_EQ(all.first_moment, 0.0);
    const auto half = partial_moment(0.0, inf);
    EXPECT_NEAR(half.mass, 0.5, 1e-15);
    EXPECT_NEAR(half.first_moment, 0.3989422804, 1e-9);
    const auto empty = partial_moment(0.7, 0.7);
    EXPECT_EQ(empty.mass, 0.0);
    EXPECT_EQ(empty.first_moment, 0.0);
}

TEST(PartialMoment, Additive) {
    for (double a : {-3.0, -0.4, 1.2})
        for (double m : {0.1, 0.9})
            for (double w : {0.5, 2.0}) {
                const double b = a + m, c = b + w;
                const auto ac = partial_moment(a, c), ab = partial_moment(a, b), bc = partial_moment(b, c);
                EXPECT_NEAR(ac.mass, ab.mass + bc.mass, 1e-12);
                EXPECT_NEAR(ac.first_moment, ab.first_moment + bc.first_moment, 1e-12);
            }
}

TEST(PartialMoment, RejectsReversedInterval) { EXPECT_THROW(partial_moment(1.0, 0.0), InvalidArgument); }

TEST(ToGaussian, CentrePointMapsToMean) {
    const PointSet p(1, 3, {0.5, 0.5, 0.5}, PointKind::mc, 0);
    const std::vector<double> zero(3, 0.0), shift{1.0, -2.0, 0.5};
    const auto z = to_gaussian(p, Matrix::identity(3), zero);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(z(0, i), 0.0);
    const auto s = to_gaussian(p, Matrix::identity(3), shift);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s(0, i), shift[i]);
}

TEST(ToGaussian, ClampsZeroCoordinates) {
    const PointSet p(1, 1, {0.0}, PointKind::lattice_shifted, 0);
    const std::vector<double> zero{0.0};
    const double v = to_gaussian(p, Matrix::identity(1), zero)(0, 0);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LT(v, -8.0);
}

TEST(ToGaussian, SampleCovarianceMatchesFactor) {
    const Matrix a{{1.0, 0.0, 0.0}, {0.6, 0.8, 0.0}, {-0.3, 0.2, 0.5}};
    const std::vector<double> mean{0.0, 0.0, 0.0};
    const auto xi = to_gaussian(scramble_linear(1u << 14, 3, 4), a, mean);
    Eigen::MatrixXd x(xi.rows(), 3);
    for (std::size_t j = 0; j < xi.rows(); ++j)
        for (std::size_t i = 0; i < 3; ++i) x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = xi(j, i);
    const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(xi.rows() - 1);
    Eigen::Matrix3d ea;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ea(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    const Eigen::Matrix3d sigma = ea * ea.transpose();
    EXPECT_LE((cov - sigma).cwiseAbs().maxCoeff(), 0.05 * sigma.cwiseAbs().maxCoeff());
}

TEST(ToGaussian, DimensionMismatch) {
    const std::vector<double> mean{0.0, 0.0};
    EXPECT_THROW(to_gaussian(mc_points(4, 3, 1), Matrix::identity(2), mean), InvalidArgument);
}

TEST(GaussianMarginal, SigmaMustBePositive) {
    EXPECT_THROW(GaussianMarginal(0.0, 0.0), InvalidArgument);
    const GaussianMarginal g(1.0, 2.0);
    EXPECT_NEAR(g.cdf(1.0), 0.5, 1e-15);
    EXPECT_NEAR(g.pdf(1.0), 0.3989422804014327 / 2.0, 1e-15);
}
