#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tsqmc/points.hpp"

using namespace tsqmc;

namespace {

// one point per dyadic interval [k 2^-m, (k+1) 2^-m) in every coordinate
bool dyadically_stratified(const PointSet& p, unsigned m) {
    const std::size_t n = std::size_t{1} << m;
    if (p.size() != n) return false;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        std::vector<int> hits(n, 0);
        for (std::size_t j = 0; j < n; ++j) ++hits[static_cast<std::size_t>(std::ldexp(p.at(j, i), static_cast<int>(m)))];
        if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) return false;
    }
    return true;
}

}  // namespace

TEST(McPoints, DeterministicForSeed) {
    EXPECT_EQ(mc_points(50, 3, 7), mc_points(50, 3, 7));
    EXPECT_NE(mc_points(50, 3, 7), mc_points(50, 3, 8));
}

TEST(McPoints, SampleMeanNearHalf) {
    const auto p = mc_points(10000, 1, 42);
    const double mean = std::accumulate(p.coords().begin(), p.coords().end(), 0.0) / 10000.0;
    EXPECT_GE(mean, 0.49);
    EXPECT_LE(mean, 0.51);
}

TEST(McPoints, RejectsEmptyShape) {
    EXPECT_THROW(mc_points(0, 2, 1), InvalidArgument);
    EXPECT_THROW(mc_points(4, 0, 1), InvalidArgument);
}

TEST(Sobol, FirstPointsAreRadicalInverse) {
    const auto p = sobol_points(4, 1);
    EXPECT_EQ(p.at(0, 0), 0.0);
    EXPECT_EQ(p.at(1, 0), 0.5);
    EXPECT_EQ(p.at(2, 0), 0.25);
    EXPECT_EQ(p.at(3, 0), 0.75);
}

TEST(Sobol, CoordinatesAreDyadicallyStratified) {
    for (unsigned m = 0; m <= 10; ++m) EXPECT_TRUE(dyadically_stratified(sobol_points(std::size_t{1} << m, 16), m)) << m;
}

TEST(Sobol, GrayOrderGivesTheSameSet) {
    const auto a = sobol_points(64, 5), b = sobol_points(64, 5, DirectionNumberTable::bundled(), SobolOrder::gray);
    for (std::size_t i = 0; i < 5; ++i) {
        std::multiset<double> sa, sb;
        for (std::size_t j = 0; j < 64; ++j) {
            sa.insert(a.at(j, i));
            sb.insert(b.at(j, i));
        }
        EXPECT_EQ(sa, sb);
    }
}

TEST(Sobol, DimensionBeyondTableIsRejected) {
    const auto max = DirectionNumberTable::bundled().max_dimension();
    EXPECT_GE(max, 128u);
    EXPECT_THROW(sobol_points(4, max + 1), InvalidArgument);
    EXPECT_THROW(scramble_linear(4, max + 1, 1), InvalidArgument);
}

TEST(DirectionNumbers, BundledTableMatchesDataFile) {
    std::ifstream in(TSQMC_DATA_DIR "/new-joe-kuo-1024.txt");
    ASSERT_TRUE(in);
    const auto table = DirectionNumberTable::parse(in);
    EXPECT_EQ(table.max_dimension(), DirectionNumberTable::bundled().max_dimension());
    EXPECT_EQ(sobol_points(256, 40, table), sobol_points(256, 40));
}

TEST(DirectionNumbers, RejectsEvenOrOversizedInitialNumbers) {
    std::istringstream even("d s a m_i\n2 1 0 2\n");
    EXPECT_THROW(DirectionNumberTable::parse(even), InvalidArgument);
    std::istringstream big("2 2 1 1 5\n");
    EXPECT_THROW(DirectionNumberTable::parse(big), InvalidArgument);
}

TEST(Scrambled, NetPropertySurvivesForManySeeds) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
        for (unsigned m = 0; m <= 12; m += 3)
            EXPECT_TRUE(dyadically_stratified(scramble_linear(std::size_t{1} << m, 8, seed), m)) << seed << " " << m;
}

TEST(Scrambled, DeterministicForSeed) {
    EXPECT_EQ(scramble_linear(128, 4, 99), scramble_linear(128, 4, 99));
    EXPECT_NE(scramble_linear(128, 4, 99), scramble_linear(128, 4, 100));
}

TEST(Scrambled, SinglePointIsUniformOverSeeds) {
    std::vector<double> first;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) first.push_back(scramble_linear(8, 2, seed).at(3, 0));
    std::sort(first.begin(), first.end());
    double ks = 0.0;
    for (std::size_t k = 0; k < first.size(); ++k) {
        const double n = static_cast<double>(first.size());
        ks = std::max({ks, (static_cast<double>(k) + 1.0) / n - first[k], first[k] - static_cast<double>(k) / n});
    }
    // asymptotic 1% critical value of the KS statistic
    EXPECT_LT(ks, 1.628 / std::sqrt(1000.0));
}

TEST(Scrambled, ProductIntegrandIsUnbiased) {
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto p = scramble_linear(16, 3, seed);
        double s = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) s += p.at(j, 0) * p.at(j, 1) * p.at(j, 2);
        est.push_back(s / 16.0);
    }
    const double n = static_cast<double>(est.size());
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / n;
    double ss = 0.0;
    for (double e : est) ss += (e - mean) * (e - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    EXPECT_LT(std::abs(mean - 0.125), 3.0 * se);
}

TEST(Tent, MapsKnownValues) {
    const PointSet p(4, 1, {0.0, 0.25, 0.5, 0.75}, PointKind::sobol, 0);
    const auto t = tent_transform(p);
    EXPECT_EQ(t.at(0, 0), 0.0);
    EXPECT_EQ(t.at(1, 0), 0.5);
    EXPECT_LT(t.at(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(t.at(2, 0), 1.0);
    EXPECT_EQ(t.at(3, 0), 0.5);
}

TEST(Tent, IsNotAnInvolution) {
    const PointSet p(1, 1, {0.75}, PointKind::mc, 0);
    EXPECT_NE(tent_transform(tent_transform(p)).at(0, 0), 0.75);
}

TEST(Discrepancy, SinglePointAtHalf) {
    const PointSet p(1, 1, {0.5}, PointKind::mc, 0);
    const std::size_t u[] = {0};
    EXPECT_NEAR(weighted_l2_discrepancy(p, u, 1.0), std::sqrt(1.0 / 12.0), 1e-12);
}

TEST(Discrepancy, WeightScalesQuadratically) {
    const auto p = mc_points(20, 2, 5);
    const std::size_t u[] = {0, 1};
    EXPECT_NEAR(weighted_l2_discrepancy(p, u, 9.0), 3.0 * weighted_l2_discrepancy(p, u, 1.0), 1e-12);
}

TEST(Discrepancy, VanDerCorputBeatsClusteredPoints) {
    const std::size_t u[] = {0};
    const PointSet clustered(4, 1, {0.0, 0.0, 0.0, 0.0}, PointKind::mc, 0);
    EXPECT_LT(weighted_l2_discrepancy(sobol_points(4, 1), u, 1.0), weighted_l2_discrepancy(clustered, u, 1.0));
}

TEST(Discrepancy, RejectsEmptySubset) {
    EXPECT_THROW(weighted_l2_discrepancy(mc_points(4, 2, 1), {}, 1.0), InvalidArgument);
}

TEST(UnitPoint, RejectsCoordinatesOutsideTheCube) {
    EXPECT_THROW(UnitPoint({0.2, 1.0}), InvalidArgument);
    EXPECT_THROW(UnitPoint({-0.1}), InvalidArgument);
    EXPECT_NO_THROW(UnitPoint({0.0, 0.999}));
}
