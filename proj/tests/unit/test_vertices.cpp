#include <gtest/gtest.h>

#include <random>

#include "tsqmc/lp.hpp"
#include "tsqmc/problem_io.hpp"
#include "tsqmc/vertices.hpp"

using namespace tsqmc;

namespace {

bool has_vertex(const VertexList& vl, std::vector<double> v) {
    for (const auto& u : vl.vertices) {
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
        if (d < 1e-12) return true;
    }
    return false;
}

}  // namespace

TEST(Vertices, StrikeModelIsASegment) {
    // w z <= 1, -w z <= 0: the segment [0, 1/w], so Phi = max(0, xi - x) / w
    const auto p = strike_example(2.0);
    const auto vl = enumerate_vertices(p.w, p.q);
    ASSERT_EQ(vl.size(), 2u);
    EXPECT_TRUE(has_vertex(vl, {0.5}));
    EXPECT_TRUE(has_vertex(vl, {0.0}));
}

TEST(Vertices, ExampleWithSharedComponent) {
    const auto p = kinked_example();
    const auto vl = enumerate_vertices(p.w, p.q);
    ASSERT_EQ(vl.size(), 3u);
    EXPECT_TRUE(has_vertex(vl, {1.0, 0.0}));
    EXPECT_TRUE(has_vertex(vl, {-1.0, 0.0}));
    EXPECT_TRUE(has_vertex(vl, {0.0, 1.0}));
}

TEST(Vertices, ExampleWithDistinctComponents) {
    const auto p = smooth_example();
    const auto vl = enumerate_vertices(p.w, p.q);
    ASSERT_EQ(vl.size(), 3u);
    EXPECT_TRUE(has_vertex(vl, {2.0, -1.0}));
    EXPECT_TRUE(has_vertex(vl, {-1.0, 0.0}));
    EXPECT_TRUE(has_vertex(vl, {0.0, 1.0}));
    // a triangle: every pair is an edge
    EXPECT_EQ(vertex_adjacency(vl, p.w).size(), 3u);
}

TEST(Vertices, UnitCubeAdjacency) {
    // -1 <= z_i <= 1 in R^3: 8 vertices, 12 edges
    Matrix w(3, 6);
    std::vector<double> q(6, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        w(i, 2 * i) = 1.0;
        w(i, 2 * i + 1) = -1.0;
    }
    const auto vl = enumerate_vertices(w, q);
    EXPECT_EQ(vl.size(), 8u);
    const auto adj = vertex_adjacency(vl, w);
    EXPECT_EQ(adj.size(), 12u);
    for (const auto& [i, j] : adj) {
        int differ = 0;
        for (std::size_t c = 0; c < 3; ++c) differ += vl.vertices[i][c] != vl.vertices[j][c];
        EXPECT_EQ(differ, 1);
    }
}

TEST(Vertices, DegenerateVertexIsReportedOnce) {
    // square pyramid apex: four facets through (0, 0, 1)
    Matrix w{{1.0, -1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, -1.0, 0.0}, {1.0, 1.0, 1.0, 1.0, -1.0}};
    std::vector<double> q{1.0, 1.0, 1.0, 1.0, 0.0};
    const auto vl = enumerate_vertices(w, q);
    EXPECT_EQ(vl.size(), 5u);
    EXPECT_TRUE(has_vertex(vl, {0.0, 0.0, 1.0}));
}

TEST(Vertices, EveryVertexIsAnLpOptimum) {
    // maximising a random direction over D lands on one of the listed vertices
    const auto p = smooth_example();
    const auto vl = enumerate_vertices(p.w, p.q);
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> t{nd(gen), nd(gen)};
        auto lp = LinearProgram::nonnegative(2, 3);
        lp.objective = p.q;
        lp.a = p.w;
        lp.rhs = t;
        const auto s = solve_lp(lp);
        ASSERT_TRUE(s.optimal());
        double best = -kInf;
        for (const auto& v : vl.vertices) best = std::max(best, dot(v, t));
        EXPECT_NEAR(s.value, best, 1e-10);
    }
}

TEST(Vertices, Errors) {
    Matrix big(kMaxVertexDimension + 1, kMaxVertexDimension + 2);
    std::vector<double> q(kMaxVertexDimension + 2, 1.0);
    EXPECT_THROW(enumerate_vertices(big, q), InvalidArgument);
    // a half plane in R^2 has no vertex
    Matrix w{{1.0}, {0.0}};
    std::vector<double> q1{1.0};
    EXPECT_THROW(enumerate_vertices(w, q1), InvalidArgument);
    std::vector<double> q2{1.0, 2.0};
    EXPECT_THROW(enumerate_vertices(w, q2), InvalidArgument);
}
