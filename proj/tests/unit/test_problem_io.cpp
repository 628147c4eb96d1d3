#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsqmc/problem_io.hpp"
#include "tsqmc/production_model.hpp"

using namespace tsqmc;

namespace {

void expect_same(const TwoStageProblem& a, const TwoStageProblem& b) {
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(max_abs_diff(a.w, b.w), 0.0);
    EXPECT_EQ(max_abs_diff(a.t, b.t), 0.0);
    EXPECT_EQ(a.q, b.q);
    EXPECT_EQ(a.hbar, b.hbar);
    EXPECT_EQ(a.c, b.c);
    EXPECT_EQ(a.x_set.lower, b.x_set.lower);
    EXPECT_EQ(a.x_set.upper, b.x_set.upper);
    EXPECT_EQ(a.x_set.row_lower, b.x_set.row_lower);
    EXPECT_EQ(a.x_set.row_upper, b.x_set.row_upper);
    EXPECT_EQ(a.y_lower, b.y_lower);
    EXPECT_EQ(a.y_upper, b.y_upper);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(max_abs_diff(a.factor, b.factor), 0.0);
}

TwoStageProblem round_trip(const TwoStageProblem& p) {
    std::stringstream ss;
    write_problem(ss, p);
    return read_problem(ss);
}

TwoStageProblem parse(const std::string& text) {
    std::istringstream in(text);
    return read_problem(in);
}

const char* kMinimal = R"(# strike model
name tiny
W 1 2
1 -1
q 2
1 0
T 1 1
1
c 1
0.5
x_lower 1
0
x_upper 1
10
)";

}  // namespace

TEST(ProblemIo, RoundTripSmallExamples) {
    for (const auto& p : {strike_example(), kinked_example(), smooth_example()}) expect_same(round_trip(p), p);
}

TEST(ProblemIo, RoundTripProductionModel) {
    const auto p = generate_model(ProductionModelSpec{});
    ASSERT_GT(p.x_set.g.rows(), 0u);
    ASSERT_FALSE(p.standard_recourse());
    expect_same(round_trip(p), p);
}

TEST(ProblemIo, DefaultsForOptionalBlocks) {
    const auto p = parse(kMinimal);
    EXPECT_EQ(p.name, "tiny");
    EXPECT_EQ(p.d(), 1u);
    EXPECT_EQ(p.mean, std::vector<double>{0.0});
    EXPECT_EQ(p.y_upper, (std::vector<double>{kInf, kInf}));
    EXPECT_TRUE(p.standard_recourse());
}

TEST(ProblemIo, NumbersMaySpanLinesAndInfinityIsAccepted) {
    const std::string text = std::string(kMinimal) + "y_upper 2\ninf\n4\n";
    const auto p = parse(text);
    EXPECT_EQ(p.y_upper, (std::vector<double>{kInf, 4.0}));
}

TEST(ProblemIo, Errors) {
    EXPECT_THROW(parse("W 1 2\n1 -1\n"), InvalidArgument);                      // missing blocks
    EXPECT_THROW(parse(std::string(kMinimal) + "bogus 1\n1\n"), InvalidArgument);  // unknown keyword
    EXPECT_THROW(parse(std::string(kMinimal) + "mean 1\nabc\n"), InvalidArgument);
    EXPECT_THROW(parse(std::string(kMinimal) + "mean 1\n1 2\n"), InvalidArgument);  // too many numbers
    EXPECT_THROW(parse(std::string(kMinimal) + "mean 2\n1 2\n"), InvalidArgument);  // wrong dimension
    EXPECT_THROW(parse(std::string(kMinimal) + "factor 1\n"), InvalidArgument);
    try {
        parse(std::string(kMinimal) + "mean 1\n1e\n");
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}

TEST(ProblemIo, ShippedFixturesMatchTheBuiltInExamples) {
    const std::filesystem::path dir = std::filesystem::path(TSQMC_DATA_DIR) / "fixtures";
    const std::pair<const char*, TwoStageProblem> cases[] = {
        {"strike_example.txt", strike_example()}, {"kinked_example.txt", kinked_example()}, {"smooth_example.txt", smooth_example()}};
    for (const auto& [file, expected] : cases) {
        std::ifstream in(dir / file);
        ASSERT_TRUE(in) << file;
        expect_same(read_problem(in), expected);
    }
}
