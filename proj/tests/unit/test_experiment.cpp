#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tsqmc/experiment.hpp"
#include "tsqmc/report.hpp"

using namespace tsqmc;
using nlohmann::json;

namespace {

// A configuration small enough to run in well under a second.
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.model.horizon = 4;
    c.model.units = 1;
    c.model.providers1 = 1;
    c.model.providers2 = 1;
    c.sizes = {16, 32, 64};
    c.lattice_sizes = {17, 31, 61};
    c.replications = 3;
    c.repeats = 2;
    c.reference_points = 1024;
    c.fixed_x_points = 16;
    c.deterministic_output = true;
    return c;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tsqmc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
    const auto c = parse_experiment_config(json::object());
    EXPECT_EQ(c.test_kind, TestKind::second);
    EXPECT_EQ(c.sizes, (std::vector<std::size_t>{128, 256, 512, 1024}));
    EXPECT_EQ(c.lattice_sizes, (std::vector<std::size_t>{127, 257, 509, 1021}));
    EXPECT_EQ(c.replications, 10u);
    EXPECT_EQ(c.samplers.size(), 3u);

    const auto j = json::parse(R"({
        "test_kind": "first", "factorization": "cholesky", "samplers": ["mc", "lattice"],
        "sizes": [8, 16, 32], "lattice_sizes": [7, 17, 31], "replications": 4, "repeats": 3,
        "fixed_x_source": "midpoint", "l_shaped": {"gap_tol": 1e-8},
        "model": {"horizon": 6, "trend_scale": 2.0, "c": [1.0, 2.0], "arma": {"alpha": [0.5], "beta": []}}
    })");
    const auto d = parse_experiment_config(j);
    EXPECT_EQ(d.test_kind, TestKind::first);
    EXPECT_EQ(d.factorization, FactorKind::cholesky);
    EXPECT_EQ(d.samplers, (std::vector<SamplerKind>{SamplerKind::mc, SamplerKind::lattice}));
    EXPECT_EQ(d.lattice_sizes[1], 17u);
    EXPECT_EQ(d.fixed_x_source, FixedXSource::midpoint);
    EXPECT_EQ(d.l_shaped.gap_tol, 1e-8);
    EXPECT_EQ(d.model.horizon, 6u);
    EXPECT_EQ(d.model.trend_scale, 2.0);
    EXPECT_EQ(d.model.c.hi, 2.0);
    EXPECT_EQ(d.model.arma.alpha, std::vector<double>{0.5});
}

TEST(Config, Rejections) {
    auto bad = [](const char* text) { return parse_experiment_config(json::parse(text)); };
    EXPECT_THROW(bad(R"({"sizez": [1]})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"model": {"horizn": 3}})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"samplers": ["halton"]})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"sizes": [256, 128, 512, 1024]})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"lattice_sizes": [127, 256, 509, 1021]})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"replications": 1})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"repeats": "many"})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"model": {"c": [3.0]}})"), InvalidArgument);
    EXPECT_THROW(bad(R"({"model": {"cbar2": [1.0, 2.0]}})"), InvalidArgument);
    EXPECT_THROW(bad(R"([1, 2])"), InvalidArgument);
    EXPECT_THROW(load_experiment_config("/nonexistent/config.json"), Error);
}

TEST(Config, LoadFromFile) {
    const auto dir = temp_dir("config");
    std::ofstream(dir / "c.json") << R"({"repeats": 5, "seed": 42})";
    const auto c = load_experiment_config((dir / "c.json").string());
    EXPECT_EQ(c.repeats, 5u);
    EXPECT_EQ(c.seed, 42u);
    std::ofstream(dir / "broken.json") << "{ not json";
    EXPECT_THROW(load_experiment_config((dir / "broken.json").string()), InvalidArgument);
}

TEST(FitRate, ExactPowerLaws) {
    const std::vector<double> n{128, 256, 512, 1024};
    std::vector<double> inv, inv_sqrt;
    for (double v : n) {
        inv.push_back(3.0 / v);
        inv_sqrt.push_back(0.7 / std::sqrt(v));
    }
    const auto a = fit_rate(n, inv);
    EXPECT_NEAR(a.slope, -1.0, 1e-12);
    EXPECT_NEAR(a.intercept, std::log10(3.0), 1e-12);
    EXPECT_NEAR(a.half_width, 0.0, 1e-10);
    EXPECT_NEAR(fit_rate(n, inv_sqrt).slope, -0.5, 1e-12);
}

TEST(FitRate, NoisySlopeIsRecovered) {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> noise(0.0, 0.05);
    const std::vector<double> n{128, 256, 512, 1024};
    std::vector<std::vector<double>> xs, ys;
    for (int b = 0; b < 30; ++b) {
        std::vector<double> y;
        for (double v : n) y.push_back(2.0 * std::pow(v, -0.9) * std::pow(10.0, noise(gen)));
        xs.push_back(n);
        ys.push_back(y);
    }
    const auto f = fit_rate_repeats(xs, ys);
    EXPECT_NEAR(f.slope, -0.9, f.half_width);
    EXPECT_LT(f.half_width, 0.05);
    const auto single = fit_rate(n, ys[0]);
    EXPECT_NEAR(single.slope, -0.9, std::max(single.half_width, 0.1));
}

TEST(FitRate, Errors) {
    EXPECT_THROW(fit_rate({1, 2}, {1, 2}), InvalidArgument);
    EXPECT_THROW(fit_rate({1, 2, 4}, {1, 0, 2}), InvalidArgument);
    EXPECT_THROW(fit_rate({4, 4, 4}, {1, 2, 3}), InvalidArgument);
    EXPECT_THROW(fit_rate({1, 2, 4}, {1, 2}), InvalidArgument);
}

TEST(Report, QuartilesNearestRank) {
    const auto q = quartiles({5, 1, 4, 2, 3});
    EXPECT_EQ(q.min, 1);
    EXPECT_EQ(q.q1, 2);
    EXPECT_EQ(q.median, 3);
    EXPECT_EQ(q.q3, 4);
    EXPECT_EQ(q.max, 5);
    const auto r = quartiles({4, 3, 2, 1});
    EXPECT_EQ(r.q1, 1);
    EXPECT_EQ(r.median, 2);
    EXPECT_EQ(r.q3, 3);
    EXPECT_THROW(quartiles({}), InvalidArgument);
}

TEST(Report, RelativeRmse) {
    EXPECT_DOUBLE_EQ(relative_rmse({1.1, 0.9}, 1.0), 0.1);
    EXPECT_THROW(relative_rmse({}, 1.0), InvalidArgument);
    EXPECT_THROW(relative_rmse({1.0}, 0.0), InvalidArgument);
}

TEST(Experiment, SecondKindRunIsDeterministic) {
    auto c = small_config();
    const auto a = run_experiment(c);
    c.workers = 1;
    const auto b = run_experiment(c);
    ASSERT_EQ(a.records.size(), 3u * 3u * 2u);
    EXPECT_EQ(a.records, b.records);
    EXPECT_EQ(a.x, b.x);
    for (const auto& r : a.records) {
        EXPECT_EQ(r.replicates.size(), 3u);
        EXPECT_GT(r.rmse, 0.0);
        EXPECT_EQ(r.runtime_s, 0.0);
        EXPECT_EQ(r.reference, a.reference);
    }
    // the reference halves agree to well within the smallest RMSE
    EXPECT_LT(std::abs(a.reference_half - a.reference) / a.reference, 1e-2);
}

TEST(Experiment, SeedChangesReplicates) {
    auto c = small_config();
    c.samplers = {SamplerKind::sobol};
    const auto a = run_experiment(c);
    c.seed += 1;
    const auto b = run_experiment(c);
    EXPECT_NE(a.records.front().replicates, b.records.front().replicates);
}

TEST(Experiment, FirstKindRun) {
    auto c = small_config();
    c.test_kind = TestKind::first;
    c.samplers = {SamplerKind::mc, SamplerKind::sobol};
    c.reference_points = 256;
    const auto r = run_experiment(c);
    ASSERT_EQ(r.records.size(), 2u * 3u * 2u);
    for (const auto& rec : r.records) EXPECT_EQ(rec.test_kind, TestKind::first);
    EXPECT_EQ(r.x.size(), c.model.units * c.model.horizon);
}

TEST(Experiment, GivenFirstStageMustBeFeasible) {
    auto c = small_config();
    c.fixed_x_source = FixedXSource::given;
    c.fixed_x = std::vector<double>(c.model.units * c.model.horizon, 1e6);
    EXPECT_THROW(run_experiment(c), InvalidArgument);
}

TEST(Report, CsvRoundTripAndFiles) {
    auto c = small_config();
    c.samplers = {SamplerKind::mc, SamplerKind::lattice};
    const auto res = run_experiment(c);
    const auto dir = temp_dir("report");
    const auto paths = emit_report(res.records, dir / "out", {{"reference", res.reference}});
    const auto back = read_report(dir / "out");
    auto sorted = res.records;
    sort_records(sorted);
    EXPECT_EQ(back, sorted);

    const auto csv = slurp(paths.csv);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "test_kind,sampler,factorization,n,repeat,rmse,runtime_s");
    const auto j = json::parse(slurp(paths.json));
    EXPECT_EQ(j["quartile_rule"], "nearest-rank");
    EXPECT_EQ(j["reference"].get<double>(), res.reference);
    ASSERT_EQ(j["groups"].size(), 2u);
    for (const auto& g : j["groups"]) {
        EXPECT_TRUE(g["slope"].contains("value"));
        EXPECT_TRUE(g["slope"].contains("half_width"));
        EXPECT_EQ(g["boxes"].size(), 3u);
    }
    const auto dat = slurp(paths.dat);
    EXPECT_NE(dat.find("# second mc pca"), std::string::npos);
    EXPECT_NE(dat.find("\n\n\n# second lattice pca"), std::string::npos);
}

TEST(Report, Errors) {
    EXPECT_THROW(emit_report({}, temp_dir("empty") / "x"), InvalidArgument);
    RmseRecord r;
    r.rmse = 0.1;
    r.n = 10;
    r.reference = 1.0;
    r.replicates = {1.0, 1.2};
    EXPECT_THROW(emit_report({r}, "/nonexistent_dir_tsqmc/out"), IoError);
    std::istringstream bad("n,rmse\n");
    EXPECT_THROW(read_records_csv(bad), InvalidArgument);
    std::istringstream short_row("test_kind,sampler,factorization,n,repeat,rmse,runtime_s\nsecond,mc,pca,1\n");
    EXPECT_THROW(read_records_csv(short_row), InvalidArgument);
    // a single size gives boxes but no slope
    const auto j = summary_json({r});
    EXPECT_TRUE(j["groups"][0]["slope"].is_null());
}

TEST(Sampling, PointKindsAndErrors) {
    LatticeCache cache;
    const auto a = sample_points(SamplerKind::lattice, 61, 5, 9, cache);
    const auto b = sample_points(SamplerKind::lattice, 61, 5, 9, cache);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.kind(), PointKind::lattice_shifted);
    EXPECT_EQ(sample_points(SamplerKind::sobol, 64, 5, 9, cache).kind(), PointKind::sobol_scrambled);
    EXPECT_EQ(sample_points(SamplerKind::mc, 64, 5, 9, cache).kind(), PointKind::mc);
    EXPECT_THROW(sample_points(SamplerKind::lattice, 64, 5, 9, cache), InvalidArgument);
}
