#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "tsqmc/lp.hpp"
#include "tsqmc/problem_io.hpp"
#include "tsqmc/report.hpp"

using namespace tsqmc;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(TSQMC_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::vector<double>> rows(const std::string& text) {
    std::vector<std::vector<double>> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::istringstream ls(line);
        std::vector<double> row;
        for (double v; ls >> v;) row.push_back(v);
        out.push_back(row);
    }
    return out;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tsqmc_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, PointsShapeAndPrecision) {
    for (const char* kind : {"mc", "sobol", "lattice"}) {
        const auto r = run(std::string("points --kind ") + kind + " --n 31 --dim 3 --seed 5");
        ASSERT_EQ(r.status, 0) << r.out;
        const auto pts = rows(r.out);
        ASSERT_EQ(pts.size(), 31u) << kind;
        for (const auto& p : pts) {
            ASSERT_EQ(p.size(), 3u);
            for (double v : p) {
                EXPECT_GE(v, 0.0);
                EXPECT_LT(v, 1.0);
            }
        }
    }
    // 17 significant digits: the printed text reads back to the same doubles
    const auto a = run("points --kind mc --n 4 --dim 2 --seed 9");
    const auto b = run("points --kind mc --n 4 --dim 2 --seed 9");
    EXPECT_EQ(a.out, b.out);
    std::istringstream in(a.out);
    std::string tok;
    in >> tok;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::stod(tok));
    EXPECT_EQ(tok, buf);
}

TEST(Cli, TentPointsAreFolded) {
    const auto plain = rows(run("points --kind lattice --n 7 --dim 2 --seed 3").out);
    const auto tent = rows(run("points --kind lattice --n 7 --dim 2 --seed 3 --tent").out);
    ASSERT_EQ(plain.size(), tent.size());
    for (std::size_t j = 0; j < plain.size(); ++j)
        for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(tent[j][i], 1.0 - std::abs(2.0 * plain[j][i] - 1.0), 1e-15);
}

TEST(Cli, PointsErrors) {
    EXPECT_EQ(run("points --kind lattice --n 8 --dim 2").status, 1);
    EXPECT_NE(run("points --kind halton --n 8 --dim 2").status, 0);
    EXPECT_NE(run("points --n 8").status, 0);
}

TEST(Cli, DirectionNumberFile) {
    const auto dir = temp_dir("dirnum");
    std::ofstream(dir / "dn.txt") << "d s a m_i\n2 1 0 1\n3 2 1 1 3\n";
    const auto r = run("points --kind sobol --n 8 --dim 3 --direction-numbers " + (dir / "dn.txt").string());
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(rows(r.out).size(), 8u);
    EXPECT_EQ(run("points --kind sobol --n 8 --dim 4 --direction-numbers " + (dir / "dn.txt").string()).status, 1);
}

TEST(Cli, RecourseEvalExamples) {
    auto r = run("recourse-eval --example kinked --x 0,0 --xi=-2,1");
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "lp dual vertex");
    auto v = rows(r.out.substr(r.out.find('\n') + 1));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NEAR(v[0][0], 2.0, 1e-12);
    EXPECT_NEAR(v[0][1], 2.0, 1e-12);

    r = run("recourse-eval --example smooth --x 0,0 --xi 3,0.5 --xi 1,1 --method dual");
    ASSERT_EQ(r.status, 0) << r.out;
    v = rows(r.out.substr(r.out.find('\n') + 1));
    ASSERT_EQ(v.size(), 2u);
    EXPECT_NEAR(v[0][0], 5.5, 1e-12);
    EXPECT_NEAR(v[1][0], 1.0, 1e-12);
}

TEST(Cli, RecourseEvalFromFilesAndLpDump) {
    const auto dir = temp_dir("reval");
    ASSERT_EQ(run("fixtures --out-dir " + dir.string()).status, 0);
    std::ofstream(dir / "xi.txt") << "5\n1\n\n2.5\n";
    const auto r = run("recourse-eval --fixture " + (dir / "strike_example.txt").string() +
                       " --x 2 --xi-file " + (dir / "xi.txt").string() + " --method lp --dump-lp " +
                       (dir / "lp.txt").string());
    ASSERT_EQ(r.status, 0) << r.out;
    const auto v = rows(r.out.substr(r.out.find('\n') + 1));
    ASSERT_EQ(v.size(), 3u);
    EXPECT_NEAR(v[0][0], 3.0, 1e-12);
    EXPECT_NEAR(v[1][0], 0.0, 1e-12);
    EXPECT_NEAR(v[2][0], 0.5, 1e-12);
    std::ifstream dump(dir / "lp.txt");
    const auto lp = read_lp_dump(dump);
    EXPECT_NEAR(solve_lp(lp).value, 0.5, 1e-12);
}

TEST(Cli, RecourseEvalErrors) {
    EXPECT_EQ(run("recourse-eval --example smooth --x 0 --xi 1,1").status, 1);
    EXPECT_EQ(run("recourse-eval --example smooth --x 0,0 --xi 1").status, 1);
    EXPECT_EQ(run("recourse-eval --example 9.9 --x 0 --xi 1").status, 1);
    EXPECT_EQ(run("recourse-eval --example smooth --x 0,0").status, 1);
    EXPECT_EQ(run("recourse-eval --fixture /nonexistent --x 0 --xi 1").status, 1);
}

TEST(Cli, FixturesMatchBuiltIns) {
    const auto dir = temp_dir("fixtures");
    const auto r = run("fixtures --out-dir " + dir.string());
    ASSERT_EQ(r.status, 0) << r.out;
    for (const char* name : {"strike_example", "kinked_example", "smooth_example"}) {
        std::ifstream in(dir / (std::string(name) + ".txt"));
        ASSERT_TRUE(in) << name;
        EXPECT_EQ(read_problem(in).name, name);
    }
    const auto one = run("fixtures --only smooth");
    std::istringstream in(one.out);
    EXPECT_EQ(max_abs_diff(read_problem(in).w, smooth_example().w), 0.0);
}

TEST(Cli, DimsReportHasStandardErrors) {
    const auto dir = temp_dir("dims");
    const auto r = run("dims --example smooth --x 0,0 --points 512 --replications 4 --out " + (dir / "d.json").string());
    ASSERT_EQ(r.status, 0) << r.out;
    std::ifstream in(dir / "d.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_TRUE(j["mean_dimension"].contains("se"));
    EXPECT_GE(j["truncation_dimension"].get<int>(), 1);
    EXPECT_EQ(j["first_order"].size(), 2u);
    EXPECT_EQ(run("dims --example smooth --points 512").status, 1);  // no --x
}

TEST(Cli, RunWritesAllOutputs) {
    const auto dir = temp_dir("run");
    std::ofstream(dir / "c.json") << R"({
        "samplers": ["mc", "sobol"], "sizes": [16, 32, 64], "replications": 3, "repeats": 2,
        "reference_points": 512, "fixed_x_points": 16, "deterministic_output": true,
        "model": {"horizon": 4, "units": 1, "providers1": 1, "providers2": 1}
    })";
    const auto prefix = (dir / "out").string();
    const auto r = run("run --kind second --config " + (dir / "c.json").string() + " --out " + prefix);
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_NE(r.out.find("slope"), std::string::npos);
    for (const char* suffix : {".csv", "_replicates.csv", ".json", ".dat"})
        EXPECT_TRUE(std::filesystem::exists(prefix + suffix)) << suffix;
    const auto records = read_report(prefix);
    EXPECT_EQ(records.size(), 2u * 3u * 2u);
    std::ifstream js(prefix + ".json");
    const auto j = nlohmann::json::parse(js);
    EXPECT_TRUE(j.contains("reference"));
    EXPECT_EQ(j["x"].size(), 4u);

    // same config, same bytes
    const auto again = run("run --kind second --config " + (dir / "c.json").string() + " --out " + prefix + "2");
    ASSERT_EQ(again.status, 0);
    std::ifstream a(prefix + ".csv"), b(prefix + "2.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Cli, RunErrors) {
    const auto dir = temp_dir("run_err");
    std::ofstream(dir / "bad.json") << R"({"unknown_key": 1})";
    EXPECT_EQ(run("run --config " + (dir / "bad.json").string()).status, 1);
    EXPECT_EQ(run("run --config /nonexistent.json").status, 1);
    EXPECT_NE(run("run --kind third --config x").status, 0);
}
