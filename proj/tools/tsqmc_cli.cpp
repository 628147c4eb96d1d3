// Command-line front end: point sets, recourse evaluation, dimension
// reports, convergence experiments and the bundled fixtures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsqmc/anova.hpp"
#include "tsqmc/experiment.hpp"
#include "tsqmc/lattice.hpp"
#include "tsqmc/points.hpp"
#include "tsqmc/problem_io.hpp"
#include "tsqmc/recourse.hpp"
#include "tsqmc/report.hpp"

namespace {

using namespace tsqmc;

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw InvalidArgument("bad number '" + tok + "' in list '" + s + "'");
        }
    }
    return out;
}

TwoStageProblem example_by_name(const std::string& name) {
    if (name == "strike" || name == "strike_example") return strike_example();
    if (name == "kinked" || name == "kinked_example") return kinked_example();
    if (name == "smooth" || name == "smooth_example") return smooth_example();
    throw InvalidArgument("unknown example '" + name + "' (expected strike, kinked or smooth)");
}

TwoStageProblem load_problem(const std::string& fixture, const std::string& example) {
    if (!fixture.empty() && !example.empty()) throw InvalidArgument("give either --fixture or --example, not both");
    if (!example.empty()) return example_by_name(example);
    if (fixture.empty()) throw InvalidArgument("a problem is required: --fixture <file> or --example <name>");
    std::ifstream in(fixture);
    if (!in) throw IoError("cannot open fixture " + fixture);
    return read_problem(in);
}

void print_row(std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) std::printf(i ? " %.17g" : "%.17g", v[i]);
    std::printf("\n");
}

int cmd_points(const std::string& kind, std::size_t n, std::size_t dim, std::uint64_t seed, bool tent,
               const std::string& directions) {
    PointSet pts;
    if (kind == "mc") {
        pts = mc_points(n, dim, seed);
    } else if (kind == "sobol") {
        if (directions.empty()) {
            pts = scramble_linear(n, dim, seed);
        } else {
            std::ifstream in(directions);
            if (!in) throw IoError("cannot open direction-number file " + directions);
            pts = scramble_linear(n, dim, seed, DirectionNumberTable::parse(in));
        }
    } else if (kind == "lattice") {
        const auto rule = cbc_construct(n, dim, WeightSequence::power_decay(dim));
        pts = shifted_lattice(rule, random_shift(dim, seed), seed);
    } else {
        throw InvalidArgument("unknown point kind '" + kind + "'");
    }
    if (tent) pts = tent_transform(pts);
    for (std::size_t j = 0; j < pts.size(); ++j) print_row(pts.point(j));
    return 0;
}

int cmd_recourse_eval(const TwoStageProblem& p, const std::string& x_arg, const std::vector<std::string>& xi_args,
                      const std::string& xi_file, const std::string& method, const std::string& dump) {
    const auto x = parse_list(x_arg);
    if (x.size() != p.first_stage_dim())
        throw InvalidArgument("--x has " + std::to_string(x.size()) + " entries, problem needs " +
                              std::to_string(p.first_stage_dim()));
    std::vector<std::vector<double>> xis;
    for (const auto& s : xi_args) xis.push_back(parse_list(s));
    if (!xi_file.empty()) {
        std::ifstream in(xi_file);
        if (!in) throw IoError("cannot open " + xi_file);
        for (std::string line; std::getline(in, line);) {
            std::istringstream ss(line);
            std::vector<double> row;
            for (double v; ss >> v;) row.push_back(v);
            if (!row.empty()) xis.push_back(row);
        }
    }
    if (xis.empty()) throw InvalidArgument("no scenarios: pass --xi or --xi-file");

    const bool use_lp = method == "lp" || method == "both";
    const bool use_dual = method == "dual" || method == "both";
    if (!use_lp && !use_dual) throw InvalidArgument("--method must be lp, dual or both");
    VertexList vl;
    if (use_dual) vl = recourse_vertices(p);

    std::printf(use_lp && use_dual ? "lp dual vertex\n" : use_lp ? "lp\n" : "dual vertex\n");
    for (const auto& xi : xis) {
        if (xi.size() != p.d())
            throw InvalidArgument("scenario has " + std::to_string(xi.size()) + " entries, problem needs " +
                                  std::to_string(p.d()));
        if (!dump.empty()) {
            std::ofstream out(dump);
            if (!out) throw IoError("cannot write " + dump);
            dump_lp(out, recourse_lp(p, x, xi));
        }
        if (use_lp) std::printf("%.17g", eval_recourse_lp(p, x, xi));
        if (use_dual) {
            const auto dv = eval_recourse_dual(vl, x, xi, p.hbar, p.t);
            std::printf(use_lp ? " %.17g %zu" : "%.17g %zu", dv.value, dv.argmax + 1);
        }
        std::printf("\n");
    }
    return 0;
}

CubeFunction recourse_integrand(const TwoStageProblem& p, std::vector<double> x) {
    return gaussian_to_cube(p.d(), [p, x = std::move(x)](std::span<const double> z) {
        std::vector<double> xi(p.d());
        for (std::size_t i = 0; i < xi.size(); ++i) {
            double s = p.mean[i];
            for (std::size_t j = 0; j < xi.size(); ++j) s += p.factor(i, j) * z[j];
            xi[i] = s;
        }
        return eval_recourse_lp(p, x, xi);
    });
}

int cmd_dims(const TwoStageProblem& problem, const std::string& x_arg, double eps, const EstimatorOptions& opt,
             std::size_t top, const std::string& out_path) {
    const auto x = parse_list(x_arg);
    if (x.size() != problem.first_stage_dim()) throw InvalidArgument("--x has the wrong length");
    if (problem.x_set.violation(x) > 1e-8) throw InvalidArgument("--x is not in X");
    const auto rep = dimension_report(recourse_integrand(problem, x), eps, opt, top);
    const auto text = to_json(rep).dump(2);
    if (out_path.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << text << '\n';
    }
    return 0;
}

int cmd_dims_production(const ExperimentConfig& config, double eps, const EstimatorOptions& opt, std::size_t top,
                        const std::string& out_path) {
    const auto problem = generate_model(config.model, config.factorization);
    std::vector<double> x = choose_fixed_x(config, problem);
    std::ostringstream xs;
    xs.precision(17);
    for (std::size_t i = 0; i < x.size(); ++i) xs << (i ? "," : "") << x[i];
    return cmd_dims(problem, xs.str(), eps, opt, top, out_path);
}

int cmd_run(ExperimentConfig config, const std::string& kind, const std::string& out_prefix) {
    if (!kind.empty()) config.test_kind = parse_test_kind(kind);
    const auto res = run_experiment(config);
    nlohmann::json extra{{"reference", res.reference}, {"reference_half", res.reference_half}, {"x", res.x}};
    const auto paths = emit_report(res.records, out_prefix, extra);
    for (const auto& g : summarize(res.records))
        std::printf("%-6s %-7s %-8s slope %+.3f +- %.3f\n", to_string(g.test_kind).c_str(),
                    to_string(g.sampler).c_str(), to_string(g.factorization).c_str(), g.fit.slope, g.fit.half_width);
    std::printf("wrote %s, %s, %s, %s\n", paths.csv.c_str(), paths.replicates.c_str(), paths.json.c_str(),
                paths.dat.c_str());
    return 0;
}

int cmd_fixtures(const std::string& dir, const std::string& only) {
    std::vector<TwoStageProblem> problems;
    if (only.empty()) problems = {strike_example(), kinked_example(), smooth_example()};
    else problems = {example_by_name(only)};
    if (dir.empty()) {
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i) std::cout << '\n';
            write_problem(std::cout, problems[i]);
        }
        return 0;
    }
    std::filesystem::create_directories(dir);
    for (const auto& p : problems) {
        const auto path = std::filesystem::path(dir) / (p.name + ".txt");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        write_problem(out, p);
        std::printf("%s\n", path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized quasi-Monte Carlo for two-stage stochastic programs"};
    app.require_subcommand(1);

    // points
    auto* points = app.add_subcommand("points", "Print a point set, one point per line");
    std::string kind = "sobol", directions;
    std::size_t n = 16, dim = 2;
    std::uint64_t seed = 1;
    bool tent = false;
    points->add_option("--kind", kind, "mc, sobol (scrambled) or lattice (CBC, shifted)")
        ->check(CLI::IsMember({"mc", "sobol", "lattice"}));
    points->add_option("--n", n, "number of points (prime for lattice)")->required();
    points->add_option("--dim", dim, "dimension")->required();
    points->add_option("--seed", seed, "randomization seed");
    points->add_flag("--tent", tent, "apply the tent transform");
    points->add_option("--direction-numbers", directions, "Joe-Kuo direction-number file (sobol only)");

    // recourse-eval
    auto* reval = app.add_subcommand("recourse-eval", "Evaluate Phi(x, xi) for one or more scenarios");
    std::string fixture, example, x_arg, xi_file, method = "both", dump;
    std::vector<std::string> xi_args;
    reval->add_option("--fixture", fixture, "problem file");
    reval->add_option("--example", example, "bundled example: strike, kinked or smooth");
    reval->add_option("--x", x_arg, "first-stage decision, comma separated")->required();
    reval->add_option("--xi", xi_args, "scenario, comma separated (repeatable)");
    reval->add_option("--xi-file", xi_file, "scenarios, one per line, whitespace separated");
    reval->add_option("--method", method, "lp, dual or both")->check(CLI::IsMember({"lp", "dual", "both"}));
    reval->add_option("--dump-lp", dump, "write the second-stage LP of the last scenario here");

    // dims
    auto* dims = app.add_subcommand("dims", "Effective-dimension report (JSON) of xi -> Phi(x, xi)");
    std::string dims_fixture, dims_example, dims_x, dims_config, dims_out, dims_factor;
    bool production = false;
    double eps = 0.01;
    std::size_t top = 4;
    EstimatorOptions est;
    std::string est_sampler = "sobol";
    dims->add_option("--fixture", dims_fixture, "problem file");
    dims->add_option("--example", dims_example, "bundled example: strike, kinked or smooth");
    dims->add_option("--x", dims_x, "first-stage decision, comma separated");
    dims->add_flag("--production", production, "use the production-planning model");
    dims->add_option("--config", dims_config, "experiment config for the production model");
    dims->add_option("--factorization", dims_factor, "pca or cholesky (production model)")
        ->check(CLI::IsMember({"pca", "cholesky"}));
    dims->add_option("--eps", eps, "epsilon for truncation and superposition dimensions");
    dims->add_option("--points", est.points, "points per replication");
    dims->add_option("--replications", est.replications, "independent replications");
    dims->add_option("--seed", est.seed, "estimator seed");
    dims->add_option("--sampler", est_sampler, "sobol or mc")->check(CLI::IsMember({"sobol", "mc"}));
    dims->add_option("--top", top, "coordinates whose pairs are examined");
    dims->add_option("--out", dims_out, "write JSON here instead of stdout");

    // run
    auto* run = app.add_subcommand("run", "Run a convergence experiment");
    std::string run_kind, run_config, run_out = "experiment";
    run->add_option("--kind", run_kind, "first or second")->check(CLI::IsMember({"first", "second"}));
    run->add_option("--config", run_config, "JSON config")->required();
    run->add_option("--out", run_out, "output prefix for .csv, _replicates.csv, .json and .dat");

    // fixtures
    auto* fixtures = app.add_subcommand("fixtures", "Write the bundled example problems");
    std::string fixtures_dir, fixtures_only;
    fixtures->add_option("--out-dir", fixtures_dir, "directory (default: stdout)");
    fixtures->add_option("--only", fixtures_only, "strike, kinked or smooth");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*points) return cmd_points(kind, n, dim, seed, tent, directions);
        if (*reval)
            return cmd_recourse_eval(load_problem(fixture, example), x_arg, xi_args, xi_file, method, dump);
        if (*dims) {
            est.sampler = est_sampler == "mc" ? EstimatorSampler::mc : EstimatorSampler::sobol;
            if (production) {
                auto config = dims_config.empty() ? ExperimentConfig{} : load_experiment_config(dims_config);
                if (!dims_factor.empty()) config.factorization = parse_factor_kind(dims_factor);
                return cmd_dims_production(config, eps, est, top, dims_out);
            }
            if (dims_x.empty()) throw InvalidArgument("--x is required unless --production is given");
            return cmd_dims(load_problem(dims_fixture, dims_example), dims_x, eps, est, top, dims_out);
        }
        if (*run) return cmd_run(load_experiment_config(run_config), run_kind, run_out);
        if (*fixtures) return cmd_fixtures(fixtures_dir, fixtures_only);
    } catch (const tsqmc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
