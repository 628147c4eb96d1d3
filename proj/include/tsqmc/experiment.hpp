#pragma once

// Convergence experiments on the production-planning model.
//
// Second kind: for a fixed first-stage x, estimate E[Phi(x, xi)] with n
// sampled scenarios, R times with independent randomisations, and record
// the relative RMSE against a reference value. Repeating this B times gives
// the spread shown in box plots. First kind: the replicate statistic is the
// optimal value of the SAA problem over the n scenarios.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "tsqmc/covariance.hpp"
#include "tsqmc/errors.hpp"
#include "tsqmc/gaussian.hpp"
#include "tsqmc/lattice.hpp"
#include "tsqmc/parallel.hpp"
#include "tsqmc/points.hpp"
#include "tsqmc/production_model.hpp"
#include "tsqmc/saa.hpp"
#include "tsqmc/seeds.hpp"

namespace tsqmc {

enum class SamplerKind { mc, sobol, lattice };
enum class TestKind { first, second };

inline std::string to_string(SamplerKind s) {
    switch (s) {
        case SamplerKind::mc: return "mc";
        case SamplerKind::sobol: return "sobol";
        case SamplerKind::lattice: return "lattice";
    }
    return "?";
}

inline std::string to_string(TestKind k) { return k == TestKind::first ? "first" : "second"; }

inline SamplerKind parse_sampler_kind(const std::string& s) {
    if (s == "mc") return SamplerKind::mc;
    if (s == "sobol") return SamplerKind::sobol;
    if (s == "lattice") return SamplerKind::lattice;
    throw InvalidArgument("unknown sampler '" + s + "' (expected mc, sobol or lattice)");
}

inline TestKind parse_test_kind(const std::string& s) {
    if (s == "first") return TestKind::first;
    if (s == "second") return TestKind::second;
    throw InvalidArgument("unknown test kind '" + s + "' (expected first or second)");
}

/// How the fixed first-stage point of second-kind tests is chosen.
enum class FixedXSource { saa, midpoint, given };

struct ExperimentConfig {
    TestKind test_kind = TestKind::second;
    FactorKind factorization = FactorKind::pca;
    std::vector<SamplerKind> samplers{SamplerKind::mc, SamplerKind::sobol, SamplerKind::lattice};
    std::vector<std::size_t> sizes{128, 256, 512, 1024};          // mc and sobol
    std::vector<std::size_t> lattice_sizes{127, 257, 509, 1021};  // primes, paired with sizes
    std::size_t replications = 10;  // R
    std::size_t repeats = 30;       // B
    std::uint64_t seed = 20130901;
    std::size_t reference_points = 1u << 18;
    FixedXSource fixed_x_source = FixedXSource::saa;
    std::size_t fixed_x_points = 128;
    std::vector<double> fixed_x;  // used when fixed_x_source is given
    LShapedOptions l_shaped{};
    ProductionModelSpec model{};
    /// Write runtime_s = 0 so reruns produce byte-identical CSV.
    bool deterministic_output = false;
    std::size_t workers = 0;

    void validate() const {
        if (samplers.empty()) throw InvalidArgument("config: no samplers");
        if (sizes.empty()) throw InvalidArgument("config: no sizes");
        if (!std::is_sorted(sizes.begin(), sizes.end()) ||
            std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
            throw InvalidArgument("config: sizes must be strictly ascending");
        const bool lattice = std::find(samplers.begin(), samplers.end(), SamplerKind::lattice) != samplers.end();
        if (lattice) {
            if (lattice_sizes.size() != sizes.size())
                throw InvalidArgument("config: lattice_sizes must pair with sizes");
            if (!std::is_sorted(lattice_sizes.begin(), lattice_sizes.end()))
                throw InvalidArgument("config: lattice_sizes must be ascending");
            for (auto n : lattice_sizes)
                if (!is_prime(n)) throw InvalidArgument("config: lattice size " + std::to_string(n) + " is not prime");
        }
        if (replications < 2) throw InvalidArgument("config: replications must be at least 2");
        if (repeats < 1) throw InvalidArgument("config: repeats must be at least 1");
        if (reference_points < 2) throw InvalidArgument("config: reference_points too small");
        model.validate();
    }
};

// ---------------------------------------------------------------------------
// configuration file (JSON, keys mirror the field names)

namespace detail {
inline void read_range(const nlohmann::json& j, const char* key, Range& r) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw InvalidArgument(std::string("config: model.") + key + " must be [lo, hi]");
    r = {v[0].get<double>(), v[1].get<double>()};
}

inline FixedXSource parse_fixed_x_source(const std::string& s) {
    if (s == "saa") return FixedXSource::saa;
    if (s == "midpoint") return FixedXSource::midpoint;
    if (s == "given") return FixedXSource::given;
    throw InvalidArgument("config: fixed_x_source must be saa, midpoint or given");
}
}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    static const char* known[] = {"test_kind", "factorization", "samplers", "sizes", "lattice_sizes", "replications",
                                  "repeats", "seed", "reference_points", "fixed_x_source", "fixed_x_points",
                                  "fixed_x", "l_shaped", "model", "deterministic_output", "workers"};
    if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
    for (const auto& [key, _] : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known))
            throw InvalidArgument("config: unknown key '" + key + "'");
    ExperimentConfig c;
    try {
        if (j.contains("test_kind")) c.test_kind = parse_test_kind(j["test_kind"].get<std::string>());
        if (j.contains("factorization")) c.factorization = parse_factor_kind(j["factorization"].get<std::string>());
        if (j.contains("samplers")) {
            c.samplers.clear();
            for (const auto& s : j["samplers"]) c.samplers.push_back(parse_sampler_kind(s.get<std::string>()));
        }
        if (j.contains("sizes")) c.sizes = j["sizes"].get<std::vector<std::size_t>>();
        if (j.contains("lattice_sizes")) c.lattice_sizes = j["lattice_sizes"].get<std::vector<std::size_t>>();
        if (j.contains("replications")) c.replications = j["replications"].get<std::size_t>();
        if (j.contains("repeats")) c.repeats = j["repeats"].get<std::size_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("reference_points")) c.reference_points = j["reference_points"].get<std::size_t>();
        if (j.contains("fixed_x_source"))
            c.fixed_x_source = detail::parse_fixed_x_source(j["fixed_x_source"].get<std::string>());
        if (j.contains("fixed_x_points")) c.fixed_x_points = j["fixed_x_points"].get<std::size_t>();
        if (j.contains("fixed_x")) c.fixed_x = j["fixed_x"].get<std::vector<double>>();
        if (j.contains("deterministic_output")) c.deterministic_output = j["deterministic_output"].get<bool>();
        if (j.contains("workers")) c.workers = j["workers"].get<std::size_t>();
        if (j.contains("l_shaped")) {
            const auto& l = j["l_shaped"];
            if (l.contains("gap_tol")) c.l_shaped.gap_tol = l["gap_tol"].get<double>();
            if (l.contains("max_iterations")) c.l_shaped.max_iterations = l["max_iterations"].get<std::size_t>();
        }
        if (j.contains("model")) {
            const auto& m = j["model"];
            static const char* model_keys[] = {"horizon", "units", "providers1", "providers2", "parameter_seed",
                                               "trend", "trend_scale", "arma", "a", "b", "delta", "w", "z", "rho",
                                               "c", "cbar1", "cbar2"};
            if (!m.is_object()) throw InvalidArgument("config: model must be an object");
            for (const auto& [key, _] : m.items())
                if (std::find_if(std::begin(model_keys), std::end(model_keys),
                                 [&](const char* k) { return key == k; }) == std::end(model_keys))
                    throw InvalidArgument("config: unknown key 'model." + key + "'");
            auto& s = c.model;
            if (m.contains("horizon")) s.horizon = m["horizon"].get<std::size_t>();
            if (m.contains("units")) s.units = m["units"].get<std::size_t>();
            if (m.contains("providers1")) s.providers1 = m["providers1"].get<std::size_t>();
            if (m.contains("providers2")) s.providers2 = m["providers2"].get<std::size_t>();
            if (m.contains("parameter_seed")) s.parameter_seed = m["parameter_seed"].get<std::uint64_t>();
            if (m.contains("trend")) s.trend = m["trend"].get<std::vector<double>>();
            if (m.contains("trend_scale")) s.trend_scale = m["trend_scale"].get<double>();
            if (m.contains("arma")) {
                s.arma.alpha = m["arma"].at("alpha").get<std::vector<double>>();
                s.arma.beta = m["arma"].at("beta").get<std::vector<double>>();
            }
            detail::read_range(m, "a", s.a);
            detail::read_range(m, "b", s.b);
            detail::read_range(m, "delta", s.delta);
            detail::read_range(m, "w", s.w);
            detail::read_range(m, "z", s.z);
            detail::read_range(m, "rho", s.rho);
            detail::read_range(m, "c", s.c);
            detail::read_range(m, "cbar1", s.cbar1);
            detail::read_range(m, "cbar2", s.cbar2);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config " + path + ": " + e.what());
    }
    return parse_experiment_config(j);
}

// ---------------------------------------------------------------------------
// sampling

/// Lattice generating vectors are cached per (n, d); construction costs
/// O(d n log n) and is shared by every replication.
class LatticeCache {
public:
    const LatticeRule& get(std::size_t n, std::size_t d) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, d);
        auto it = rules_.find(key);
        if (it == rules_.end()) it = rules_.emplace(key, cbc_construct(n, d, WeightSequence::power_decay(d))).first;
        return it->second;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, std::size_t>, LatticeRule> rules_;
};

inline PointSet sample_points(SamplerKind s, std::size_t n, std::size_t d, std::uint64_t seed, LatticeCache& cache) {
    switch (s) {
        case SamplerKind::mc: return mc_points(n, d, seed);
        case SamplerKind::sobol: return scramble_linear(n, d, seed);
        case SamplerKind::lattice: return shifted_lattice(cache.get(n, d), random_shift(d, seed), seed);
    }
    throw InvalidArgument("sample_points: bad sampler");
}

/// Scenario matrix xi^j = A Phi^{-1}(u^j) + mean.
inline Matrix scenarios(const TwoStageProblem& p, const PointSet& pts) { return to_gaussian(pts, p.factor, p.mean); }

// ---------------------------------------------------------------------------
// records

struct RmseRecord {
    TestKind test_kind = TestKind::second;
    SamplerKind sampler = SamplerKind::mc;
    FactorKind factorization = FactorKind::pca;
    std::size_t n = 0;
    std::size_t repeat = 0;
    double rmse = 0.0;  // relative
    double runtime_s = 0.0;
    std::vector<double> replicates;
    double reference = 0.0;

    friend bool operator==(const RmseRecord&, const RmseRecord&) = default;
};

inline double relative_rmse(const std::vector<double>& replicates, double reference) {
    if (replicates.empty()) throw InvalidArgument("relative_rmse: no replicates");
    if (reference == 0.0) throw InvalidArgument("relative_rmse: reference value is zero");
    double s = 0.0;
    for (double v : replicates) {
        const double e = (v - reference) / reference;
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(replicates.size()));
}

namespace detail {
inline std::uint64_t stream_tag(SamplerKind s) { return 0x100 + static_cast<std::uint64_t>(s); }

inline std::uint64_t replicate_seed(const ExperimentConfig& c, SamplerKind s, std::size_t n, std::size_t b,
                                    std::size_t r) {
    return derive_seed(c.seed, {static_cast<std::uint64_t>(Stream::randomization), stream_tag(s), n, b, r});
}

inline std::size_t size_for(const ExperimentConfig& c, SamplerKind s, std::size_t k) {
    return s == SamplerKind::lattice ? c.lattice_sizes[k] : c.sizes[k];
}

template <class Statistic>
std::vector<RmseRecord> run_protocol(const ExperimentConfig& c, Statistic&& statistic, double reference) {
    std::vector<RmseRecord> out;
    for (auto s : c.samplers)
        for (std::size_t k = 0; k < c.sizes.size(); ++k) {
            const std::size_t n = size_for(c, s, k);
            for (std::size_t b = 0; b < c.repeats; ++b) {
                const auto t0 = std::chrono::steady_clock::now();
                RmseRecord rec;
                rec.test_kind = c.test_kind;
                rec.sampler = s;
                rec.factorization = c.factorization;
                rec.n = n;
                rec.repeat = b;
                rec.reference = reference;
                rec.replicates.resize(c.replications);
                for (std::size_t r = 0; r < c.replications; ++r)
                    rec.replicates[r] = statistic(s, n, replicate_seed(c, s, n, b, r));
                rec.rmse = relative_rmse(rec.replicates, reference);
                rec.runtime_s = c.deterministic_output
                                    ? 0.0
                                    : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                out.push_back(std::move(rec));
            }
        }
    return out;
}
}  // namespace detail

/// Reference value of E[Phi(x, xi)]: scrambled Sobol' under PCA with the
/// given number of points. `half` receives the estimate from the first half
/// of the points (itself a scrambled net when the count is a power of two).
inline double reference_expected_recourse(const TwoStageProblem& p_any, const ProductionModelSpec& spec,
                                          std::span<const double> x, std::size_t points, std::uint64_t seed,
                                          double* half = nullptr, std::size_t workers = 0) {
    const auto p = with_factor(p_any, spec, FactorKind::pca);
    const auto pts = scramble_linear(points, p.d(), derive_seed(seed, Stream::scenarios, 0x4EF));
    const auto xi = scenarios(p, pts);
    std::vector<double> v(points);
    parallel_for(points, [&](std::size_t j) { v[j] = eval_recourse_lp(p, x, xi.row(j)); },
                 workers ? workers : worker_count());
    double first = 0.0, second = 0.0;
    for (std::size_t j = 0; j < points; ++j) (j < points / 2 ? first : second) += v[j];
    if (half) *half = first / static_cast<double>(points / 2);
    return (first + second) / static_cast<double>(points);
}

/// The fixed first-stage point for second-kind tests.
inline std::vector<double> choose_fixed_x(const ExperimentConfig& c, const TwoStageProblem& p) {
    switch (c.fixed_x_source) {
        case FixedXSource::given:
            if (c.fixed_x.size() != p.first_stage_dim()) throw InvalidArgument("config: fixed_x has the wrong length");
            if (p.x_set.violation(c.fixed_x) > 1e-8) throw InvalidArgument("config: fixed_x is not in X");
            return c.fixed_x;
        case FixedXSource::midpoint: {
            std::vector<double> x(p.first_stage_dim());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * (p.x_set.lower[i] + p.x_set.upper[i]);
            if (p.x_set.violation(x) > 1e-8) throw InvalidArgument("config: midpoint of the bounds is not in X");
            return x;
        }
        case FixedXSource::saa: {
            const auto pp = with_factor(p, c.model, FactorKind::pca);
            const auto pts = scramble_linear(c.fixed_x_points, pp.d(), derive_seed(c.seed, Stream::scenarios, 0xF1));
            auto opt = c.l_shaped;
            opt.workers = c.workers;
            return solve_saa(pp, scenarios(pp, pts), SaaMethod::l_shaped, opt).x;
        }
    }
    throw InvalidArgument("choose_fixed_x: bad source");
}

struct ExperimentResult {
    std::vector<RmseRecord> records;
    std::vector<double> x;       // fixed first stage (second kind)
    double reference = 0.0;
    double reference_half = 0.0;  // estimate from half the reference points
};

/// Second-kind test. Pass a reference to reuse one computed earlier for the
/// same model and x (it does not depend on the factorization).
inline ExperimentResult run_second_kind(const ExperimentConfig& c, const TwoStageProblem& problem,
                                        std::span<const double> x, std::optional<double> reference = std::nullopt,
                                        std::optional<double> reference_half = std::nullopt) {
    c.validate();
    if (problem.x_set.violation(x) > 1e-8) throw InvalidArgument("run_second_kind: x is not in X");
    const auto p = with_factor(problem, c.model, c.factorization);
    ExperimentResult res;
    res.x.assign(x.begin(), x.end());
    if (reference) {
        res.reference = *reference;
        res.reference_half = reference_half.value_or(*reference);
    } else {
        res.reference = reference_expected_recourse(p, c.model, x, c.reference_points, c.seed, &res.reference_half,
                                                    c.workers);
    }
    LatticeCache cache;
    const std::size_t workers = c.workers ? c.workers : worker_count();
    res.records = detail::run_protocol(c, [&](SamplerKind s, std::size_t n, std::uint64_t seed) {
        const auto xi = scenarios(p, sample_points(s, n, p.d(), seed, cache));
        return expected_recourse(p, x, xi, workers);
    }, res.reference);
    return res;
}

/// First-kind test: replicate statistic is the SAA optimal value; the
/// reference is the SAA optimum over reference_points PCA-Sobol' scenarios.
inline ExperimentResult run_first_kind(const ExperimentConfig& c, const TwoStageProblem& problem) {
    c.validate();
    const auto p = with_factor(problem, c.model, c.factorization);
    auto opt = c.l_shaped;
    opt.workers = c.workers;
    ExperimentResult res;
    {
        const auto pp = with_factor(problem, c.model, FactorKind::pca);
        const auto pts = scramble_linear(c.reference_points, pp.d(), derive_seed(c.seed, Stream::scenarios, 0x4EF));
        const auto sol = solve_saa(pp, scenarios(pp, pts), SaaMethod::l_shaped, opt);
        res.reference = sol.value;
        res.reference_half = sol.value;
        res.x = sol.x;
    }
    LatticeCache cache;
    res.records = detail::run_protocol(c, [&](SamplerKind s, std::size_t n, std::uint64_t seed) {
        const auto xi = scenarios(p, sample_points(s, n, p.d(), seed, cache));
        return solve_saa(p, xi, SaaMethod::l_shaped, opt).value;
    }, res.reference);
    return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
    const auto problem = generate_model(c.model, c.factorization);
    if (c.test_kind == TestKind::first) return run_first_kind(c, problem);
    const auto x = choose_fixed_x(c, problem);
    return run_second_kind(c, problem, x);
}

// ---------------------------------------------------------------------------
// rate fitting

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;  // 95% confidence half-width of the slope
};

namespace detail {
inline double t_quantile_975(double dof) {
    return boost::math::quantile(boost::math::students_t_distribution<double>(dof), 0.975);
}

inline std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_rate: sizes must not all be equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

inline std::vector<double> log10_checked(const std::vector<double>& v, const char* what) {
    std::vector<double> out;
    for (double e : v) {
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument(std::string("fit_rate: nonpositive ") + what);
        out.push_back(std::log10(e));
    }
    return out;
}
}  // namespace detail

/// Least-squares slope of log10(rmse) against log10(n), with the half-width
/// from the regression residuals (t quantile with k - 2 degrees of freedom).
inline RateFit fit_rate(const std::vector<double>& sizes, const std::vector<double>& rmses) {
    if (sizes.size() != rmses.size()) throw InvalidArgument("fit_rate: sizes and rmses differ in length");
    if (sizes.size() < 3) throw InvalidArgument("fit_rate: need at least three sizes");
    const auto lx = detail::log10_checked(sizes, "size");
    const auto ly = detail::log10_checked(rmses, "RMSE");
    const auto [slope, intercept] = detail::least_squares(lx, ly);
    double rss = 0.0, sxx = 0.0;
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        rss += r * r;
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double dof = static_cast<double>(lx.size()) - 2.0;
    const double se = std::sqrt(rss / dof / sxx);
    return {slope, intercept, detail::t_quantile_975(dof) * se};
}

/// One slope per repeat (over that repeat's sizes); the reported slope is
/// their mean and the half-width comes from their spread across repeats.
inline RateFit fit_rate_repeats(const std::vector<std::vector<double>>& sizes_per_repeat,
                                const std::vector<std::vector<double>>& rmses_per_repeat) {
    if (sizes_per_repeat.size() != rmses_per_repeat.size() || sizes_per_repeat.empty())
        throw InvalidArgument("fit_rate_repeats: need matching, nonempty series");
    std::vector<double> slopes, intercepts;
    for (std::size_t b = 0; b < sizes_per_repeat.size(); ++b) {
        const auto f = fit_rate(sizes_per_repeat[b], rmses_per_repeat[b]);
        slopes.push_back(f.slope);
        intercepts.push_back(f.intercept);
    }
    RateFit out;
    const double nb = static_cast<double>(slopes.size());
    out.slope = std::accumulate(slopes.begin(), slopes.end(), 0.0) / nb;
    out.intercept = std::accumulate(intercepts.begin(), intercepts.end(), 0.0) / nb;
    if (slopes.size() >= 2) {
        double ss = 0.0;
        for (double s : slopes) ss += (s - out.slope) * (s - out.slope);
        out.half_width = detail::t_quantile_975(nb - 1.0) * std::sqrt(ss / (nb - 1.0) / nb);
    } else {
        out.half_width = fit_rate(sizes_per_repeat[0], rmses_per_repeat[0]).half_width;
    }
    return out;
}

/// Records of one (test kind, sampler, factorization) group fitted repeat by repeat.
inline RateFit fit_group(const std::vector<RmseRecord>& records, TestKind kind, SamplerKind s, FactorKind f) {
    std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_repeat;
    for (const auto& r : records)
        if (r.test_kind == kind && r.sampler == s && r.factorization == f) {
            by_repeat[r.repeat].first.push_back(static_cast<double>(r.n));
            by_repeat[r.repeat].second.push_back(r.rmse);
        }
    if (by_repeat.empty()) throw InvalidArgument("fit_group: no records for " + to_string(s) + "/" + to_string(f));
    std::vector<std::vector<double>> xs, ys;
    for (auto& [b, v] : by_repeat) {
        xs.push_back(std::move(v.first));
        ys.push_back(std::move(v.second));
    }
    return fit_rate_repeats(xs, ys);
}

}  // namespace tsqmc
