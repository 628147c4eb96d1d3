// Small end-to-end run on the production-planning model: solve a sampled
// problem for x, then compare Monte Carlo and scrambled Sobol' estimates of
// the expected recourse cost at that x under PCA and Cholesky factors.

#include <cstdio>

#include "tsqmc/experiment.hpp"

int main() {
    using namespace tsqmc;
    ExperimentConfig config;
    config.samplers = {SamplerKind::mc, SamplerKind::sobol};
    config.repeats = 1;
    config.reference_points = 1u << 14;

    const auto problem = generate_model(config.model);
    std::printf("model %s: %zu first-stage variables, %zu recourse columns, d = %zu\n", problem.name.c_str(),
                problem.first_stage_dim(), problem.w.cols(), problem.d());

    const auto x = choose_fixed_x(config, problem);
    std::printf("first stage from SAA over %zu scenarios, c^T x = %.4f\n", config.fixed_x_points, dot(problem.c, x));

    std::optional<double> reference, half;
    for (auto f : {FactorKind::pca, FactorKind::cholesky}) {
        config.factorization = f;
        const auto res = run_second_kind(config, problem, x, reference, half);
        reference = res.reference;
        half = res.reference_half;
        std::printf("\n%s   (reference E[Phi] = %.6f)\n", to_string(f).c_str(), res.reference);
        std::printf("  %-6s %6s %12s\n", "sampler", "n", "rel. RMSE");
        for (const auto& r : res.records)
            std::printf("  %-6s %6zu %12.3e\n", to_string(r.sampler).c_str(), r.n, r.rmse);
    }
    return 0;
}
