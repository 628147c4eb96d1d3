#pragma once

// Rank-1 lattice rules built component by component, and their randomly
// shifted point sets.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/points.hpp"

namespace tsqmc {

/// Positive nonincreasing product weights gamma_1 >= gamma_2 >= ... > 0.
class WeightSequence {
public:
    explicit WeightSequence(std::vector<double> gamma) : gamma_(std::move(gamma)) {
        for (std::size_t j = 0; j < gamma_.size(); ++j) {
            if (!(gamma_[j] > 0.0)) throw InvalidArgument("weights must be positive");
            if (j > 0 && gamma_[j] > gamma_[j - 1]) throw InvalidArgument("weights must be nonincreasing");
        }
    }

    /// gamma_j = j^(-power), j = 1..d. The default power 3 gives cubic decay.
    static WeightSequence power_decay(std::size_t d, double power = 3.0) {
        std::vector<double> g(d);
        for (std::size_t j = 0; j < d; ++j) g[j] = std::pow(static_cast<double>(j + 1), -power);
        return WeightSequence(std::move(g));
    }

    [[nodiscard]] std::size_t size() const noexcept { return gamma_.size(); }
    double operator[](std::size_t j) const { return gamma_[j]; }

private:
    std::vector<double> gamma_;
};

struct LatticeRule {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> z;
};

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

/// Second Bernoulli polynomial B2(x) = x^2 - x + 1/6.
inline double bernoulli2(double x) { return x * x - x + 1.0 / 6.0; }

/// Shift-averaged squared worst-case error of the rank-1 rule (n, z) in the
/// unanchored weighted Sobolev space:
///   e^2 = -1 + (1/n) sum_k prod_j [1 + gamma_j B2({k z_j / n})].
inline double worst_case_error_sq(const LatticeRule& rule, const WeightSequence& weights) {
    if (rule.n == 0) throw InvalidArgument("lattice: n must be positive");
    if (weights.size() < rule.z.size()) throw InvalidArgument("lattice: fewer weights than coordinates");
    // B2(k/n) = (6k^2 - 6kn + n^2) / (6n^2) with an exact integer numerator,
    // and the product minus one is accumulated as (1 + q)(1 + a) - 1 = q + a + q a
    // in long double so the leading -1 does not cancel against the sum.
    const long double n2 = 6.0L * static_cast<long double>(rule.n) * static_cast<long double>(rule.n);
    long double sum = 0.0L;
    for (std::uint64_t k = 0; k < rule.n; ++k) {
        long double q = 0.0L;
        for (std::size_t j = 0; j < rule.z.size(); ++j) {
            const auto r = static_cast<long double>((k * rule.z[j]) % rule.n);
            const long double nl = static_cast<long double>(rule.n);
            const long double a = weights[j] * ((6.0L * r * r - 6.0L * r * nl + nl * nl) / n2);
            q += a + q * a;
        }
        sum += q;
    }
    return static_cast<double>(sum / static_cast<long double>(rule.n));
}

/// Component-by-component construction for prime n. Coordinate s picks the
/// z_s in {1..n-1} minimising e^2 given z_1..z_{s-1}; ties go to the
/// smallest candidate. Since B2(x) = B2(1-x), z and n-z give the same error,
/// so only candidates up to n/2 are searched.
inline LatticeRule cbc_construct(std::uint64_t n, std::size_t d, const WeightSequence& weights) {
    if (!is_prime(n)) throw InvalidArgument("CBC: n = " + std::to_string(n) + " is not prime");
    if (d == 0) throw InvalidArgument("CBC: dimension must be at least 1");
    if (weights.size() < d) throw InvalidArgument("CBC: fewer weights than coordinates");

    const double nd = static_cast<double>(n);
    std::vector<double> b2(n);
    for (std::uint64_t k = 0; k < n; ++k) b2[k] = bernoulli2(static_cast<double>(k) / nd);

    LatticeRule rule{n, {}};
    std::vector<double> prod(n, 1.0);  // prod_{j<s} [1 + gamma_j B2({k z_j/n})]
    const std::uint64_t last = n == 2 ? 1 : n / 2;
    for (std::size_t s = 0; s < d; ++s) {
        const double g = weights[s];
        std::uint64_t best_z = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t cand = 1; cand <= last; ++cand) {
            double sum = 0.0;
            std::uint64_t idx = 0;
            for (std::uint64_t k = 0; k < n; ++k) {
                sum += prod[k] * (1.0 + g * b2[idx]);
                idx += cand;
                if (idx >= n) idx -= n;
            }
            if (cand == 1 || sum < best - 1e-13 * std::abs(best)) {
                best = sum;
                best_z = cand;
            }
        }
        rule.z.push_back(best_z);
        for (std::uint64_t k = 0; k < n; ++k) prod[k] *= 1.0 + g * b2[(k * best_z) % n];
    }
    return rule;
}

/// Uniform random shift in [0,1)^d.
inline UnitPoint random_shift(std::size_t d, std::uint64_t seed) {
    auto gen = detail::seeded_mt(seed);
    std::vector<double> delta(d);
    for (double& v : delta) v = detail::uniform53(gen);
    return UnitPoint(std::move(delta));
}

/// Points x^j = frac(j z / n + shift), j = 0..n-1.
inline PointSet shifted_lattice(const LatticeRule& rule, const UnitPoint& shift, std::uint64_t seed = 0) {
    const std::size_t d = rule.z.size();
    if (shift.dim() != d)
        throw InvalidArgument("lattice: shift has dimension " + std::to_string(shift.dim()) + ", rule has " +
                              std::to_string(d));
    if (rule.n == 0 || d == 0) throw InvalidArgument("lattice: empty rule");
    const double nd = static_cast<double>(rule.n);
    std::vector<double> x(rule.n * d);
    for (std::uint64_t j = 0; j < rule.n; ++j)
        for (std::size_t i = 0; i < d; ++i) {
            double v = static_cast<double>((j * rule.z[i]) % rule.n) / nd + shift[i];
            if (v >= 1.0) v -= 1.0;
            x[j * d + i] = v < 1.0 ? v : 0.0;
        }
    return {rule.n, d, std::move(x), PointKind::lattice_shifted, seed};
}

}  // namespace tsqmc
