#pragma once

// ARMA(p,q) autocovariances, Toeplitz covariance matrices and their
// Cholesky / PCA factors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/jacobi.hpp"
#include "tsqmc/linalg.hpp"

namespace tsqmc {

/// eta_t = sum_i alpha_i eta_{t-i} + gamma_t + sum_j beta_j gamma_{t-j}, gamma_t ~ N(0,1).
struct ArmaSpec {
    std::vector<double> alpha;
    std::vector<double> beta;

    [[nodiscard]] std::size_t p() const noexcept { return alpha.size(); }
    [[nodiscard]] std::size_t q() const noexcept { return beta.size(); }
};

/// Coefficients used in the production-planning experiments.
inline ArmaSpec reference_arma_spec() {
    return {{-0.52, 0.45}, {-0.17, 0.12, 0.05, -0.07, 0.06, 0.04}};
}

/// Roots of c[0] + c[1] z + ... + c[n] z^n by Durand-Kerner iteration.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& c) {
    if (c.size() < 2) return {};
    const std::size_t n = c.size() - 1;
    if (c[n] == 0.0) throw InvalidArgument("polynomial_roots: leading coefficient is zero");
    using cd = std::complex<double>;
    std::vector<double> monic(c.size());
    for (std::size_t i = 0; i <= n; ++i) monic[i] = c[i] / c[n];
    auto eval = [&](cd z) {
        cd r = 1.0;
        for (std::size_t i = n; i-- > 0;) r = r * z + monic[i];
        return r;
    };
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(monic[i]));
    radius = 1.0 + radius;
    std::vector<cd> z(n);
    const cd seed(0.4, 0.9);
    cd w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        w *= seed;
        z[i] = radius * w / std::abs(w);
    }
    for (int it = 0; it < 5000; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cd den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const cd step = eval(z[i]) / den;
            z[i] -= step;
            change = std::max(change, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        if (change < 1e-15) break;
    }
    return z;
}

struct ArmaStationarity {
    bool stationary = false;
    std::vector<std::complex<double>> ar_roots;  // zeros of P(z) = 1 - sum alpha_i z^i
    std::vector<std::complex<double>> ma_roots;  // zeros of Q(z) = 1 + sum beta_j z^j
    double min_ar_root_modulus = std::numeric_limits<double>::infinity();
    bool common_root = false;
};

/// Stationary iff every zero of P lies strictly outside the unit disk and P
/// and Q share no zero (zeros closer than 1e-9 count as shared).
inline ArmaStationarity arma_stationarity(const ArmaSpec& spec) {
    if (!spec.alpha.empty() && spec.alpha.back() == 0.0)
        throw InvalidArgument("ARMA: leading AR coefficient alpha_p is zero");
    if (!spec.beta.empty() && spec.beta.back() == 0.0)
        throw InvalidArgument("ARMA: leading MA coefficient beta_q is zero");
    std::vector<double> pc{1.0}, qc{1.0};
    for (double a : spec.alpha) pc.push_back(-a);
    for (double b : spec.beta) qc.push_back(b);
    ArmaStationarity out;
    out.ar_roots = polynomial_roots(pc);
    out.ma_roots = polynomial_roots(qc);
    for (const auto& r : out.ar_roots) out.min_ar_root_modulus = std::min(out.min_ar_root_modulus, std::abs(r));
    for (const auto& r : out.ar_roots)
        for (const auto& s : out.ma_roots)
            if (std::abs(r - s) <= 1e-9) out.common_root = true;
    out.stationary = out.min_ar_root_modulus > 1.0 + 1e-12 && !out.common_root;
    return out;
}

/// MA(infinity) weights psi_0 = 1, psi_k = beta_k + sum_i alpha_i psi_{k-i},
/// truncated once max(p,1) consecutive weights fall below 1e-14 in magnitude.
inline std::vector<double> arma_psi_weights(const ArmaSpec& spec, std::size_t max_terms = 2'000'000) {
    const std::size_t p = spec.p(), q = spec.q();
    const std::size_t window = std::max<std::size_t>(p, 1);
    std::vector<double> psi{1.0};
    std::size_t small_run = 0;
    for (std::size_t k = 1; k < max_terms; ++k) {
        double v = k <= q ? spec.beta[k - 1] : 0.0;
        for (std::size_t i = 1; i <= std::min(k, p); ++i) v += spec.alpha[i - 1] * psi[k - i];
        psi.push_back(v);
        small_run = std::abs(v) < 1e-14 ? small_run + 1 : 0;
        if (k > q && small_run >= window) return psi;
    }
    throw NotStationary("ARMA: MA(infinity) weights did not decay");
}

/// Autocovariances R(0..count-1) of the stationary process from psi weights.
inline std::vector<double> autocovariance_from_psi(const std::vector<double>& psi, std::size_t count) {
    std::vector<double> r(count, 0.0);
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t i = 0; i + k < psi.size(); ++i) r[k] += psi[i] * psi[i + k];
    return r;
}

/// lambda(1..T) = R(0..T-1). Throws NotStationary for non-stationary specs.
inline std::vector<double> arma_autocovariance(const ArmaSpec& spec, std::size_t horizon) {
    if (horizon == 0) throw InvalidArgument("ARMA: horizon must be at least 1");
    const auto st = arma_stationarity(spec);
    if (!st.stationary) {
        std::ostringstream msg;
        msg << "ARMA spec is not stationary (smallest AR root modulus " << st.min_ar_root_modulus
            << (st.common_root ? ", P and Q share a root" : "") << ")";
        throw NotStationary(msg.str());
    }
    return autocovariance_from_psi(arma_psi_weights(spec), horizon);
}

/// Largest residual of the extended Yule-Walker relations
///   R(k) - sum_i alpha_i R(|k-i|) = sum_{j=k}^{q} beta_j psi_{j-k}   (beta_0 = 1)
/// for k = 0 .. max(p, q) + extra.
inline double arma_yule_walker_residual(const ArmaSpec& spec, std::size_t extra = 10) {
    const auto psi = arma_psi_weights(spec);
    const std::size_t p = spec.p(), q = spec.q();
    const std::size_t kmax = std::max(p, q) + extra;
    const auto r = autocovariance_from_psi(psi, kmax + p + 1);
    double worst = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        double lhs = r[k];
        for (std::size_t i = 1; i <= p; ++i) lhs -= spec.alpha[i - 1] * r[k >= i ? k - i : i - k];
        double rhs = 0.0;
        for (std::size_t j = k; j <= q; ++j) rhs += (j == 0 ? 1.0 : spec.beta[j - 1]) * psi[j - k];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Simulated path eta_1..eta_steps after `burn_in` discarded steps.
inline std::vector<double> simulate_arma(const ArmaSpec& spec, std::size_t steps, std::uint64_t seed,
                                         std::size_t burn_in = 10'000) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t p = spec.p(), q = spec.q();
    std::vector<double> eta(p, 0.0), gam(q + 1, 0.0), out;
    out.reserve(steps);
    for (std::size_t t = 0; t < burn_in + steps; ++t) {
        for (std::size_t j = q; j > 0; --j) gam[j] = gam[j - 1];
        gam[0] = noise(gen);
        double v = gam[0];
        for (std::size_t j = 1; j <= q; ++j) v += spec.beta[j - 1] * gam[j];
        for (std::size_t i = 1; i <= p; ++i) v += spec.alpha[i - 1] * eta[i - 1];
        if (p > 0) {
            for (std::size_t i = p - 1; i > 0; --i) eta[i] = eta[i - 1];
            eta[0] = v;
        }
        if (t >= burn_in) out.push_back(v);
    }
    return out;
}

/// Sigma(i,j) = lambda(|i-j|+1).
inline Matrix toeplitz_cov(const std::vector<double>& lambda) {
    if (lambda.empty() || !(lambda[0] > 0.0)) throw InvalidArgument("toeplitz_cov: lambda(1) must be positive");
    const std::size_t n = lambda.size();
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = lambda[i > j ? i - j : j - i];
    return s;
}

enum class FactorKind { cholesky, pca };

inline std::string to_string(FactorKind k) { return k == FactorKind::cholesky ? "cholesky" : "pca"; }

inline FactorKind parse_factor_kind(const std::string& s) {
    if (s == "cholesky" || s == "ch") return FactorKind::cholesky;
    if (s == "pca") return FactorKind::pca;
    throw InvalidArgument("unknown factorization '" + s + "' (expected cholesky or pca)");
}

/// A with A * A^T = Sigma.
struct Factorization {
    Matrix a;
    FactorKind kind = FactorKind::cholesky;
    std::vector<double> eigenvalues;  // pca only, descending
};

/// Reconstruction tolerance, relative to max |Sigma|, promised for each kind.
inline double reconstruction_tolerance(FactorKind k) { return k == FactorKind::cholesky ? 1e-10 : 1e-8; }

inline double reconstruction_error(const Factorization& f, const Matrix& sigma) {
    return max_abs_diff(gram(f.a), sigma) / sigma.max_abs();
}

namespace detail {
inline void require_symmetric(const Matrix& s, const char* who) {
    if (s.rows() != s.cols() || s.rows() == 0) throw InvalidArgument(std::string(who) + ": matrix must be square");
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (s(i, j) != s(j, i)) throw InvalidArgument(std::string(who) + ": matrix is not symmetric");
}
}  // namespace detail

/// Lower-triangular L with L L^T = Sigma. A non-positive pivot raises
/// NotPositiveDefinite carrying its 1-based index.
inline Factorization cholesky(const Matrix& sigma) {
    detail::require_symmetric(sigma, "cholesky");
    const std::size_t n = sigma.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = sigma(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw NotPositiveDefinite(j + 1);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = sigma(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return {std::move(l), FactorKind::cholesky, {}};
}

/// U_P = (sqrt(lambda_1) u_1, ..., sqrt(lambda_d) u_d) with eigenvalues in
/// descending order.
inline Factorization pca_factor(const Matrix& sigma) {
    detail::require_symmetric(sigma, "pca_factor");
    auto eig = jacobi_eigen(sigma, 1e-12);
    const std::size_t n = sigma.rows();
    const double floor = -1e-8 * sigma.max_abs();
    for (std::size_t c = 0; c < n; ++c)
        if (eig.values[c] < floor) throw NotPositiveDefinite(c + 1);
    Matrix a(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        const double s = std::sqrt(std::max(eig.values[c], 0.0));
        for (std::size_t r = 0; r < n; ++r) a(r, c) = eig.vectors(r, c) * s;
    }
    return {std::move(a), FactorKind::pca, std::move(eig.values)};
}

inline Factorization factorize(const Matrix& sigma, FactorKind kind) {
    return kind == FactorKind::cholesky ? cholesky(sigma) : pca_factor(sigma);
}

/// True iff Q = A^{-1} B is orthogonal, i.e. max |Q^T Q - I| <= tol. Then
/// A A^T = B B^T.
inline bool orthogonal_equivalence(const Matrix& a, const Matrix& b, double tol = 1e-8) {
    if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols())
        throw InvalidArgument("orthogonal_equivalence: shapes differ");
    LuDecomposition lu(a);
    if (lu.singular()) throw SingularMatrix("orthogonal_equivalence: A is singular");
    const Matrix q = lu.solve(b);
    return max_abs_diff(q.transpose() * q, Matrix::identity(a.rows())) <= tol;
}

/// Comma-separated rows with 17 significant digits.
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
    const auto old = out.precision(17);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    out.precision(old);
}

inline Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
        if (!rows.empty() && r.size() != rows.front().size()) throw InvalidArgument("matrix CSV: ragged rows");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

} // namespace tsqmc
