#pragma once

// Monte Carlo and randomized quasi-Monte Carlo point sets in [0,1)^d.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tsqmc/direction_numbers.hpp"
#include "tsqmc/errors.hpp"
#include "tsqmc/seeds.hpp"

namespace tsqmc {

enum class PointKind { mc, sobol, sobol_scrambled, lattice_shifted };

inline std::string to_string(PointKind k) {
    switch (k) {
        case PointKind::mc: return "mc";
        case PointKind::sobol: return "sobol";
        case PointKind::sobol_scrambled: return "sobol_scrambled";
        case PointKind::lattice_shifted: return "lattice_shifted";
    }
    return "?";
}

/// A point of [0,1)^d, e.g. a lattice shift.
class UnitPoint {
public:
    UnitPoint() = default;
    explicit UnitPoint(std::vector<double> coords) : coords_(std::move(coords)) {
        for (double c : coords_)
            if (!(c >= 0.0 && c < 1.0)) throw InvalidArgument("UnitPoint: coordinate outside [0,1)");
    }
    [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
    [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

private:
    std::vector<double> coords_;
};

/// n points of dimension d stored row-major. Immutable after construction.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t n, std::size_t d, std::vector<double> coords, PointKind kind, std::uint64_t seed)
        : n_(n), d_(d), coords_(std::move(coords)), kind_(kind), seed_(seed) {
        if (coords_.size() != n_ * d_) throw InvalidArgument("PointSet: coordinate count != n*d");
        for (double c : coords_)
            if (!(c >= 0.0 && c < 1.0)) throw InvalidArgument("PointSet: coordinate outside [0,1)");
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return d_; }
    [[nodiscard]] PointKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::span<const double> point(std::size_t j) const { return {coords_.data() + j * d_, d_}; }
    [[nodiscard]] std::span<const double> operator[](std::size_t j) const { return point(j); }
    [[nodiscard]] double at(std::size_t j, std::size_t i) const { return coords_[j * d_ + i]; }
    [[nodiscard]] const std::vector<double>& coords() const noexcept { return coords_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> coords_;
    PointKind kind_ = PointKind::mc;
    std::uint64_t seed_ = 0;
};

namespace detail {

inline void check_shape(std::size_t n, std::size_t d) {
    if (n == 0) throw InvalidArgument("point set: n must be at least 1");
    if (d == 0) throw InvalidArgument("point set: dimension must be at least 1");
}

/// genrand_res53: a double in [0,1) from two 32-bit MT19937 outputs.
inline double uniform53(std::mt19937& gen) {
    const std::uint32_t a = gen() >> 5, b = gen() >> 6;
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0);
}

inline std::mt19937 seeded_mt(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937(seq);
}

inline constexpr double kTwoPowMinus32 = 1.0 / 4294967296.0;

inline std::uint32_t sobol_digits(const std::array<std::uint32_t, kSobolBits>& v, std::uint64_t index) {
    std::uint32_t x = 0;
    for (unsigned b = 0; index != 0; ++b, index >>= 1)
        if (index & 1u) x ^= v[b];
    return x;
}

}  // namespace detail

/// iid uniform points from MT19937, coordinates filled point by point.
inline PointSet mc_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    detail::check_shape(n, d);
    auto gen = detail::seeded_mt(seed);
    std::vector<double> x(n * d);
    for (double& v : x) v = detail::uniform53(gen);
    return {n, d, std::move(x), PointKind::mc, seed};
}

/// Sobol' point ordering. Natural order uses index j; Gray-code order uses
/// j ^ (j >> 1). Both give the same set when n is a power of two.
enum class SobolOrder { natural, gray };

/// Unscrambled Sobol' points x^0..x^{n-1} (x^0 = 0) with 32-bit precision.
inline PointSet sobol_points(std::size_t n, std::size_t d,
                             const DirectionNumberTable& table = DirectionNumberTable::bundled(),
                             SobolOrder order = SobolOrder::natural) {
    detail::check_shape(n, d);
    if (d > table.max_dimension())
        throw InvalidArgument("Sobol': dimension " + std::to_string(d) + " exceeds table size " +
                              std::to_string(table.max_dimension()));
    std::vector<double> x(n * d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto v = table.direction_numbers(i);
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t idx = order == SobolOrder::gray ? (j ^ (j >> 1)) : j;
            x[j * d + i] = detail::sobol_digits(v, idx) * detail::kTwoPowMinus32;
        }
    }
    return {n, d, std::move(x), PointKind::sobol, 0};
}

/// Sobol' points with random linear (Matousek) scrambling: per coordinate a
/// random lower-triangular 32x32 bit matrix with unit diagonal multiplies the
/// digit vector, followed by a random digital shift.
inline PointSet scramble_linear(std::size_t n, std::size_t d, std::uint64_t seed,
                                const DirectionNumberTable& table = DirectionNumberTable::bundled(),
                                SobolOrder order = SobolOrder::natural) {
    detail::check_shape(n, d);
    if (d > table.max_dimension())
        throw InvalidArgument("Sobol': dimension " + std::to_string(d) + " exceeds table size " +
                              std::to_string(table.max_dimension()));
    std::vector<double> x(n * d);
    for (std::size_t i = 0; i < d; ++i) {
        std::mt19937_64 gen(derive_seed(seed, {0x5C7A, i}));
        // Column k (input digit k+1, most significant first) has its diagonal
        // bit and random bits in the less significant output digits.
        std::array<std::uint32_t, kSobolBits> columns{};
        for (unsigned k = 0; k < kSobolBits; ++k) {
            const std::uint32_t diag = 1u << (kSobolBits - 1 - k);
            const std::uint32_t below = diag - 1u;
            columns[k] = diag | (static_cast<std::uint32_t>(gen()) & below);
        }
        const auto shift = static_cast<std::uint32_t>(gen());
        auto v = table.direction_numbers(i);
        for (auto& vb : v) {
            std::uint32_t out = 0;
            for (unsigned k = 0; k < kSobolBits; ++k)
                if ((vb >> (kSobolBits - 1 - k)) & 1u) out ^= columns[k];
            vb = out;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t idx = order == SobolOrder::gray ? (j ^ (j >> 1)) : j;
            x[j * d + i] = (detail::sobol_digits(v, idx) ^ shift) * detail::kTwoPowMinus32;
        }
    }
    return {n, d, std::move(x), PointKind::sobol_scrambled, seed};
}

/// Tent (baker's) transform x -> 1 - |2x - 1|, kept inside [0,1).
inline PointSet tent_transform(const PointSet& points) {
    std::vector<double> x = points.coords();
    constexpr double below_one = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    for (double& v : x) v = std::min(1.0 - std::abs(2.0 * v - 1.0), below_one);
    return {points.size(), points.dim(), std::move(x), points.kind(), points.seed()};
}

/// Weighted L2 discrepancy of the projection of `points` onto coordinates `u`
/// (0-based), i.e. sqrt(gamma_u * integral of disc_u^2) with the local
/// discrepancy anchored at the origin, via Warnock's closed form.
inline double weighted_l2_discrepancy(const PointSet& points, std::span<const std::size_t> u, double gamma_u) {
    if (u.empty()) throw InvalidArgument("discrepancy: coordinate subset u is empty");
    if (!(gamma_u > 0.0)) throw InvalidArgument("discrepancy: weight must be positive");
    for (auto i : u)
        if (i >= points.dim()) throw InvalidArgument("discrepancy: coordinate index out of range");
    const std::size_t n = points.size();
    const double s = static_cast<double>(u.size());
    double single = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double p = 1.0;
        for (auto i : u) {
            const double x = points.at(j, i);
            p *= (1.0 - x * x) / 2.0;
        }
        single += p;
    }
    double pair = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            double p = 1.0;
            for (auto i : u) p *= 1.0 - std::max(points.at(j, i), points.at(k, i));
            pair += p;
        }
    const double nd = static_cast<double>(n);
    const double sq = std::pow(3.0, -s) - 2.0 / nd * single + pair / (nd * nd);
    return std::sqrt(gamma_u * std::max(sq, 0.0));
}

}  // namespace tsqmc
