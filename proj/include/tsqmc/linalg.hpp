#pragma once

// Small dense row-major matrix and an LU solver. Sizes in this library stay
// in the low hundreds, so nothing here is blocked or vectorised.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "tsqmc/errors.hpp"

namespace tsqmc {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw InvalidArgument("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    [[nodiscard]] std::vector<double> col(std::size_t j) const {
        std::vector<double> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    [[nodiscard]] Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidArgument("matrix product: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Matrix operator*(double s, Matrix m) {
    m *= s;
    return m;
}

inline std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw InvalidArgument("matrix-vector product: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const auto r = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// A·Aᵀ.
inline Matrix gram(const Matrix& a) {
    Matrix g(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * a(j, k);
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// LU factorisation with partial pivoting of a square matrix.
class LuDecomposition {
public:
    explicit LuDecomposition(Matrix a, double singular_tol = 1e-13) : lu_(std::move(a)), perm_(lu_.rows()) {
        if (lu_.rows() != lu_.cols()) throw InvalidArgument("LU: matrix must be square");
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        const double scale = std::max(lu_.max_abs(), 1e-300);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
            if (std::abs(lu_(p, k)) <= singular_tol * scale) {
                singular_ = true;
                return;
            }
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(k, j));
                std::swap(perm_[p], perm_[k]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = lu_(i, k) / lu_(k, k);
                lu_(i, k) = f;
                if (f == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    [[nodiscard]] bool singular() const noexcept { return singular_; }

    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const {
        if (singular_) throw SingularMatrix("LU solve: matrix is singular");
        const std::size_t n = lu_.rows();
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    [[nodiscard]] Matrix solve(const Matrix& b) const {
        Matrix x(b.rows(), b.cols());
        for (std::size_t j = 0; j < b.cols(); ++j) {
            const auto c = solve(b.col(j));
            for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = c[i];
        }
        return x;
    }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

/// Numerical rank of the rows of `a` by Gaussian elimination with full pivoting.
inline std::size_t matrix_rank(Matrix a, double tol = 1e-9) {
    std::size_t rank = 0;
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<bool> used_col(n, false);
    for (std::size_t r = 0; r < m && rank < n; ++r) {
        // pick the largest remaining entry in the submatrix rows r.., any unused column
        std::size_t pi = m, pj = n;
        double best = tol;
        for (std::size_t i = r; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!used_col[j] && std::abs(a(i, j)) > best) {
                    best = std::abs(a(i, j));
                    pi = i;
                    pj = j;
                }
        if (pi == m) break;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(pi, j), a(r, j));
        used_col[pj] = true;
        for (std::size_t i = r + 1; i < m; ++i) {
            const double f = a(i, pj) / a(r, pj);
            for (std::size_t j = 0; j < n; ++j) a(i, j) -= f * a(r, j);
        }
        ++rank;
    }
    return rank;
}

} // namespace tsqmc
