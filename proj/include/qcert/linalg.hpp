#pragma once

// Small dense linear algebra: kernel bases, symmetric eigenvalues,
// determinants and quadratic forms. Sized for n <= ~16.

#include <qcert/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qcert {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw Error(ErrorKind::DimensionMismatch, "matrix entry count does not equal rows*cols");
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> entries() const noexcept { return data_; }
    std::span<double> entries() noexcept { return data_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs(const Matrix& m) { return max_abs(m.entries()); }

inline double frobenius(const Matrix& m) { return norm(m.entries()); }

inline Vector scaled(std::span<const double> a, double c) {
    Vector r(a.begin(), a.end());
    for (double& v : r) v *= c;
    return r;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

/// (M + M^T) / 2
inline Matrix symmetric_part(const Matrix& m) {
    if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "symmetric_part needs a square matrix");
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

inline double asymmetry(const Matrix& m) {
    double a = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) a = std::max(a, std::abs(m(i, j) - m(j, i)));
    return a;
}

/// Orthonormal basis of the hyperplane {w : <w, v> = 0}.
///
/// A single Householder reflector H = I - 2 u u^T / (u^T u) with
/// u = v - alpha e_1 sends v to alpha e_1; columns 2..n of H are returned.
/// alpha takes the sign opposite to v_1 so u never suffers cancellation.
/// The construction is branch-free apart from that sign, so repeated calls
/// on the same input agree bit-for-bit.
inline std::vector<Vector> kernel_basis(std::span<const double> v, double tol = 1e-12) {
    const std::size_t n = v.size();
    if (n == 0) throw Error(ErrorKind::DimensionMismatch, "kernel_basis of an empty vector");
    const double nv = norm(v);
    if (!(nv > tol)) throw Error(ErrorKind::ZeroVector, "kernel_basis: |v| <= tol");

    const double alpha = v[0] >= 0.0 ? -nv : nv;
    Vector u(v.begin(), v.end());
    u[0] -= alpha;
    const double uu = dot(u, u);

    std::vector<Vector> basis;
    basis.reserve(n - 1);
    for (std::size_t j = 1; j < n; ++j) {
        Vector col(n);
        const double coef = 2.0 * u[j] / uu;
        for (std::size_t i = 0; i < n; ++i) col[i] = (i == j ? 1.0 : 0.0) - coef * u[i];
        basis.push_back(std::move(col));
    }
    return basis;
}

/// B^T M B for a basis given as a list of column vectors.
inline Matrix restrict_form(const Matrix& m, const std::vector<Vector>& basis) {
    const std::size_t k = basis.size();
    std::vector<Vector> mb;
    mb.reserve(k);
    for (const auto& b : basis) mb.push_back(m * b);
    Matrix r(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) r(i, j) = dot(basis[i], mb[j]);
    return r;
}

/// w^T M w in one pass.
inline double quadratic_form(const Matrix& m, std::span<const double> w) {
    if (!m.square() || m.rows() != w.size())
        throw Error(ErrorKind::DimensionMismatch, "quadratic_form: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * w[j];
        s += w[i] * row;
    }
    return s;
}

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // column k pairs with values[k]
};

inline constexpr double kDefaultSymmetryTol = 1e-8;

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops to 1e-12 * |S|_F.
inline SymmetricEigen eig_symmetric_vectors(const Matrix& s, double tol = kDefaultSymmetryTol) {
    if (!s.square()) throw Error(ErrorKind::DimensionMismatch, "eig_symmetric: matrix not square");
    const double scale = 1.0 + max_abs(s);
    if (asymmetry(s) > tol * scale)
        throw Error(ErrorKind::NotSymmetric, "eig_symmetric: asymmetry exceeds tolerance");

    const std::size_t n = s.rows();
    Matrix a = symmetric_part(s);
    Matrix v = Matrix::identity(n);
    const double target = 1e-12 * frobenius(a);

    auto off_norm = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) acc += a(i, j) * a(i, j);
        return std::sqrt(acc);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline Vector eig_symmetric(const Matrix& s, double tol = kDefaultSymmetryTol) {
    return eig_symmetric_vectors(s, tol).values;
}

namespace detail {

inline bool integral_entries(const Matrix& m) {
    for (double v : m.entries())
        if (!(std::abs(v) <= 1048576.0) || std::trunc(v) != v) return false;
    return true;
}

// Fraction-free (Bareiss) elimination; every intermediate is an integer
// minor, so small integer inputs give exact results.
inline double determinant_bareiss(Matrix a) {
    const std::size_t n = a.rows();
    double sign = 1.0;
    double prev = 1.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            a(i, k) = 0.0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

inline double determinant_lu(Matrix a) {
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = a(i, k) / a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
        }
    }
    return det;
}

} // namespace detail

/// Determinant by row-pivoted elimination. Integer-valued inputs take the
/// fraction-free path so their sign is exact.
inline double determinant(const Matrix& m) {
    if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "determinant of a non-square matrix");
    if (m.rows() == 0) return 1.0;
    if (detail::integral_entries(m)) return detail::determinant_bareiss(m);
    return detail::determinant_lu(m);
}

} // namespace qcert
