#pragma once

// Bordered-determinant sign test ("Property N") for a form A restricted to
// the hyperplane orthogonal to a border vector b, and an exploratory mode
// that applies it to a possibly nonsymmetric Jacobian Dg(x).

#include <qcert/certifier.hpp>
#include <qcert/function_model.hpp>
#include <qcert/linalg.hpp>
#include <qcert/report.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qcert {

inline constexpr std::size_t kMaxPropertyNDim = 12;

/// Square matrix A with border vector b.
class BorderedForm {
public:
    BorderedForm(Matrix a, Vector b, bool symmetric = true) : a_(std::move(a)), b_(std::move(b)), symmetric_(symmetric) {
        if (!a_.square() || a_.rows() != b_.size() || b_.empty())
            throw Error(ErrorKind::DimensionMismatch, "bordered form needs an n x n matrix and an n-vector");
        if (symmetric_ && asymmetry(a_) > 1e-8 * (1.0 + max_abs(a_)))
            throw Error(ErrorKind::NotSymmetric, "bordered form flagged symmetric but A != A^T");
        if (max_abs(b_) == 0.0) throw Error(ErrorKind::DegenerateBorder, "border vector is zero");
    }

    const Matrix& a() const noexcept { return a_; }
    const Vector& b() const noexcept { return b_; }
    bool symmetric() const noexcept { return symmetric_; }
    std::size_t dim() const noexcept { return b_.size(); }

private:
    Matrix a_;
    Vector b_;
    bool symmetric_;
};

/// (-1)^j det [[A_SS, b_S], [b_S^T, 0]] for the ordered index list S of
/// length j >= 2 (0-based indices).
inline double bordered_minor(const BorderedForm& form, const std::vector<std::size_t>& indices) {
    const std::size_t j = indices.size();
    if (j < 2 || j > form.dim()) throw Error(ErrorKind::BadIndices, "need between 2 and n indices");
    for (std::size_t a = 0; a < j; ++a) {
        if (indices[a] >= form.dim()) throw Error(ErrorKind::BadIndices, "index out of range");
        for (std::size_t b = a + 1; b < j; ++b)
            if (indices[a] == indices[b]) throw Error(ErrorKind::BadIndices, "indices must be distinct");
    }
    Matrix m(j + 1, j + 1, 0.0);
    for (std::size_t r = 0; r < j; ++r) {
        for (std::size_t c = 0; c < j; ++c) m(r, c) = form.a()(indices[r], indices[c]);
        m(r, j) = form.b()[indices[r]];
        m(j, r) = form.b()[indices[r]];
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return sign * determinant(m);
}

namespace detail {

// Calls visit(subset) for every subset of {0..n-1} of size 2..n, by size
// and then lexicographically.
template <typename Visit>
void for_each_subset(std::size_t n, Visit&& visit) {
    for (std::size_t j = 2; j <= n; ++j) {
        std::vector<std::size_t> s(j);
        for (std::size_t i = 0; i < j; ++i) s[i] = i;
        for (;;) {
            visit(s);
            std::size_t i = j;
            while (i > 0 && s[i - 1] == n - j + (i - 1)) --i;
            if (i == 0) break;
            ++s[i - 1];
            for (std::size_t k = i; k < j; ++k) s[k] = s[k - 1] + 1;
        }
    }
}

} // namespace detail

/// Certified iff every bordered principal minor is >= -tol. Subsets
/// replace permutations: a simultaneous row/column permutation of the
/// bordered matrix leaves its determinant unchanged. Minors with
/// |minor| <= tol are counted as boundary cases.
inline CertReport property_n_check(const BorderedForm& form, double tol = kDefaultTol) {
    const std::size_t n = form.dim();
    if (n > kMaxPropertyNDim) throw Error(ErrorKind::TooLarge, "Property N enumeration is limited to n <= 12");
    if (!(max_abs(form.b()) > tol)) throw Error(ErrorKind::DegenerateBorder, "all |b_i| <= tol");

    CertReport report;
    report.mode = Mode::property_n;
    report.tolerances = {tol, -tol};
    double min_minor = std::numeric_limits<double>::infinity();
    std::size_t checked = 0;
    std::size_t boundary = 0;
    detail::for_each_subset(n, [&](const std::vector<std::size_t>& subset) {
        const double minor = bordered_minor(form, subset);
        ++checked;
        if (std::abs(minor) <= tol) ++boundary;
        if (minor < min_minor || std::isnan(minor)) min_minor = minor;
        if (!(minor >= -tol) && report.witnesses.empty())
            report.witnesses.push_back({"negative_bordered_minor", {}, {}, 0.0, minor, 0.0, -minor, {}, subset});
    });
    report.verdict = report.witnesses.empty() ? Verdict::certified : Verdict::refuted;
    report.grid.points_evaluated = checked;
    report.metadata["min_minor"] = min_minor;
    report.metadata["boundary_minors"] = boundary;
    report.metadata["subsets_checked"] = checked;
    report.metadata["symmetric"] = form.symmetric();
    return report;
}

/// EXPERIMENTAL. Runs the bordered-determinant test on the raw (unsymmetrized)
/// pair (Dg(x), g(x)/|g(x)|) next to the kernel eigenvalue test at every grid
/// point and tabulates agreement. Asserts nothing.
inline ComparisonReport conjecture_mode(const C1StarPair& pair, const BoxDomain& domain, const GridSpec& grid,
                                        double tol = kDefaultTol) {
    ComparisonReport report;
    report.mode = Mode::conjecture;
    report.left_name = "property_n";
    report.right_name = "theorem1";
    const std::size_t n = domain.dim();
    double max_asym = 0.0;
    for (const auto& x : sample_points(domain, grid)) {
        const Vector g = pair.g(x);
        if (g.size() != n) throw Error(ErrorKind::DimensionMismatch, "g(x) and x differ in size");
        if (!(std::abs(g[0]) > tol)) throw Error(ErrorKind::PreconditionFailed, "|g_1(x)| <= tol at a grid point");
        const Matrix dg = detail::checked_jacobian(pair, x, n);
        max_asym = std::max(max_asym, asymmetry(dg));
        const auto pn = property_n_check(BorderedForm(dg, scaled(g, 1.0 / norm(g)), false), tol);
        const auto t1 = theorem1_point(pair, x, tol);
        report.rows.push_back({x, pn.verdict == Verdict::certified, pn.metadata["min_minor"].get<double>(),
                               t1.max_kernel_eig <= tol, t1.max_kernel_eig});
    }
    report.summary["max_asymmetry"] = max_asym;
    report.metadata["experimental"] = true;
    report.metadata["tol"] = tol;
    report.metadata["fd_used"] = !pair.has_dg();
    return report;
}

} // namespace qcert
