#pragma once

// Grid certification of quasi-concavity through the kernel-restricted
// quadratic form <w, Dg(x) w> on {w : <w, g(x)> = 0}, its strict
// variant, and the hyperplane-maximum (Lagrange multiplier) spot check.

#include <qcert/function_model.hpp>
#include <qcert/linalg.hpp>
#include <qcert/report.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace qcert {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr double kDefaultViolationFactor = 10.0;

namespace detail {

struct KernelProbe {
    double max_eig = 0.0;
    Vector direction;  // unit vector attaining max_eig (empty for an empty kernel)
};

// Largest eigenvalue of sym(Dg) restricted to span(basis).
inline KernelProbe probe_restricted(const Matrix& sym_dg, const std::vector<Vector>& basis) {
    if (basis.empty()) return {std::numeric_limits<double>::lowest(), {}};
    const Matrix k = restrict_form(sym_dg, basis);
    const auto eig = eig_symmetric_vectors(k, 1e-6);
    const std::size_t top = eig.values.size() - 1;
    Vector w(sym_dg.rows(), 0.0);
    for (std::size_t b = 0; b < basis.size(); ++b)
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += eig.vectors(b, top) * basis[b][i];
    return {eig.values[top], w};
}

inline std::vector<Vector> standard_basis(std::size_t n) {
    std::vector<Vector> basis(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) basis[i][i] = 1.0;
    return basis;
}

inline Matrix checked_jacobian(const C1StarPair& pair, const Vector& x, std::size_t n) {
    Matrix dg = jacobian(pair, x);
    if (dg.rows() != n || dg.cols() != n) throw Error(ErrorKind::DimensionMismatch, "Dg(x) must be n x n");
    return dg;
}

} // namespace detail

/// Pointwise kernel test at x. Passes iff max_kernel_eig <= tol.
inline PointMargin theorem1_point(const C1StarPair& pair, const Vector& x, double tol = kDefaultTol) {
    const Vector g = pair.g(x);
    if (g.size() != x.size()) throw Error(ErrorKind::DimensionMismatch, "g(x) and x differ in size");
    const double gn = norm(g);
    if (!(gn > tol)) throw Error(ErrorKind::VanishingGradient, "|g(x)| <= tol");
    const Matrix sym = symmetric_part(detail::checked_jacobian(pair, x, x.size()));
    return {x, detail::probe_restricted(sym, kernel_basis(g, tol)).max_eig, gn};
}

/// Theorem-1 certification over a grid. Verdicts are relative to the
/// sampled points.
///
///   precondition_failed  some point has |g(x)| <= tol
///   refuted              some margin exceeds violation_factor * tol
///   certified            every margin <= tol
///   undetermined         otherwise
///
/// Points with vanishing g record the largest eigenvalue of sym(Dg(x)) over
/// the whole space as their margin.
inline CertReport certify_theorem1(const C1StarPair& pair, const BoxDomain& domain, const GridSpec& grid,
                                   double tol = kDefaultTol, double violation_factor = kDefaultViolationFactor) {
    CertReport report;
    report.mode = Mode::theorem1;
    report.tolerances = {tol, violation_factor * tol};
    const auto points = sample_points(domain, grid);
    report.grid = {grid.points_per_axis, grid.random_points, grid.rng_seed, points.size()};
    const std::size_t n = domain.dim();

    std::size_t vanishing = 0;
    std::optional<Witness> first_violation;
    std::optional<Witness> first_vanishing;
    bool all_pass = true;
    for (const auto& x : points) {
        const Vector g = pair.g(x);
        if (g.size() != n) throw Error(ErrorKind::DimensionMismatch, "g(x) and x differ in size");
        const double gn = norm(g);
        const Matrix sym = symmetric_part(detail::checked_jacobian(pair, x, n));
        if (!(gn > tol)) {
            ++vanishing;
            const auto probe = detail::probe_restricted(sym, detail::standard_basis(n));
            report.margins.push_back({x, probe.max_eig, gn});
            if (!first_vanishing) first_vanishing = Witness{"vanishing_gradient", x, {}, 0.0, gn, tol, tol - gn, {}, {}};
            continue;
        }
        const auto probe = detail::probe_restricted(sym, kernel_basis(g, tol));
        report.margins.push_back({x, probe.max_eig, gn});
        if (!(probe.max_eig <= tol)) all_pass = false;
        if (probe.max_eig > report.tolerances.violation_threshold && !first_violation)
            first_violation = Witness{"positive_kernel_form", x, {}, 0.0, probe.max_eig, 0.0, probe.max_eig, probe.direction, {}};
    }

    if (vanishing > 0) {
        report.verdict = Verdict::precondition_failed;
        report.witnesses.push_back(*first_vanishing);
    } else if (first_violation) {
        report.verdict = Verdict::refuted;
        report.witnesses.push_back(*first_violation);
    } else {
        report.verdict = all_pass ? Verdict::certified : Verdict::undetermined;
    }
    report.metadata["grid_relative"] = true;
    report.metadata["vanishing_points"] = vanishing;
    report.metadata["max_margin"] = report.max_margin();
    report.metadata["fd_used"] = !pair.has_dg();
    return report;
}

/// Sufficient test for strict quasi-concavity: certified iff every margin is
/// <= -tol, undetermined otherwise. Where g(x) vanishes the kernel is the
/// whole space and the test becomes negative definiteness of sym(Dg(x)).
inline CertReport certify_theorem2(const C1StarPair& pair, const BoxDomain& domain, const GridSpec& grid,
                                   double tol = kDefaultTol) {
    CertReport report;
    report.mode = Mode::theorem2;
    report.tolerances = {tol, -tol};
    const auto points = sample_points(domain, grid);
    report.grid = {grid.points_per_axis, grid.random_points, grid.rng_seed, points.size()};
    const std::size_t n = domain.dim();

    bool all_strict = true;
    std::size_t full_space_points = 0;
    std::optional<std::size_t> first_weak;
    for (const auto& x : points) {
        const Vector g = pair.g(x);
        if (g.size() != n) throw Error(ErrorKind::DimensionMismatch, "g(x) and x differ in size");
        const double gn = norm(g);
        const Matrix sym = symmetric_part(detail::checked_jacobian(pair, x, n));
        detail::KernelProbe probe;
        if (gn > tol) {
            probe = detail::probe_restricted(sym, kernel_basis(g, tol));
        } else {
            ++full_space_points;
            probe = detail::probe_restricted(sym, detail::standard_basis(n));
        }
        report.margins.push_back({x, probe.max_eig, gn});
        if (!(probe.max_eig <= -tol)) {
            all_strict = false;
            if (!first_weak) first_weak = report.margins.size() - 1;
        }
    }
    report.verdict = all_strict ? Verdict::certified : Verdict::undetermined;
    report.metadata["grid_relative"] = true;
    report.metadata["full_space_points"] = full_space_points;
    report.metadata["max_margin"] = report.max_margin();
    if (first_weak) report.metadata["first_weak_point"] = report.margins[*first_weak].x;
    report.metadata["fd_used"] = !pair.has_dg();
    return report;
}

/// Samples the slice {x in box : <x - x*, Df(x*)> = 0} and checks that f
/// peaks at x* on it. For a quasi-concave f a refutation flags either a
/// bug or a non-quasi-concave input.
inline CertReport lemma1_check(const ScalarField& f, const Vector& x_star, const BoxDomain& domain,
                               const GridSpec& grid, double tol = kDefaultTol) {
    const std::size_t n = domain.dim();
    if (x_star.size() != n) throw Error(ErrorKind::DimensionMismatch, "x* dimension differs from the box");
    if (!domain.contains_closed(x_star)) throw Error(ErrorKind::DomainViolation, "x* lies outside the box");
    const Vector normal = gradient(f, x_star);
    if (!(norm(normal) > tol)) throw Error(ErrorKind::VanishingGradient, "|Df(x*)| <= tol");

    CertReport report;
    report.mode = Mode::lemma1;
    report.tolerances = {tol, tol};
    const auto basis = kernel_basis(normal, tol);
    const std::size_t k = basis.size();
    const double radius = domain.diagonal();
    const double f_star = f(x_star);

    std::vector<Vector> coeffs;
    if (k > 0) {
        // Lattice on [-radius, radius]^k, thinned so it stays below 1e5 points.
        std::size_t per_axis = std::max<std::size_t>(grid.points_per_axis, 2);
        while (per_axis > 2 && std::pow(static_cast<double>(per_axis), static_cast<double>(k)) > 1e5) --per_axis;
        std::vector<std::size_t> idx(k, 0);
        for (;;) {
            Vector s(k);
            for (std::size_t i = 0; i < k; ++i)
                s[i] = radius * (2.0 * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1) - 1.0);
            coeffs.push_back(std::move(s));
            bool wrapped = true;
            for (std::size_t axis = k; axis-- > 0;) {
                if (++idx[axis] < per_axis) {
                    wrapped = false;
                    break;
                }
                idx[axis] = 0;
            }
            if (wrapped) break;
        }
        const CounterRng rng = CounterRng(grid.rng_seed).split(0x6c656d6d61ULL);
        for (std::size_t r = 0; r < grid.random_points; ++r) {
            Vector s(k);
            for (std::size_t i = 0; i < k; ++i) s[i] = radius * (2.0 * rng.uniform(r * k + i) - 1.0);
            coeffs.push_back(std::move(s));
        }
    }

    std::size_t used = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : coeffs) {
        Vector x = x_star;
        for (std::size_t b = 0; b < k; ++b)
            for (std::size_t i = 0; i < n; ++i) x[i] += s[b] * basis[b][i];
        if (!domain.contains_sampled(x)) continue;
        ++used;
        const double fx = f(x);
        worst = std::max(worst, fx - f_star);
        if (fx > f_star + tol && report.witnesses.empty())
            report.witnesses.push_back({"slice_exceeds_peak", x_star, x, 0.0, fx, f_star, fx - f_star, {}, {}});
    }

    report.grid = {grid.points_per_axis, grid.random_points, grid.rng_seed, used};
    report.verdict = report.witnesses.empty() ? Verdict::certified : Verdict::refuted;
    report.metadata["grid_relative"] = true;
    report.metadata["slice_samples"] = used;
    report.metadata["max_excess"] = used > 0 ? worst : 0.0;
    report.metadata["normal"] = normal;
    report.metadata["fd_used"] = !f.has_grad();
    return report;
}

} // namespace qcert
