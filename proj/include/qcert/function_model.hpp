#pragma once

// Functions under test, their C1* decomposition Df = lambda * g, box
// domains with sampling grids, and finite-difference derivatives.

#include <qcert/error.hpp>
#include <qcert/linalg.hpp>
#include <qcert/random.hpp>
#include <qcert/report.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qcert {

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;
using MatrixFn = std::function<Matrix(const Vector&)>;

inline constexpr double kDefaultStep = 1e-5;
inline constexpr double kDefaultHessianStep = 1e-4;

/// f : R^n -> R with an optional analytic gradient.
struct ScalarField {
    std::size_t dim = 0;
    ScalarFn eval;
    VectorFn grad;  // empty when no analytic gradient exists

    double operator()(const Vector& x) const { return eval(x); }
    bool has_grad() const { return static_cast<bool>(grad); }
};

/// Df(x) = lambda(x) g(x) with lambda > 0 and g of class C1.
struct C1StarPair {
    VectorFn g;
    ScalarFn lambda;
    MatrixFn dg;  // analytic Jacobian of g, rows = components of g; may be empty

    bool has_dg() const { return static_cast<bool>(dg); }
};

/// Open axis-aligned box. Samples stay `margin` away from every face.
class BoxDomain {
public:
    BoxDomain() = default;

    BoxDomain(Vector lower, Vector upper, std::optional<double> margin = std::nullopt)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.size() != upper_.size() || lower_.empty())
            throw Error(ErrorKind::DimensionMismatch, "box bounds must have equal, positive dimension");
        for (std::size_t i = 0; i < lower_.size(); ++i)
            if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
                throw Error(ErrorKind::ConfigError, "box needs finite lower < upper on every axis");
        margin_ = margin.value_or(1e-6 * diagonal());
        if (!(margin_ > 0.0)) throw Error(ErrorKind::ConfigError, "box margin must be positive");
        for (std::size_t i = 0; i < lower_.size(); ++i)
            if (2.0 * margin_ >= upper_[i] - lower_[i])
                throw Error(ErrorKind::ConfigError, "box margin swallows an axis");
    }

    static BoxDomain cube(std::size_t n, double lo, double hi) {
        return BoxDomain(Vector(n, lo), Vector(n, hi));
    }

    std::size_t dim() const noexcept { return lower_.size(); }
    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }
    double margin() const noexcept { return margin_; }

    double diagonal() const {
        double s = 0.0;
        for (std::size_t i = 0; i < lower_.size(); ++i) s += (upper_[i] - lower_[i]) * (upper_[i] - lower_[i]);
        return std::sqrt(s);
    }

    bool contains_closed(std::span<const double> x) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
        return true;
    }

    /// Inside the box by at least the sampling margin.
    bool contains_sampled(std::span<const double> x) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (!(x[i] >= lower_[i] + margin_ && x[i] <= upper_[i] - margin_)) return false;
        return true;
    }

    /// Maps u in [0,1]^n onto the margin-shrunk box. u = 1/2 lands exactly
    /// on the centre.
    Vector map_unit(std::span<const double> u) const {
        Vector x(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            const double mid = 0.5 * (lower_[i] + upper_[i]);
            const double width = (upper_[i] - lower_[i]) - 2.0 * margin_;
            // clamp so rounding never pushes a face point past the margin
            x[i] = std::clamp(mid + (u[i] - 0.5) * width, lower_[i] + margin_, upper_[i] - margin_);
        }
        return x;
    }

private:
    Vector lower_;
    Vector upper_;
    double margin_ = 0.0;
};

/// Tensor lattice plus optional seeded uniform points.
struct GridSpec {
    std::size_t points_per_axis = 21;
    std::uint64_t rng_seed = 0;
    std::size_t random_points = 0;
};

inline constexpr std::size_t kMaxGridPoints = 5'000'000;

/// Lattice points in row-major order (last axis fastest), then the random
/// points. Deterministic for a given spec.
inline std::vector<Vector> sample_points(const BoxDomain& domain, const GridSpec& grid) {
    if (grid.points_per_axis < 2) throw Error(ErrorKind::ConfigError, "grid needs at least 2 points per axis");
    const std::size_t n = domain.dim();
    double total = 1.0;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(grid.points_per_axis);
    if (total + static_cast<double>(grid.random_points) > static_cast<double>(kMaxGridPoints))
        throw Error(ErrorKind::TooLarge, "grid exceeds " + std::to_string(kMaxGridPoints) + " points");

    std::vector<Vector> points;
    points.reserve(static_cast<std::size_t>(total) + grid.random_points);
    std::vector<std::size_t> idx(n, 0);
    Vector u(n);
    const double denom = static_cast<double>(grid.points_per_axis - 1);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<double>(idx[i]) / denom;
        points.push_back(domain.map_unit(u));
        bool wrapped = true;
        for (std::size_t axis = n; axis-- > 0;) {
            if (++idx[axis] < grid.points_per_axis) {
                wrapped = false;
                break;
            }
            idx[axis] = 0;
        }
        if (wrapped) break;
    }

    const CounterRng rng = CounterRng(grid.rng_seed).split(0x6772696475ULL);
    for (std::size_t k = 0; k < grid.random_points; ++k) {
        for (std::size_t i = 0; i < n; ++i) u[i] = rng.uniform(k * n + i);
        points.push_back(domain.map_unit(u));
    }
    return points;
}

namespace detail {

inline void check_stencil(const BoxDomain* domain, const Vector& x) {
    if (domain != nullptr && !domain->contains_closed(x))
        throw Error(ErrorKind::DomainViolation, "finite-difference stencil leaves the box");
}

} // namespace detail

/// Central-difference gradient. When a domain is supplied every stencil
/// point must lie in its closure.
inline Vector fd_gradient(const ScalarField& f, const Vector& x, double step = kDefaultStep,
                          const BoxDomain* domain = nullptr) {
    if (!(step > 0.0)) throw Error(ErrorKind::ConfigError, "finite-difference step must be positive");
    Vector grad(x.size());
    Vector probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        detail::check_stencil(domain, probe);
        const double up = f(probe);
        probe[i] = x[i] - step;
        detail::check_stencil(domain, probe);
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

/// Central-difference Jacobian; row i holds the derivatives of g_i.
inline Matrix fd_jacobian(const VectorFn& g, const Vector& x, double step = kDefaultStep,
                          const BoxDomain* domain = nullptr) {
    if (!(step > 0.0)) throw Error(ErrorKind::ConfigError, "finite-difference step must be positive");
    const Vector g0 = g(x);
    Matrix jac(g0.size(), x.size());
    Vector probe = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + step;
        detail::check_stencil(domain, probe);
        const Vector up = g(probe);
        probe[j] = x[j] - step;
        detail::check_stencil(domain, probe);
        const Vector down = g(probe);
        probe[j] = x[j];
        if (up.size() != g0.size() || down.size() != g0.size())
            throw Error(ErrorKind::DimensionMismatch, "vector field changed output size");
        for (std::size_t i = 0; i < g0.size(); ++i) jac(i, j) = (up[i] - down[i]) / (2.0 * step);
    }
    return jac;
}

/// Second-difference Hessian straight from f, symmetric by construction.
inline Matrix fd_hessian(const ScalarField& f, const Vector& x, double step = kDefaultHessianStep) {
    const std::size_t n = x.size();
    Matrix h(n, n);
    Vector p = x;
    const double f0 = f(x);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = x[i] + step;
        const double up = f(p);
        p[i] = x[i] - step;
        const double down = f(p);
        p[i] = x[i];
        h(i, i) = (up - 2.0 * f0 + down) / (step * step);
        for (std::size_t j = 0; j < i; ++j) {
            auto at = [&](double si, double sj) {
                p[i] = x[i] + si * step;
                p[j] = x[j] + sj * step;
                const double v = f(p);
                p[i] = x[i];
                p[j] = x[j];
                return v;
            };
            const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * step * step);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

/// Analytic gradient when available, central differences otherwise.
inline Vector gradient(const ScalarField& f, const Vector& x) {
    return f.has_grad() ? f.grad(x) : fd_gradient(f, x);
}

/// Dg(x), falling back to a finite-difference Jacobian of g.
inline Matrix jacobian(const C1StarPair& pair, const Vector& x) {
    return pair.has_dg() ? pair.dg(x) : fd_jacobian(pair.g, x);
}

/// The C2 choice g = Df, lambda = 1. Without an analytic Hessian the
/// Jacobian comes from second differences of f (or of the analytic
/// gradient when there is one).
inline C1StarPair gradient_pair(const ScalarField& f, MatrixFn hessian = {}) {
    C1StarPair pair;
    pair.g = [f](const Vector& x) { return gradient(f, x); };
    pair.lambda = [](const Vector&) { return 1.0; };
    if (hessian) {
        pair.dg = std::move(hessian);
    } else if (f.has_grad()) {
        pair.dg = [f](const Vector& x) { return fd_jacobian(f.grad, x); };
    } else {
        pair.dg = [f](const Vector& x) { return fd_hessian(f, x); };
    }
    return pair;
}

/// Unit vector along Df(x).
inline Vector normalize_gradient(const ScalarField& f, const Vector& x, double tol = 1e-12) {
    const Vector df = gradient(f, x);
    const double n = norm(df);
    if (!(n > tol)) throw Error(ErrorKind::VanishingGradient, "|Df(x)| <= tol");
    return scaled(df, 1.0 / n);
}

enum class Side { plus, minus };

/// One-sided directional difference quotient with one Richardson step:
/// 2 D(step/2) - D(step), where D is the forward (plus) or backward
/// (minus) quotient. Never samples the opposite side of x.
inline double one_sided_derivative(const ScalarFn& phi, const Vector& x, const Vector& direction, Side side,
                                   double step = 1e-4, const BoxDomain* domain = nullptr) {
    if (!(step > 0.0)) throw Error(ErrorKind::ConfigError, "one-sided step must be positive");
    if (direction.size() != x.size()) throw Error(ErrorKind::DimensionMismatch, "direction size mismatch");
    const double sgn = side == Side::plus ? 1.0 : -1.0;
    const double f0 = phi(x);
    auto quotient = [&](double h) {
        Vector p = x;
        for (std::size_t i = 0; i < x.size(); ++i) p[i] += sgn * h * direction[i];
        detail::check_stencil(domain, p);
        return sgn * (phi(p) - f0) / h;
    };
    const double coarse = quotient(step);
    const double fine = quotient(0.5 * step);
    return 2.0 * fine - coarse;
}

/// Checks Df(x) = lambda(x) g(x) and lambda(x) > 0 at every grid point.
/// Failures are reported in the verdict; nothing is thrown for them.
inline CertReport validate_pair(const ScalarField& f, const C1StarPair& pair, const BoxDomain& domain,
                                const GridSpec& grid, double tol = 1e-6) {
    CertReport report;
    report.mode = Mode::validate_pair;
    report.tolerances = {tol, tol};
    const auto points = sample_points(domain, grid);
    report.grid = {grid.points_per_axis, grid.random_points, grid.rng_seed, points.size()};

    double max_residual = 0.0;
    double min_lambda = std::numeric_limits<double>::infinity();
    std::size_t nonpositive = 0;
    for (const auto& x : points) {
        const Vector df = gradient(f, x);
        const Vector g = pair.g(x);
        const double lam = pair.lambda(x);
        if (df.size() != g.size()) throw Error(ErrorKind::DimensionMismatch, "Df and g differ in size");
        min_lambda = std::min(min_lambda, lam);
        if (!(lam > 0.0)) {
            ++nonpositive;
            if (report.witnesses.empty())
                report.witnesses.push_back({"nonpositive_lambda", x, {}, 0.0, lam, 0.0, -lam, {}, {}});
        }
        double residual = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = std::abs(df[i] - lam * g[i]);
            if (!(r <= residual)) {
                residual = r;
                worst = i;
            }
        }
        max_residual = std::max(max_residual, residual);
        if (!(residual <= tol) && report.witnesses.empty())
            report.witnesses.push_back(
                {"decomposition_residual", x, {}, 0.0, df[worst], lam * g[worst], residual, {}, {worst}});
    }

    report.verdict = report.witnesses.empty() ? Verdict::certified : Verdict::refuted;
    report.metadata["max_residual"] = max_residual;
    report.metadata["min_lambda"] = min_lambda;
    report.metadata["nonpositive_lambda_points"] = nonpositive;
    report.metadata["fd_used"] = !f.has_grad();
    return report;
}

} // namespace qcert
