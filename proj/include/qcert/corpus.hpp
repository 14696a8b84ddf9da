#pragma once

// Built-in test fields with hand-derived derivatives and known labels.

#include <qcert/expression.hpp>
#include <qcert/function_model.hpp>
#include <qcert/linalg.hpp>
#include <qcert/random.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace qcert {

/// Sum of monomials coef * prod x_i^p_i with exact derivatives.
class Polynomial {
public:
    struct Term {
        double coef = 0.0;
        std::vector<int> powers;
    };

    explicit Polynomial(std::size_t dim) : dim_(dim) {}

    Polynomial& add(double coef, std::vector<int> powers) {
        if (powers.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "monomial arity differs from dimension");
        terms_.push_back({coef, std::move(powers)});
        return *this;
    }

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }

    double operator()(const Vector& x) const {
        double s = 0.0;
        for (const auto& t : terms_) s += t.coef * product(x, t.powers, dim_, dim_);
        return s;
    }

    Vector gradient(const Vector& x) const {
        Vector g(dim_, 0.0);
        for (const auto& t : terms_)
            for (std::size_t j = 0; j < dim_; ++j)
                if (t.powers[j] > 0) g[j] += t.coef * t.powers[j] * product(x, t.powers, j, dim_);
        return g;
    }

    Matrix hessian(const Vector& x) const {
        Matrix h(dim_, dim_);
        for (const auto& t : terms_) {
            for (std::size_t i = 0; i < dim_; ++i) {
                if (t.powers[i] == 0) continue;
                for (std::size_t j = 0; j < dim_; ++j) {
                    if (t.powers[j] == 0) continue;
                    auto p = t.powers;
                    double c = t.coef * p[i];
                    --p[i];
                    if (p[j] == 0) continue;
                    c *= p[j];
                    --p[j];
                    h(i, j) += c * product(x, p, dim_, dim_);
                }
            }
        }
        return h;
    }

    /// Expression text in the field language.
    std::string to_string() const {
        std::string s;
        char buf[40];
        for (const auto& t : terms_) {
            std::snprintf(buf, sizeof buf, "%.17g", std::abs(t.coef));
            s += s.empty() ? (t.coef < 0 ? "-" : "") : (t.coef < 0 ? " - " : " + ");
            s += buf;
            for (std::size_t i = 0; i < dim_; ++i) {
                if (t.powers[i] == 0) continue;
                s += "*x" + std::to_string(i + 1);
                if (t.powers[i] > 1) s += "^" + std::to_string(t.powers[i]);
            }
        }
        return s.empty() ? "0" : s;
    }

    ScalarField field() const {
        Polynomial p = *this;
        return ScalarField{dim_, [p](const Vector& x) { return p(x); }, [p](const Vector& x) { return p.gradient(x); }};
    }

private:
    // prod_i x_i^p_i with the exponent of `skip` lowered by one (skip = n
    // means no lowering).
    static double product(const Vector& x, const std::vector<int>& powers, std::size_t skip, std::size_t n) {
        double v = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int p = powers[i] - (i == skip ? 1 : 0);
            for (int k = 0; k < p; ++k) v *= x[i];
        }
        return v;
    }

    std::size_t dim_;
    std::vector<Term> terms_;
};

/// f(x) = x^T Q x + a^T x as a polynomial.
inline Polynomial quadratic_polynomial(const Matrix& q, const Vector& a) {
    const std::size_t n = a.size();
    Polynomial p(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> pw(n, 0);
        pw[i] = 2;
        p.add(q(i, i), pw);
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<int> cross(n, 0);
            cross[i] = 1;
            cross[j] = 1;
            p.add(q(i, j) + q(j, i), cross);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> pw(n, 0);
        pw[i] = 1;
        p.add(a[i], pw);
    }
    return p;
}

/// Seeded definite quadratic sign * (R^T R + I/2) whose stationary point
/// sits at `stationary`, so the gradient is nonzero away from it.
inline Polynomial seeded_definite_quadratic(std::uint64_t seed, std::size_t n, double sign, const Vector& stationary) {
    const CounterRng rng(seed);
    Matrix r(n, n);
    for (std::size_t i = 0; i < n * n; ++i) r.entries()[i] = 2.0 * rng.uniform(i) - 1.0;
    Matrix q = r.transpose() * r;
    for (std::size_t i = 0; i < n; ++i) q(i, i) += 0.5;
    for (double& v : q.entries()) v *= sign;
    // grad = 2 Q x + a vanishes at the stationary point.
    Vector a = q * stationary;
    for (double& v : a) v *= -2.0;
    return quadratic_polynomial(q, a);
}

struct CorpusLabels {
    bool quasiconcave = false;
    bool strictly_quasiconcave = false;
    bool concave = false;
    bool df_nonvanishing = false;
    std::string provenance;
};

struct CorpusEntry {
    std::string name;
    std::size_t dim = 2;
    ScalarField f;
    MatrixFn hessian;                  // analytic D^2 f when f is C^2
    C1StarPair pair;                   // builtin decomposition (g = Df, lambda = 1 unless stated)
    bool pair_is_gradient = true;      // false when g, lambda are an independent decomposition
    std::optional<std::string> f_text; // same f in the expression language, when expressible
    BoxDomain domain;
    CorpusLabels labels;
};

namespace corpus {

inline CorpusEntry from_polynomial(std::string name, const Polynomial& p, BoxDomain domain, CorpusLabels labels) {
    CorpusEntry e;
    e.name = std::move(name);
    e.dim = p.dim();
    e.f = p.field();
    e.hessian = [p](const Vector& x) { return p.hessian(x); };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = p.to_string();
    e.domain = std::move(domain);
    e.labels = std::move(labels);
    return e;
}

// Piecewise field with the seam at x2 = 0; evaluated by exact branch.
inline double debreu_f(const Vector& x) { return x[1] <= 0.0 ? x[1] : x[1] / (1.0 - x[0] * x[1]); }

inline Vector debreu_grad(const Vector& x) {
    if (x[1] <= 0.0) return {0.0, 1.0};
    const double d = 1.0 - x[0] * x[1];
    return {x[1] * x[1] / (d * d), 1.0 / (d * d)};
}

inline Vector debreu_g(const Vector& x) {
    if (x[1] <= 0.0) return {0.0, 1.0};
    const double s = std::sqrt(1.0 + std::pow(x[1], 4));
    return {x[1] * x[1] / s, 1.0 / s};
}

inline double debreu_lambda(const Vector& x) {
    if (x[1] <= 0.0) return 1.0;
    const double d = 1.0 - x[0] * x[1];
    return std::sqrt(1.0 + std::pow(x[1], 4)) / (d * d);
}

inline Matrix debreu_dg(const Vector& x) {
    if (x[1] <= 0.0) return Matrix(2, 2, 0.0);
    const double q = std::pow(1.0 + std::pow(x[1], 4), 1.5);
    return Matrix{{0.0, 2.0 * x[1] / q}, {0.0, -2.0 * std::pow(x[1], 3) / q}};
}

inline CorpusEntry debreu() {
    CorpusEntry e;
    e.name = "debreu_f";
    e.f = ScalarField{2, debreu_f, debreu_grad};
    e.pair = C1StarPair{debreu_g, debreu_lambda, debreu_dg};
    e.pair_is_gradient = false;
    e.domain = BoxDomain::cube(2, -0.5, 0.5);
    e.labels = {true, false, false, true,
                "quasi-concave near 0 (level sets x2 = c/(1+c x1) are convex); f = x2 is linear where x2 <= 0, "
                "so not strictly quasi-concave; convex in x1 where x2 > 0, so not concave"};
    return e;
}

inline CorpusEntry katzner() {
    CorpusEntry e;
    e.name = "katzner";
    e.f = ScalarField{2, [](const Vector& x) { return x[0] * x[0] * x[0] * x[1] + x[0] * x[1] * x[1] * x[1]; },
                      [](const Vector& x) {
                          return Vector{3.0 * x[0] * x[0] * x[1] + x[1] * x[1] * x[1],
                                        x[0] * x[0] * x[0] + 3.0 * x[0] * x[1] * x[1]};
                      }};
    e.hessian = [](const Vector& x) {
        const double off = 3.0 * x[0] * x[0] + 3.0 * x[1] * x[1];
        return Matrix{{6.0 * x[0] * x[1], off}, {off, 6.0 * x[0] * x[1]}};
    };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = "x1^3*x2 + x1*x2^3";
    e.domain = BoxDomain::cube(2, 0.5, 1.5);
    e.labels = {true, true, false, true,
                "strictly quasi-concave on the positive orthant (strictly convex level curves), yet the kernel "
                "form vanishes at (1,1); convex along the diagonal"};
    return e;
}

inline CorpusEntry quartic_x1() {
    CorpusEntry e;
    e.name = "quartic_x1";
    e.f = ScalarField{2, [](const Vector& x) { return std::pow(x[0], 4); },
                      [](const Vector& x) { return Vector{4.0 * std::pow(x[0], 3), 0.0}; }};
    e.hessian = [](const Vector& x) { return Matrix{{12.0 * x[0] * x[0], 0.0}, {0.0, 0.0}}; };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = "x1^4";
    e.domain = BoxDomain::cube(2, -1.0, 1.0);
    e.labels = {false, false, false, false, "Df vanishes on x1 = 0; f(0,0) = 0 < min(f(-1,0), f(1,0)) = 1"};
    return e;
}

inline CorpusEntry linear_x2() {
    CorpusEntry e;
    e.name = "linear";
    e.f = ScalarField{2, [](const Vector& x) { return x[1]; }, [](const Vector&) { return Vector{0.0, 1.0}; }};
    e.hessian = [](const Vector&) { return Matrix(2, 2, 0.0); };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = "x2";
    e.domain = BoxDomain::cube(2, -1.0, 1.0);
    e.labels = {true, false, true, true, "linear: concave and quasi-concave, constant along x1 so not strict"};
    return e;
}

inline CorpusEntry neg_sq() {
    CorpusEntry e;
    e.name = "neg_sq";
    e.f = ScalarField{2, [](const Vector& x) { return -(x[0] * x[0] + x[1] * x[1]); },
                      [](const Vector& x) { return Vector{-2.0 * x[0], -2.0 * x[1]}; }};
    e.hessian = [](const Vector&) { return Matrix{{-2.0, 0.0}, {0.0, -2.0}}; };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = "-(x1^2 + x2^2)";
    e.domain = BoxDomain::cube(2, -1.0, 1.0);
    e.labels = {true, true, true, false, "strictly concave; Df vanishes at the origin"};
    return e;
}

inline CorpusEntry convex_sq() {
    CorpusEntry e;
    e.name = "convex_sq";
    e.f = ScalarField{2, [](const Vector& x) { return x[0] * x[0] + x[1] * x[1]; },
                      [](const Vector& x) { return Vector{2.0 * x[0], 2.0 * x[1]}; }};
    e.hessian = [](const Vector&) { return Matrix{{2.0, 0.0}, {0.0, 2.0}}; };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = "x1^2 + x2^2";
    e.domain = BoxDomain::cube(2, 1.0, 2.0);
    e.labels = {false, false, false, true, "strictly convex; midpoint of (1,2)-(2,1) dips below both ends"};
    return e;
}

inline CorpusEntry cobb_douglas() {
    constexpr double a = 0.3;
    constexpr double b = 0.7;
    CorpusEntry e;
    e.name = "cobb_douglas";
    auto f = [](const Vector& x) { return std::pow(x[0], a) * std::pow(x[1], b); };
    e.f = ScalarField{2, f, [f](const Vector& x) {
                          const double v = f(x);
                          return Vector{a * v / x[0], b * v / x[1]};
                      }};
    e.hessian = [f](const Vector& x) {
        const double v = f(x);
        const double off = a * b * v / (x[0] * x[1]);
        return Matrix{{a * (a - 1.0) * v / (x[0] * x[0]), off}, {off, b * (b - 1.0) * v / (x[1] * x[1])}};
    };
    e.pair = gradient_pair(e.f, e.hessian);
    e.f_text = "x1^0.3*x2^0.7";
    e.domain = BoxDomain::cube(2, 0.5, 2.0);
    e.labels = {true, true, true, true,
                "degree-one homogeneous Cobb-Douglas: concave, strictly convex level curves, increasing"};
    return e;
}

inline constexpr std::uint64_t kPolynomialSeedA = 20240601;
inline constexpr std::uint64_t kPolynomialSeedB = 20240602;

inline CorpusEntry poly_concave() {
    return from_polynomial("poly_concave", seeded_definite_quadratic(kPolynomialSeedA, 2, -1.0, {2.5, -3.0}),
                           BoxDomain::cube(2, -1.0, 1.0),
                           {true, true, true, true,
                            "seeded negative definite quadratic; maximizer (2.5,-3) outside the box"});
}

inline CorpusEntry poly_convex() {
    return from_polynomial("poly_convex", seeded_definite_quadratic(kPolynomialSeedB, 2, 1.0, {-2.0, 3.5}),
                           BoxDomain::cube(2, -1.0, 1.0),
                           {false, false, false, true,
                            "seeded positive definite quadratic; minimizer (-2,3.5) outside the box, so level-set "
                            "tangents carry positive curvature"});
}

} // namespace corpus

/// The built-in corpus: the worked examples plus two seeded quadratics.
inline std::vector<CorpusEntry> builtin_corpus() {
    return {corpus::debreu(),       corpus::katzner(),   corpus::quartic_x1(),
            corpus::linear_x2(),    corpus::neg_sq(),    corpus::convex_sq(),
            corpus::cobb_douglas(), corpus::poly_concave(), corpus::poly_convex()};
}

inline std::optional<CorpusEntry> find_corpus_entry(std::string_view name) {
    for (auto& e : builtin_corpus())
        if (e.name == name) return e;
    return std::nullopt;
}

} // namespace qcert
