#include <qcert/corpus.hpp>
#include <qcert/function_model.hpp>

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qcert;

namespace {

ScalarField wave() {
    return ScalarField{2, [](const Vector& x) { return std::exp(0.5 * x[0]) * std::sin(x[1]) + x[0] * x[1]; }, {}};
}

Vector wave_grad(const Vector& x) {
    return {0.5 * std::exp(0.5 * x[0]) * std::sin(x[1]) + x[1], std::exp(0.5 * x[0]) * std::cos(x[1]) + x[0]};
}

} // namespace

TEST(FiniteDifference, KatznerGradientAndHessianAtOne) {
    const auto k = corpus::katzner();
    const Vector x{1.0, 1.0};
    EXPECT_EQ(k.f.grad(x), (Vector{4.0, 4.0}));
    const Vector fd = fd_gradient(k.f, x);
    EXPECT_NEAR(fd[0], 4.0, 1e-6);
    EXPECT_NEAR(fd[1], 4.0, 1e-6);

    const Matrix h = k.hessian(x);
    EXPECT_EQ(h, (Matrix{{6, 6}, {6, 6}}));
    const ScalarField no_grad{2, k.f.eval, {}};
    const Matrix fdh = fd_hessian(no_grad, x);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(fdh(i, j), 6.0, 1e-6);
}

TEST(FiniteDifference, DebreuJacobianAboveAndBelowSeam) {
    const auto d = corpus::debreu();
    // g2 = (1 + x2^4)^(-1/2), g1 = x2^2 g2. At x2 = 1: d g1/d x2 = 2/2^(3/2).
    const Matrix above = d.pair.dg(Vector{0.0, 1.0});
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(above(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(above(0, 1), r, 1e-15);
    EXPECT_NEAR(above(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(above(1, 1), -r, 1e-15);
    const Matrix fd = fd_jacobian(d.pair.g, Vector{0.0, 1.0});
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(fd.entries()[i], above.entries()[i], 1e-6);

    EXPECT_EQ(d.pair.dg(Vector{0.3, -0.5}), Matrix(2, 2, 0.0));
    EXPECT_EQ(fd_jacobian(d.pair.g, Vector{0.3, -0.5}), Matrix(2, 2, 0.0));
}

TEST(FiniteDifference, AnalyticDebreuJacobianMatchesDifferences) {
    const auto d = corpus::debreu();
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u1(-0.5, 0.5), u2(0.01, 0.5);
    for (int i = 0; i < 200; ++i) {
        const Vector x{u1(rng), u2(rng)};
        const Matrix a = d.pair.dg(x);
        const Matrix fd = fd_jacobian(d.pair.g, x);
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(fd.entries()[k], a.entries()[k], 1e-6);
    }
}

TEST(FiniteDifference, PolynomialGradients) {
    // Random cubic polynomials in up to four variables against the exact
    // monomial derivatives.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> power(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 4;
        Polynomial p(n);
        for (int t = 0; t < 4; ++t) {
            std::vector<int> pw(n);
            for (int& v : pw) v = power(rng);
            p.add(coef(rng), pw);
        }
        const Vector x = qcert::testing::random_vector(rng, n);
        const ScalarField f{n, [p](const Vector& v) { return p(v); }, {}};
        const Vector fd = fd_gradient(f, x);
        const Vector exact = p.gradient(x);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fd[i], exact[i], 1e-6 * (1.0 + std::abs(exact[i])));
    }
}

TEST(FiniteDifference, CentralDifferenceIsSecondOrder) {
    const ScalarField f = wave();
    const Vector x{0.3, 0.7};
    const Vector exact = wave_grad(x);
    for (std::size_t i = 0; i < 2; ++i) {
        const double e1 = std::abs(fd_gradient(f, x, 1e-2)[i] - exact[i]);
        const double e2 = std::abs(fd_gradient(f, x, 5e-3)[i] - exact[i]);
        EXPECT_GE(e1 / e2, 3.5) << "component " << i;
    }
}

TEST(FiniteDifference, StencilMustStayInBox) {
    const BoxDomain box = BoxDomain::cube(2, 0.0, 1.0);
    EXPECT_NO_THROW(fd_gradient(wave(), Vector{0.5, 0.5}, 1e-5, &box));
    try {
        fd_gradient(wave(), Vector{1e-6, 0.5}, 1e-5, &box);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DomainViolation);
    }
}

TEST(NormalizeGradient, KatznerAndVanishing) {
    const auto k = corpus::katzner();
    const Vector u = normalize_gradient(k.f, Vector{1.0, 1.0});
    EXPECT_NEAR(u[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(u[1], 1.0 / std::sqrt(2.0), 1e-15);
    try {
        normalize_gradient(corpus::quartic_x1().f, Vector{0.0, 0.3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::VanishingGradient);
    }
}

TEST(OneSidedDerivative, LambdaKinkAcrossSeam) {
    // lambda = sqrt(1 + x2^4) / (1 - x1 x2)^2 above the seam, 1 below:
    // d/dx2 at x2 = 0+ is 2 x1, at 0- it is 0.
    const auto d = corpus::debreu();
    for (double x1 : {0.25, 0.5, 0.75}) {
        const Vector x{x1, 0.0};
        EXPECT_NEAR(one_sided_derivative(d.pair.lambda, x, {0.0, 1.0}, Side::plus), 2.0 * x1, 1e-4);
        EXPECT_NEAR(one_sided_derivative(d.pair.lambda, x, {0.0, 1.0}, Side::minus), 0.0, 1e-4);
    }
}

TEST(OneSidedDerivative, SmoothFunctionBothSidesAgree) {
    const ScalarFn phi = [](const Vector& x) { return std::sin(x[0]) * x[1]; };
    const Vector x{0.4, 2.0};
    const double exact = std::cos(0.4) * 2.0;
    EXPECT_NEAR(one_sided_derivative(phi, x, {1.0, 0.0}, Side::plus), exact, 1e-7);
    EXPECT_NEAR(one_sided_derivative(phi, x, {1.0, 0.0}, Side::minus), exact, 1e-7);
}

TEST(ValidatePair, DebreuDecompositionHolds) {
    const auto d = corpus::debreu();
    const CertReport r = validate_pair(d.f, d.pair, d.domain, GridSpec{21, 0, 0}, 1e-6);
    EXPECT_EQ(r.verdict, Verdict::certified);
    EXPECT_LE(r.metadata["max_residual"].get<double>(), 1e-6);
    EXPECT_GT(r.metadata["min_lambda"].get<double>(), 0.0);
    EXPECT_EQ(r.grid.points_evaluated, 441u);
}

TEST(ValidatePair, NegativeLambdaRefuted) {
    const auto d = corpus::debreu();
    C1StarPair bad = d.pair;
    bad.lambda = [](const Vector&) { return -1.0; };
    bad.g = [](const Vector& x) { return scaled(corpus::debreu_grad(x), -1.0); };
    const CertReport r = validate_pair(d.f, bad, d.domain, GridSpec{5, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::refuted);
    ASSERT_FALSE(r.witnesses.empty());
    EXPECT_EQ(r.witnesses[0].kind, "nonpositive_lambda");
    EXPECT_EQ(r.metadata["nonpositive_lambda_points"].get<std::size_t>(), 25u);
}

TEST(ValidatePair, WrongDirectionRefuted) {
    const auto k = corpus::katzner();
    C1StarPair bad = k.pair;
    bad.g = [](const Vector& x) { return Vector{x[0], x[1]}; };
    const CertReport r = validate_pair(k.f, bad, k.domain, GridSpec{5, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::refuted);
    ASSERT_FALSE(r.witnesses.empty());
    EXPECT_EQ(r.witnesses[0].kind, "decomposition_residual");
    EXPECT_GT(r.witnesses[0].gap, 1e-6);
}

TEST(SamplePoints, LatticeCoversShrunkBoxAndCentre) {
    const BoxDomain box = BoxDomain::cube(2, 0.5, 1.5);
    const auto pts = sample_points(box, GridSpec{21, 0, 0});
    ASSERT_EQ(pts.size(), 441u);
    for (const auto& p : pts) EXPECT_TRUE(box.contains_sampled(p));
    EXPECT_EQ(pts[220], (Vector{1.0, 1.0}));
    // last axis fastest
    EXPECT_EQ(pts[0][0], pts[1][0]);
    EXPECT_LT(pts[0][1], pts[1][1]);
}

TEST(SamplePoints, RandomPointsSeeded) {
    const BoxDomain box = BoxDomain::cube(3, -1.0, 1.0);
    const auto a = sample_points(box, GridSpec{2, 5, 100});
    const auto b = sample_points(box, GridSpec{2, 5, 100});
    const auto c = sample_points(box, GridSpec{2, 6, 100});
    ASSERT_EQ(a.size(), 108u);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const auto& p : a) EXPECT_TRUE(box.contains_sampled(p));
}

TEST(SamplePoints, TooLargeRejected) {
    try {
        sample_points(BoxDomain::cube(8, 0.0, 1.0), GridSpec{21, 0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
    }
}

TEST(BoxDomainType, RejectsInvertedBounds) {
    EXPECT_THROW(BoxDomain(Vector{1.0}, Vector{0.0}), Error);
    EXPECT_THROW(BoxDomain(Vector{0.0, 0.0}, Vector{1.0}), Error);
}
