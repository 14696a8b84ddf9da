#include <qcert/certifier.hpp>
#include <qcert/corpus.hpp>
#include <qcert/oracle.hpp>

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qcert;

namespace {

C1StarPair rescaled(const C1StarPair& p, double c) {
    C1StarPair q;
    q.g = [g = p.g, c](const Vector& x) { return scaled(g(x), c); };
    q.lambda = [l = p.lambda, c](const Vector& x) { return l(x) / c; };
    q.dg = [dg = p.dg, c](const Vector& x) {
        Matrix m = dg(x);
        for (double& v : m.entries()) v *= c;
        return m;
    };
    return q;
}

enum class Decision { pass, fail, band };

Decision decide(double margin, double tol) {
    if (margin <= tol) return Decision::pass;
    if (margin > kDefaultViolationFactor * tol) return Decision::fail;
    return Decision::band;
}

} // namespace

TEST(Theorem1Point, DebreuAtZeroOne) {
    // g = (1,1)/sqrt2, Dg = [[0, a], [0, -a]] with a = 1/sqrt2; the kernel is
    // spanned by w = (1,-1)/sqrt2 and w^T Dg w = -a.
    const auto d = corpus::debreu();
    const PointMargin m = theorem1_point(d.pair, Vector{0.0, 1.0});
    EXPECT_NEAR(m.max_kernel_eig, -std::sqrt(2.0) / 2.0, 1e-6);
    EXPECT_NEAR(m.grad_norm, 1.0, 1e-15);
}

TEST(Theorem1Point, DebreuBelowSeamIsZero) {
    const auto d = corpus::debreu();
    EXPECT_EQ(theorem1_point(d.pair, Vector{0.3, -0.5}).max_kernel_eig, 0.0);
}

TEST(Theorem1Point, KatznerDegenerateAtOne) {
    const auto k = corpus::katzner();
    EXPECT_NEAR(theorem1_point(k.pair, Vector{1.0, 1.0}).max_kernel_eig, 0.0, 1e-9);
}

TEST(Theorem1Point, ConvexParaboloidPositive) {
    // For g = 2x the kernel form is 2|w|^2 = 2 on unit w.
    const auto c = corpus::convex_sq();
    EXPECT_NEAR(theorem1_point(c.pair, Vector{1.3, 1.7}).max_kernel_eig, 2.0, 1e-12);
}

TEST(Theorem1Point, VanishingGradientThrows) {
    try {
        theorem1_point(corpus::quartic_x1().pair, Vector{0.0, 0.5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::VanishingGradient);
    }
}

TEST(Theorem1Point, MatchesSampledKernelSupremum) {
    // The eigenvalue must dominate every sampled kernel direction and be
    // approached by the best of them.
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 4;
        const Matrix a = qcert::testing::random_matrix(rng, n, n, -2.0, 2.0);
        const Vector b = qcert::testing::random_vector(rng, n, -1.0, 1.0);
        C1StarPair p{[b](const Vector&) { return b; }, [](const Vector&) { return 1.0; },
                     [a](const Vector&) { return a; }};
        const double eig = theorem1_point(p, Vector(n, 0.0)).max_kernel_eig;
        const double sampled = qcert::testing::sampled_kernel_sup(a, b, rng, 20000);
        EXPECT_LE(sampled, eig + 1e-10);
        EXPECT_GE(sampled, eig - 0.05 * (1.0 + std::abs(eig)));
    }
}

TEST(CertifyTheorem1, DebreuCertified) {
    const auto d = corpus::debreu();
    const CertReport r = certify_theorem1(d.pair, d.domain, GridSpec{21, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::certified);
    EXPECT_LE(r.max_margin(), 0.0);
    EXPECT_EQ(r.margins.size(), 441u);
    EXPECT_TRUE(r.witnesses.empty());
}

TEST(CertifyTheorem1, ConvexSquareRefutedAlongTangent) {
    const auto c = corpus::convex_sq();
    const CertReport r = certify_theorem1(c.pair, c.domain, GridSpec{21, 0, 0});
    ASSERT_EQ(r.verdict, Verdict::refuted);
    ASSERT_EQ(r.witnesses.size(), 1u);
    const Witness& w = r.witnesses[0];
    EXPECT_EQ(w.kind, "positive_kernel_form");
    // first grid point wins
    EXPECT_EQ(w.x, r.margins[0].x);
    EXPECT_NEAR(w.lhs, 2.0, 1e-12);
    EXPECT_NEAR(std::abs(dot(w.direction, w.x)), 0.0, 1e-12);
    EXPECT_NEAR(norm(w.direction), 1.0, 1e-12);
}

TEST(CertifyTheorem1, QuarticPreconditionFails) {
    const auto q = corpus::quartic_x1();
    const CertReport r = certify_theorem1(q.pair, q.domain, GridSpec{21, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::precondition_failed);
    ASSERT_FALSE(r.witnesses.empty());
    EXPECT_EQ(r.witnesses[0].kind, "vanishing_gradient");
    EXPECT_EQ(r.metadata["vanishing_points"].get<std::size_t>(), 21u);
}

TEST(CertifyTheorem1, UndeterminedInsideBand) {
    // Dg = eps I with eps between tol and 10 tol.
    const double eps = 5e-8;
    C1StarPair p{[](const Vector&) { return Vector{0.0, 1.0}; }, [](const Vector&) { return 1.0; },
                 [eps](const Vector&) { return Matrix{{eps, 0.0}, {0.0, eps}}; }};
    const CertReport r = certify_theorem1(p, BoxDomain::cube(2, 0.0, 1.0), GridSpec{3, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::undetermined);
}

TEST(CertifyTheorem1, NonsymmetricJacobianUsesSymmetricPart) {
    // Dg = [[0, 5], [-5, 0]] is skew: the form vanishes identically.
    C1StarPair p{[](const Vector&) { return Vector{1.0, 1.0}; }, [](const Vector&) { return 1.0; },
                 [](const Vector&) { return Matrix{{0.0, 5.0}, {-5.0, 0.0}}; }};
    const CertReport r = certify_theorem1(p, BoxDomain::cube(2, 0.0, 1.0), GridSpec{3, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::certified);
    EXPECT_NEAR(r.max_margin(), 0.0, 1e-15);
}

TEST(CertifyTheorem2, KatznerUndeterminedWithZeroAtOne) {
    const auto k = corpus::katzner();
    const CertReport r = certify_theorem2(k.pair, k.domain, GridSpec{21, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::undetermined);
    bool seen = false;
    for (const auto& m : r.margins)
        if (m.x == Vector{1.0, 1.0}) {
            seen = true;
            EXPECT_NEAR(m.max_kernel_eig, 0.0, 1e-9);
        }
    EXPECT_TRUE(seen);
}

TEST(CertifyTheorem2, StrictlyConcaveCertified) {
    const auto s = corpus::neg_sq();
    const CertReport r = certify_theorem2(s.pair, s.domain, GridSpec{21, 0, 0});
    EXPECT_EQ(r.verdict, Verdict::certified);
    // the origin is on the grid; there the whole space is tested
    EXPECT_EQ(r.metadata["full_space_points"].get<std::size_t>(), 1u);
    EXPECT_NEAR(r.max_margin(), -2.0, 1e-12);
}

TEST(ScaleInvariance, DecisionsUnchangedUnderRescaling) {
    std::mt19937_64 rng(101);
    for (const auto& e : builtin_corpus()) {
        const auto pts = sample_points(e.domain, GridSpec{2, rng(), 100});
        for (double c : {0.5, 2.0, 10.0}) {
            const C1StarPair q = rescaled(e.pair, c);
            for (std::size_t i = 4; i < pts.size(); ++i) {
                const Vector& x = pts[i];
                if (norm(e.pair.g(x)) <= 1e-6) continue;
                const double m0 = theorem1_point(e.pair, x).max_kernel_eig;
                const double m1 = theorem1_point(q, x).max_kernel_eig;
                EXPECT_EQ(decide(m0, kDefaultTol), decide(m1, kDefaultTol)) << e.name << " c=" << c;
                EXPECT_NEAR(m1, c * m0, 1e-12 * c * (1.0 + std::abs(m0))) << e.name;
            }
        }
    }
}

TEST(GradientSpecialization, AnalyticAndDifferencedHessianAgree) {
    // g = Df, lambda = 1 with Dg from the analytic Hessian or from
    // differences of the gradient.
    for (const auto& e : builtin_corpus()) {
        if (!e.pair_is_gradient) continue;
        const C1StarPair fd = gradient_pair(e.f);
        for (const auto& x : sample_points(e.domain, GridSpec{7, 3, 20})) {
            if (norm(e.f.grad(x)) <= 1e-6) continue;
            const double a = theorem1_point(e.pair, x).max_kernel_eig;
            const double b = theorem1_point(fd, x).max_kernel_eig;
            EXPECT_NEAR(a, b, 1e-5 * (1.0 + std::abs(a))) << e.name;
        }
    }
}

TEST(OracleConcordance, RefutationsConfirmedCertificationsUncontested) {
    for (const auto& e : builtin_corpus()) {
        const CertReport cert = certify_theorem1(e.pair, e.domain, GridSpec{21, 0, 0});
        const CertReport oracle = quasiconcavity_oracle(e.f, e.domain, 20000, 7);
        if (cert.verdict == Verdict::certified) {
            EXPECT_EQ(oracle.verdict, Verdict::no_violation) << e.name;
        }
        if (cert.verdict == Verdict::refuted) {
            EXPECT_EQ(oracle.verdict, Verdict::refuted) << e.name;
        }
    }
}

TEST(Lemma1, ParaboloidSliceExceedsPeak) {
    // slice x1 = 1 through x* = (1,0): f(1, 0.4) = 1.16 > 1
    const auto c = corpus::convex_sq();
    const BoxDomain box(Vector{0.5, -0.5}, Vector{1.5, 0.5});
    const CertReport r = lemma1_check(c.f, Vector{1.0, 0.0}, box, GridSpec{21, 0, 0});
    ASSERT_EQ(r.verdict, Verdict::refuted);
    const Witness& w = r.witnesses[0];
    EXPECT_EQ(w.kind, "slice_exceeds_peak");
    EXPECT_NEAR(w.y[0], 1.0, 1e-12);
    EXPECT_NEAR(w.lhs, 1.0 + w.y[1] * w.y[1], 1e-12);
    EXPECT_GT(r.metadata["max_excess"].get<double>(), 0.16);
}

TEST(Lemma1, QuasiConcaveFieldsPeakOnTheirSlice) {
    const auto k = corpus::katzner();
    EXPECT_EQ(lemma1_check(k.f, Vector{1.0, 1.0}, k.domain, GridSpec{41, 0, 0}).verdict, Verdict::certified);
    const auto d = corpus::debreu();
    EXPECT_EQ(lemma1_check(d.f, Vector{0.0, 0.2}, d.domain, GridSpec{41, 0, 0}).verdict, Verdict::certified);
    const auto cd = corpus::cobb_douglas();
    EXPECT_EQ(lemma1_check(cd.f, Vector{1.0, 1.2}, cd.domain, GridSpec{41, 5, 200}).verdict, Verdict::certified);
}

TEST(Lemma1, VanishingNormalRejected) {
    const auto s = corpus::neg_sq();
    EXPECT_THROW(lemma1_check(s.f, Vector{0.0, 0.0}, s.domain, GridSpec{5, 0, 0}), Error);
}
