#pragma once

// Definitional sampling oracles for quasi-concavity, strict
// quasi-concavity and concavity. They can refute, never certify.
//
// Before any random trial the n axis-parallel chords through the box centre
// are scanned on the 33-point grid t = i/32. Trial k then draws x, y
// uniformly in the (margin-shrunk) box, a mixing weight t and an axis a, all
// from counter-addressed draws of a CounterRng. Each trial inspects two
// pairs: (x, y) and the axis-aligned pair (x, y') where y' copies x except
// on axis a. Every pair is tested at the random t and on the t grid. The
// first violating pair in (chord, trial, pair) order is reported, at the t
// with the largest gap, so a witness found with T trials is found again with
// any T' > T.

#include <qcert/certifier.hpp>
#include <qcert/function_model.hpp>
#include <qcert/random.hpp>
#include <qcert/report.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>

namespace qcert {

inline constexpr double kStrictBand = 1e-10;
inline constexpr double kStrictMinSeparation = 1e-6;
inline constexpr int kMixGridIntervals = 32;

/// (1 - t) x + t y
inline Vector mix(const Vector& x, const Vector& y, double t) {
    Vector m(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m[i] = (1.0 - t) * x[i] + t * y[i];
    return m;
}

namespace detail {

enum class OracleKind { quasiconcave, strict, concave };

inline const char* witness_kind(OracleKind k) {
    switch (k) {
        case OracleKind::quasiconcave: return "quasiconcavity_violation";
        case OracleKind::strict: return "strict_quasiconcavity_violation";
        case OracleKind::concave: return "concavity_violation";
    }
    return "violation";
}

// Returns a witness when the mixture at t violates the property.
inline std::optional<Witness> test_mixture(OracleKind kind, const ScalarField& f, const Vector& x, const Vector& y,
                                           double fx, double fy, double t, double tol) {
    const double lhs = f(mix(x, y, t));
    switch (kind) {
        case OracleKind::quasiconcave: {
            const double rhs = std::min(fx, fy);
            if (lhs < rhs - tol) return Witness{witness_kind(kind), x, y, t, lhs, rhs, rhs - lhs, {}, {}};
            break;
        }
        case OracleKind::strict: {
            if (!(t > 0.0 && t < 1.0)) break;
            const double rhs = std::min(fx, fy) + tol;
            if (lhs <= rhs) return Witness{witness_kind(kind), x, y, t, lhs, rhs, rhs - lhs, {}, {}};
            break;
        }
        case OracleKind::concave: {
            const double rhs = (1.0 - t) * fx + t * fy;
            if (lhs < rhs - tol) return Witness{witness_kind(kind), x, y, t, lhs, rhs, rhs - lhs, {}, {}};
            break;
        }
    }
    return std::nullopt;
}

// All t values of one pair; the violation with the largest gap wins, ties to
// the earlier t.
inline std::optional<Witness> scan_pair(OracleKind kind, const ScalarField& f, const Vector& x, const Vector& y,
                                        std::optional<double> t_rand, double tol) {
    const double fx = f(x);
    const double fy = f(y);
    std::optional<Witness> worst;
    auto consider = [&](double t) {
        auto w = test_mixture(kind, f, x, y, fx, fy, t, tol);
        if (w && (!worst || w->gap > worst->gap)) worst = std::move(w);
    };
    if (t_rand) consider(*t_rand);
    for (int i = 0; i <= kMixGridIntervals; ++i) consider(static_cast<double>(i) / kMixGridIntervals);
    return worst;
}

inline CertReport run_oracle(OracleKind kind, Mode mode, const ScalarField& f, const BoxDomain& domain,
                             std::size_t trials, std::uint64_t seed, double tol) {
    if (trials < 1) throw Error(ErrorKind::ConfigError, "oracle needs at least one trial");
    const std::size_t n = domain.dim();
    if (f.dim != 0 && f.dim != n) throw Error(ErrorKind::DimensionMismatch, "field and box dimensions differ");

    CertReport report;
    report.mode = mode;
    report.tolerances = {tol, tol};
    const CounterRng rng(seed);
    const std::uint64_t draws = 2 * n + 2;

    std::size_t pairs = 0;
    std::size_t skipped = 0;
    std::size_t trials_run = 0;
    std::optional<Witness> found;
    Vector ux(n), uy(n);
    for (std::size_t a = 0; a < n && !found; ++a) {
        ux.assign(n, 0.5);
        uy.assign(n, 0.5);
        ux[a] = 0.0;
        uy[a] = 1.0;
        ++pairs;
        found = scan_pair(kind, f, domain.map_unit(ux), domain.map_unit(uy), std::nullopt, tol);
    }
    for (std::size_t k = 0; k < trials && !found; ++k) {
        ++trials_run;
        const std::uint64_t base = k * draws;
        for (std::size_t i = 0; i < n; ++i) {
            ux[i] = rng.uniform(base + i);
            uy[i] = rng.uniform(base + n + i);
        }
        const double t_rand = rng.uniform(base + 2 * n);
        const std::size_t axis = static_cast<std::size_t>(rng.bits(base + 2 * n + 1) % n);

        const Vector x = domain.map_unit(ux);
        const Vector y = domain.map_unit(uy);
        Vector y_axis = x;
        y_axis[axis] = y[axis];

        for (const Vector* other : std::array<const Vector*, 2>{&y, &y_axis}) {
            if (found) break;
            Vector diff = *other;
            for (std::size_t i = 0; i < n; ++i) diff[i] -= x[i];
            if (kind == OracleKind::strict && norm(diff) < kStrictMinSeparation) {
                ++skipped;
                continue;
            }
            ++pairs;
            found = scan_pair(kind, f, x, *other, t_rand, tol);
        }
    }

    if (found) report.witnesses.push_back(*found);
    report.verdict = found ? Verdict::refuted : Verdict::no_violation;
    report.grid = {0, 0, seed, pairs};
    report.metadata["trials"] = trials;
    report.metadata["trials_run"] = trials_run;
    report.metadata["pairs_checked"] = pairs;
    report.metadata["pairs_skipped"] = skipped;
    report.metadata["centre_chords"] = n;
    report.metadata["t_grid_points"] = kMixGridIntervals + 1;
    report.metadata["sampling_only"] = true;
    return report;
}

} // namespace detail

/// Searches for f((1-t)x+ty) < min(f(x), f(y)) - tol.
inline CertReport quasiconcavity_oracle(const ScalarField& f, const BoxDomain& domain, std::size_t trials,
                                        std::uint64_t seed, double tol = kDefaultTol) {
    return detail::run_oracle(detail::OracleKind::quasiconcave, Mode::oracle, f, domain, trials, seed, tol);
}

/// Searches for f((1-t)x+ty) <= min(f(x), f(y)) + band with 0 < t < 1 and
/// |x - y| >= 1e-6.
inline CertReport strict_quasiconcavity_oracle(const ScalarField& f, const BoxDomain& domain, std::size_t trials,
                                               std::uint64_t seed, double band = kStrictBand) {
    return detail::run_oracle(detail::OracleKind::strict, Mode::strict_oracle, f, domain, trials, seed, band);
}

/// Searches for f((1-t)x+ty) < (1-t) f(x) + t f(y) - tol.
inline CertReport concavity_oracle(const ScalarField& f, const BoxDomain& domain, std::size_t trials,
                                   std::uint64_t seed, double tol = kDefaultTol) {
    return detail::run_oracle(detail::OracleKind::concave, Mode::concavity_oracle, f, domain, trials, seed, tol);
}

/// EXPERIMENTAL. Tabulates the largest eigenvalue of sym(Dg(x)) per grid
/// point next to the global outcome of the concavity oracle on f.
inline ComparisonReport concavity_conjecture_mode(const ScalarField& f, const C1StarPair& pair,
                                                  const BoxDomain& domain, const GridSpec& grid, std::size_t trials,
                                                  std::uint64_t seed, double tol = kDefaultTol) {
    const CertReport oracle = concavity_oracle(f, domain, trials, seed, tol);
    const bool oracle_clean = oracle.verdict == Verdict::no_violation;
    const double oracle_gap = oracle.witnesses.empty() ? 0.0 : oracle.witnesses.front().gap;

    ComparisonReport report;
    report.mode = Mode::concavity;
    report.left_name = "dg_nsd";
    report.right_name = "concavity_oracle";
    const std::size_t n = domain.dim();
    bool all_nsd = true;
    for (const auto& x : sample_points(domain, grid)) {
        const Matrix sym = symmetric_part(detail::checked_jacobian(pair, x, n));
        const double top = eig_symmetric(sym).back();
        all_nsd = all_nsd && top <= tol;
        report.rows.push_back({x, top <= tol, top, oracle_clean, oracle_gap});
    }
    report.summary["all_dg_nsd"] = all_nsd;
    report.summary["oracle_verdict"] = to_string(oracle.verdict);
    report.summary["consistent"] = all_nsd == oracle_clean;
    if (!oracle.witnesses.empty()) report.summary["oracle_witness"] = to_json(oracle.witnesses.front());
    report.metadata["experimental"] = true;
    report.metadata["tol"] = tol;
    report.metadata["trials"] = trials;
    report.metadata["seed"] = seed;
    report.metadata["fd_used"] = !pair.has_dg();
    return report;
}

} // namespace qcert
