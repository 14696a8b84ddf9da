#pragma once

// Level curves of a planar field by integrating x2'(x1) = -g1/g2 with
// fixed-step classical RK4.

#include <qcert/error.hpp>
#include <qcert/function_model.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace qcert {

inline constexpr double kDefaultTraceStep = 1e-3;
inline constexpr double kMinAbsG2 = 1e-10;

struct TracePoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

struct Trace {
    std::vector<TracePoint> samples;  // ascending in x1, spaced by step
    std::size_t start_index = 0;      // the initial condition
    double level = 0.0;               // x2 at the initial abscissa
    double step = kDefaultTraceStep;
    std::string method = "RK4";

    const TracePoint& start() const { return samples.at(start_index); }
};

namespace detail {

inline double level_slope(const C1StarPair& pair, double x1, double x2) {
    const Vector g = pair.g(Vector{x1, x2});
    if (g.size() != 2) throw Error(ErrorKind::DimensionMismatch, "level tracing needs a planar field");
    if (!(std::abs(g[1]) > kMinAbsG2)) throw Error(ErrorKind::DegenerateSlope, "|g2| <= 1e-10 along the trace");
    return -g[0] / g[1];
}

inline double rk4_step(const C1StarPair& pair, double x1, double x2, double h) {
    const double k1 = level_slope(pair, x1, x2);
    const double k2 = level_slope(pair, x1 + 0.5 * h, x2 + 0.5 * h * k1);
    const double k3 = level_slope(pair, x1 + 0.5 * h, x2 + 0.5 * h * k2);
    const double k4 = level_slope(pair, x1 + h, x2 + h * k3);
    return x2 + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

// Integrates from (x1_0, x2_0) in direction sign until x1 passes `limit` or
// the box is left. Returns the new samples in integration order.
inline std::vector<TracePoint> integrate(const C1StarPair& pair, double x1_0, double x2_0, double limit, double step,
                                         double sign, const BoxDomain& domain) {
    std::vector<TracePoint> out;
    const double h = sign * step;
    double x2 = x2_0;
    double x1_prev = x1_0;
    for (std::size_t k = 1;; ++k) {
        const double x1 = x1_0 + static_cast<double>(k) * h;
        if (sign > 0 ? x1 > limit + 1e-9 * step : x1 < limit - 1e-9 * step) break;
        x2 = rk4_step(pair, x1_prev, x2, h);
        if (!domain.contains_closed(Vector{x1, x2})) break;
        out.push_back({x1, x2});
        x1_prev = x1;
    }
    return out;
}

} // namespace detail

/// Traces the level curve through `start` over x1 in [x1_lo, x1_hi],
/// integrating both ways from start.x1. Stops quietly at the box boundary.
inline Trace trace_level_from(const C1StarPair& pair, TracePoint start, double x1_lo, double x1_hi,
                              double step, const BoxDomain& domain) {
    if (domain.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "level tracing is planar only");
    if (!(step > 0.0)) throw Error(ErrorKind::ConfigError, "trace step must be positive");
    if (!(x1_lo <= start.x1 && start.x1 <= x1_hi))
        throw Error(ErrorKind::ConfigError, "start abscissa outside the x1 range");
    if (!domain.contains_closed(Vector{start.x1, start.x2}))
        throw Error(ErrorKind::DomainViolation, "trace start lies outside the box");
    detail::level_slope(pair, start.x1, start.x2);

    auto backward = detail::integrate(pair, start.x1, start.x2, x1_lo, step, -1.0, domain);
    const auto forward = detail::integrate(pair, start.x1, start.x2, x1_hi, step, 1.0, domain);

    Trace trace;
    trace.step = step;
    trace.level = start.x2;
    trace.samples.assign(backward.rbegin(), backward.rend());
    trace.start_index = trace.samples.size();
    trace.samples.push_back(start);
    trace.samples.insert(trace.samples.end(), forward.begin(), forward.end());
    return trace;
}

/// Level curve with initial condition x2(0) = c.
inline Trace trace_level(const C1StarPair& pair, double c, double x1_lo, double x1_hi, double step,
                         const BoxDomain& domain) {
    return trace_level_from(pair, {0.0, c}, x1_lo, x1_hi, step, domain);
}

/// max |f(sample) - f(start)| over the trace.
inline double level_consistency(const Trace& trace, const ScalarField& f) {
    if (trace.samples.empty()) throw Error(ErrorKind::ConfigError, "empty trace");
    const double f0 = f(Vector{trace.start().x1, trace.start().x2});
    double worst = 0.0;
    for (const auto& s : trace.samples) worst = std::max(worst, std::abs(f(Vector{s.x1, s.x2}) - f0));
    return worst;
}

/// Smallest second difference x2[i-1] - 2 x2[i] + x2[i+1]. Positive values
/// indicate a strictly convex level function.
inline double convexity_probe(const Trace& trace) {
    if (trace.samples.size() < 3) throw Error(ErrorKind::ConfigError, "convexity probe needs three samples");
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < trace.samples.size(); ++i)
        lowest = std::min(lowest, trace.samples[i - 1].x2 - 2.0 * trace.samples[i].x2 + trace.samples[i + 1].x2);
    return lowest;
}

/// CSV with header x1,x2,f and %.12g values.
inline void write_trace_csv(std::ostream& out, const Trace& trace, const ScalarField& f) {
    out << "x1,x2,f\n";
    char line[128];
    for (const auto& s : trace.samples) {
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", s.x1, s.x2, f(Vector{s.x1, s.x2}));
        out << line;
    }
}

} // namespace qcert
