#pragma once

// Command driver: resolves a RunConfig into a field, decomposition and box,
// dispatches to the requested mode and renders the report.

#include <qcert/certifier.hpp>
#include <qcert/config.hpp>
#include <qcert/corpus.hpp>
#include <qcert/expression.hpp>
#include <qcert/function_model.hpp>
#include <qcert/level_tracer.hpp>
#include <qcert/oracle.hpp>
#include <qcert/property_n.hpp>
#include <qcert/report.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace qcert {

struct RunResult {
    int exit_code = kUsageExitCode;
    std::string output;        // rendered report (text, JSON or CSV)
    nlohmann::json report;     // structured report, null for CSV traces
    std::string error;         // usage/config message when exit_code == 4
};

/// A resolved problem: field, decomposition and box plus provenance flags.
struct Problem {
    ScalarField f;
    C1StarPair pair;
    BoxDomain domain;
    bool explicit_pair = false;  // g, lambda supplied independently of f
    bool fd_grad = false;
    bool fd_dg = false;
};

namespace detail {

inline Problem resolve_problem(const RunConfig& c) {
    if (c.function.empty()) throw Error(ErrorKind::ConfigError, "no function given");
    Problem p;
    const auto entry = find_corpus_entry(c.function);
    std::optional<BoxDomain> box;
    if (!c.domain.empty()) box = parse_domain(c.domain);
    else if (entry) box = entry->domain;
    else throw Error(ErrorKind::ConfigError, "a domain is required for expression fields");
    p.domain = *box;
    const std::size_t n = p.domain.dim();

    if (entry) {
        if (entry->dim != n) throw Error(ErrorKind::ConfigError, "domain dimension differs from builtin '" + entry->name + "'");
        p.f = entry->f;
        p.pair = entry->pair;
        p.explicit_pair = !entry->pair_is_gradient;
    } else {
        p.f = to_field(parse(c.function, n), n);
        p.pair = gradient_pair(p.f);
        p.fd_grad = true;
        p.fd_dg = true;
    }

    if (!c.g.empty()) {
        if (c.g.size() != n) throw Error(ErrorKind::ConfigError, "g needs one component per dimension");
        std::vector<Expression> comps;
        for (const auto& text : c.g) comps.push_back(parse(text, n));
        const Expression lam = c.lambda.empty() ? parse("1") : parse(c.lambda, n);
        p.pair.g = [comps](const Vector& x) {
            Vector v;
            v.reserve(comps.size());
            for (const auto& e : comps) v.push_back(e(x));
            return v;
        };
        p.pair.lambda = [lam](const Vector& x) { return lam(x); };
        p.pair.dg = {};
        p.explicit_pair = true;
        p.fd_dg = true;
    } else if (!c.lambda.empty()) {
        throw Error(ErrorKind::ConfigError, "lambda given without g");
    }
    return p;
}

inline GridSpec grid_of(const RunConfig& c) { return GridSpec{c.grid, c.seed, c.random_points}; }

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string fmt(const Vector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

inline std::string render_text(const CertReport& r) {
    std::ostringstream out;
    out << "mode: " << to_string(r.mode) << "\n"
        << "verdict: " << to_string(r.verdict) << "\n"
        << "tol: " << fmt(r.tolerances.tol) << "  threshold: " << fmt(r.tolerances.violation_threshold) << "\n"
        << "points: " << r.grid.points_evaluated << "\n";
    if (!r.margins.empty()) out << "max margin: " << fmt(r.max_margin()) << "\n";
    for (const auto& w : r.witnesses) {
        out << "witness [" << w.kind << "] x=" << fmt(w.x);
        if (!w.y.empty()) out << " y=" << fmt(w.y) << " t=" << fmt(w.t);
        if (!w.direction.empty()) out << " w=" << fmt(w.direction);
        if (!w.indices.empty()) {
            out << " indices=";
            for (std::size_t i = 0; i < w.indices.size(); ++i) out << (i ? "," : "") << w.indices[i];
        }
        out << " lhs=" << fmt(w.lhs) << " rhs=" << fmt(w.rhs) << " gap=" << fmt(w.gap) << "\n";
    }
    for (const auto& [key, value] : r.metadata.items()) out << key << ": " << value.dump() << "\n";
    return out.str();
}

inline std::string render_text(const ComparisonReport& r) {
    std::ostringstream out;
    out << "mode: " << to_string(r.mode) << " (EXPERIMENTAL - no verdict)\n"
        << "points: " << r.rows.size() << "  agree: " << r.agreements() << "  disagree: " << r.disagreements() << "\n";
    for (const auto& [key, value] : r.summary.items()) out << key << ": " << value.dump() << "\n";
    for (const auto& row : r.rows)
        if (!row.agree())
            out << "disagreement at " << fmt(row.x) << ": " << r.left_name << "=" << fmt(row.left_margin) << " "
                << r.right_name << "=" << fmt(row.right_margin) << "\n";
    return out.str();
}

inline void write_atomically(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error(ErrorKind::ConfigError, "write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, target);
}

inline RunResult finish(const RunConfig& c, nlohmann::json json, std::string text, int code) {
    RunResult r;
    r.exit_code = code;
    r.output = c.format == "json" ? json.dump(2) + "\n" : std::move(text);
    r.report = std::move(json);
    return r;
}

inline RunResult finish(const RunConfig& c, CertReport report, const Problem* p) {
    if (p != nullptr) {
        if (!report.metadata.contains("fd_used") || !report.metadata["fd_used"].is_object())
            report.metadata["fd_used"] = {{"grad", p->fd_grad}, {"dg", p->fd_dg}};
    }
    const int code = exit_code(report.verdict);
    return finish(c, to_json(report), render_text(report), code);
}

inline RunResult finish(const RunConfig& c, ComparisonReport report, const Problem& p) {
    report.metadata["fd_used"] = {{"grad", p.fd_grad}, {"dg", p.fd_dg}};
    return finish(c, to_json(report), render_text(report), 0);
}

inline RunResult dispatch(const RunConfig& c) {
    if (std::find(known_modes().begin(), known_modes().end(), c.mode) == known_modes().end())
        throw Error(ErrorKind::ConfigError, "unknown mode '" + c.mode + "'");
    if (c.format != "text" && c.format != "json") throw Error(ErrorKind::ConfigError, "format must be text or json");

    if (c.mode == "property_n") {
        if (c.matrix.empty() || c.border.empty()) throw Error(ErrorKind::ConfigError, "property_n needs matrix and border");
        const Matrix a = parse_matrix(c.matrix);
        const bool symmetric = asymmetry(a) <= 1e-8 * (1.0 + max_abs(a));
        return finish(c, property_n_check(BorderedForm(a, c.border, symmetric), c.tol), nullptr);
    }

    const Problem p = resolve_problem(c);
    const GridSpec grid = grid_of(c);

    if (c.mode == "validate") return finish(c, validate_pair(p.f, p.pair, p.domain, grid, c.pair_tol), &p);

    const bool needs_pair = c.mode == "theorem1" || c.mode == "theorem2" || c.mode == "conjecture" ||
                            c.mode == "concavity" || c.mode == "trace";
    nlohmann::json validation;
    if (needs_pair && p.explicit_pair) {
        const CertReport check = validate_pair(p.f, p.pair, p.domain, grid, c.pair_tol);
        if (check.verdict != Verdict::certified) return finish(c, check, &p);
        validation = {{"verdict", to_string(check.verdict)}, {"max_residual", check.metadata["max_residual"]}};
    }
    auto annotate = [&](CertReport r) {
        if (!validation.is_null()) r.metadata["pair_validation"] = validation;
        return r;
    };

    if (c.mode == "theorem1")
        return finish(c, annotate(certify_theorem1(p.pair, p.domain, grid, c.tol, c.violation_factor)), &p);
    if (c.mode == "theorem2") return finish(c, annotate(certify_theorem2(p.pair, p.domain, grid, c.tol)), &p);
    if (c.mode == "lemma1") {
        const Vector x_star = c.x_star.empty() ? p.domain.map_unit(Vector(p.domain.dim(), 0.5)) : c.x_star;
        return finish(c, lemma1_check(p.f, x_star, p.domain, grid, c.tol), &p);
    }
    if (c.mode == "oracle") return finish(c, quasiconcavity_oracle(p.f, p.domain, c.trials, c.seed, c.tol), &p);
    if (c.mode == "strict_oracle")
        return finish(c, strict_quasiconcavity_oracle(p.f, p.domain, c.trials, c.seed, c.strict_band), &p);
    if (c.mode == "concavity_oracle") return finish(c, concavity_oracle(p.f, p.domain, c.trials, c.seed, c.tol), &p);
    if (c.mode == "conjecture") {
        auto r = conjecture_mode(p.pair, p.domain, grid, c.tol);
        if (!validation.is_null()) r.metadata["pair_validation"] = validation;
        return finish(c, std::move(r), p);
    }
    if (c.mode == "concavity") {
        auto r = concavity_conjecture_mode(p.f, p.pair, p.domain, grid, c.trials, c.seed, c.tol);
        if (!validation.is_null()) r.metadata["pair_validation"] = validation;
        return finish(c, std::move(r), p);
    }

    // trace
    if (p.domain.dim() != 2) throw Error(ErrorKind::ConfigError, "trace needs a two-dimensional domain");
    TracePoint start{0.0, c.level};
    if (!c.start.empty()) {
        if (c.start.size() != 2) throw Error(ErrorKind::ConfigError, "start needs two coordinates");
        start = {c.start[0], c.start[1]};
    }
    double lo = p.domain.lower()[0], hi = p.domain.upper()[0];
    if (!c.x1_range.empty()) {
        if (c.x1_range.size() != 2) throw Error(ErrorKind::ConfigError, "x1_range needs two values");
        lo = c.x1_range[0];
        hi = c.x1_range[1];
    }
    const Trace trace = trace_level_from(p.pair, start, lo, hi, c.step, p.domain);
    std::ostringstream csv;
    write_trace_csv(csv, trace, p.f);
    RunResult r;
    r.exit_code = 0;
    r.output = csv.str();
    return r;
}

} // namespace detail

/// Runs one configuration. Exit codes: 0 certified / no violation,
/// 1 refuted, 2 undetermined, 3 precondition failed, 4 usage or config
/// error. When `out` is set the rendered report is written there atomically.
inline RunResult run(const RunConfig& config) {
    RunResult result;
    try {
        result = detail::dispatch(config);
        if (!config.out.empty()) detail::write_atomically(config.out, result.output);
    } catch (const Error& e) {
        // A violated mathematical precondition is a verdict; anything else is usage.
        const bool precondition = e.kind() == ErrorKind::VanishingGradient ||
                                  e.kind() == ErrorKind::PreconditionFailed ||
                                  e.kind() == ErrorKind::DegenerateSlope || e.kind() == ErrorKind::DegenerateBorder;
        result = RunResult{};
        result.exit_code = precondition ? exit_code(Verdict::precondition_failed) : kUsageExitCode;
        result.error = e.what();
    } catch (const std::exception& e) {
        result = RunResult{};
        result.error = e.what();
    }
    return result;
}

} // namespace qcert
