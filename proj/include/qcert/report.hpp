#pragma once

#include <qcert/linalg.hpp>
#include <qcert/random.hpp>

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qcert {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode {
    theorem1,
    theorem2,
    lemma1,
    property_n,
    oracle,
    strict_oracle,
    concavity_oracle,
    concavity,
    validate_pair,
    conjecture,
};

enum class Verdict {
    certified,
    refuted,
    undetermined,
    precondition_failed,
    no_violation,  // sampling oracles only: nothing found, nothing certified
};

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::theorem1: return "theorem1";
        case Mode::theorem2: return "theorem2";
        case Mode::lemma1: return "lemma1";
        case Mode::property_n: return "property_n";
        case Mode::oracle: return "oracle";
        case Mode::strict_oracle: return "strict_oracle";
        case Mode::concavity_oracle: return "concavity_oracle";
        case Mode::concavity: return "concavity";
        case Mode::validate_pair: return "validate_pair";
        case Mode::conjecture: return "conjecture";
    }
    return "unknown";
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::refuted: return "refuted";
        case Verdict::undetermined: return "undetermined";
        case Verdict::precondition_failed: return "precondition_failed";
        case Verdict::no_violation: return "no_violation";
    }
    return "unknown";
}

/// Exit code of the command-line driver; a function of the verdict only.
inline int exit_code(Verdict v) {
    switch (v) {
        case Verdict::certified:
        case Verdict::no_violation: return 0;
        case Verdict::refuted: return 1;
        case Verdict::undetermined: return 2;
        case Verdict::precondition_failed: return 3;
    }
    return 4;
}

inline constexpr int kUsageExitCode = 4;

/// Per-point value of sup <w, Dg(x) w> over unit w in the kernel of g(x).
/// An empty kernel (n = 1) yields the lowest finite double.
struct PointMargin {
    Vector x;
    double max_kernel_eig = 0.0;
    double grad_norm = 0.0;
};

/// A structured violation record. Oracle witnesses fill x, y, t, lhs, rhs
/// and gap; certifier witnesses fill x and direction (lhs = form value,
/// rhs = threshold); Property N witnesses fill indices (0-based).
struct Witness {
    std::string kind;
    Vector x;
    Vector y;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    Vector direction;
    std::vector<std::size_t> indices;
};

struct Tolerances {
    double tol = 1e-8;
    double violation_threshold = 1e-7;
};

struct GridInfo {
    std::size_t points_per_axis = 0;
    std::size_t random_points = 0;
    std::uint64_t seed = 0;
    std::size_t points_evaluated = 0;
};

struct CertReport {
    Mode mode = Mode::theorem1;
    Verdict verdict = Verdict::undetermined;
    std::vector<PointMargin> margins;
    std::vector<Witness> witnesses;
    Tolerances tolerances;
    GridInfo grid;
    nlohmann::json metadata = nlohmann::json::object();

    /// Largest max_kernel_eig over margins (lowest() when none).
    double max_margin() const {
        double m = std::numeric_limits<double>::lowest();
        for (const auto& p : margins) m = std::max(m, p.max_kernel_eig);
        return m;
    }
};

/// One row of an experimental side-by-side comparison.
struct ComparisonRow {
    Vector x;
    bool left_pass = false;
    double left_margin = 0.0;
    bool right_pass = false;
    double right_margin = 0.0;
    bool agree() const { return left_pass == right_pass; }
};

/// Output of the exploratory modes. Carries data only, never a verdict.
struct ComparisonReport {
    Mode mode = Mode::conjecture;
    std::string left_name;
    std::string right_name;
    std::vector<ComparisonRow> rows;
    nlohmann::json summary = nlohmann::json::object();
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t agreements() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.agree() ? 1 : 0;
        return n;
    }
    std::size_t disagreements() const { return rows.size() - agreements(); }
};

inline nlohmann::json to_json(const Witness& w) {
    nlohmann::json j{{"kind", w.kind}, {"x", w.x},     {"y", w.y},     {"t", w.t},
                     {"lhs", w.lhs},   {"rhs", w.rhs}, {"gap", w.gap}};
    if (!w.direction.empty()) j["direction"] = w.direction;
    if (!w.indices.empty()) j["indices"] = w.indices;
    return j;
}

inline nlohmann::json to_json(const CertReport& r) {
    nlohmann::json margins = nlohmann::json::array();
    for (const auto& m : r.margins)
        margins.push_back({{"x", m.x}, {"max_kernel_eig", m.max_kernel_eig}, {"grad_norm", m.grad_norm}});
    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& w : r.witnesses) witnesses.push_back(to_json(w));

    nlohmann::json meta = r.metadata;
    if (!meta.contains("fd_used")) meta["fd_used"] = false;
    meta["generator"] = std::string(CounterRng::kAlgorithm);
    meta["version"] = kVersion;

    return {
        {"mode", to_string(r.mode)},
        {"verdict", to_string(r.verdict)},
        {"tolerances", {{"tol", r.tolerances.tol}, {"violation_threshold", r.tolerances.violation_threshold}}},
        {"grid",
         {{"points_per_axis", r.grid.points_per_axis},
          {"random_points", r.grid.random_points},
          {"seed", r.grid.seed},
          {"points_evaluated", r.grid.points_evaluated}}},
        {"margins", margins},
        {"witnesses", witnesses},
        {"metadata", meta},
    };
}

inline nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"x", row.x},
                        {r.left_name + "_pass", row.left_pass},
                        {r.left_name + "_margin", row.left_margin},
                        {r.right_name + "_pass", row.right_pass},
                        {r.right_name + "_margin", row.right_margin},
                        {"agree", row.agree()}});
    nlohmann::json summary = r.summary;
    summary["points"] = r.rows.size();
    summary["agree"] = r.agreements();
    summary["disagree"] = r.disagreements();

    nlohmann::json meta = r.metadata;
    if (!meta.contains("fd_used")) meta["fd_used"] = false;
    meta["generator"] = std::string(CounterRng::kAlgorithm);
    meta["version"] = kVersion;

    return {{"mode", to_string(r.mode)}, {"experimental", true}, {"rows", rows}, {"summary", summary}, {"metadata", meta}};
}

} // namespace qcert
