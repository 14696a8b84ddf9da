#pragma once

// Run configuration and its flat `key = value` file format.
//
//   # comment
//   mode = theorem1
//   function = debreu_f
//   domain = x1:-0.5:0.5,x2:-0.5:0.5
//
// Blank lines and lines starting with '#' are ignored. Vector-valued g
// components are separated by ';', point coordinates by ','.

#include <qcert/error.hpp>
#include <qcert/function_model.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qcert {

inline const std::vector<std::string>& known_modes() {
    static const std::vector<std::string> modes{"validate",      "theorem1",         "theorem2",  "lemma1",
                                                "property_n",    "conjecture",       "oracle",    "strict_oracle",
                                                "concavity_oracle", "concavity",     "trace"};
    return modes;
}

struct RunConfig {
    std::string mode;
    std::string function;          // builtin corpus name or expression text
    std::vector<std::string> g;    // component expressions of g
    std::string lambda;            // expression; empty means 1
    std::string domain;            // "x1:lo:hi,x2:lo:hi"; empty means the builtin default
    std::size_t grid = 21;
    std::size_t random_points = 0;
    std::size_t trials = 10000;
    std::uint64_t seed = 7;
    double tol = 1e-8;
    double violation_factor = 10.0;
    double strict_band = 1e-10;
    double pair_tol = 1e-6;
    std::vector<double> x_star;    // lemma1
    std::vector<double> start;     // trace start (x1, x2); empty means (0, level)
    double level = 0.0;            // trace initial value x2(0)
    std::vector<double> x1_range;  // trace abscissa range; empty means the box
    double step = 1e-3;            // trace step
    std::string matrix;            // property_n: rows separated by ';', entries by ','
    std::vector<double> border;    // property_n border vector
    std::string format = "text";
    std::string out;               // empty writes to stdout

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline double parse_double(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw Error(ErrorKind::ConfigError, std::string(what) + ": expected a number, got '" + t + "'");
    return v;
}

template <typename Int>
Int parse_integer(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw Error(ErrorKind::ConfigError, std::string(what) + ": expected a non-negative integer, got '" + t + "'");
    return v;
}

inline std::vector<double> parse_doubles(std::string_view text, std::string_view what) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& part : split(text, ',')) out.push_back(parse_double(part, what));
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join_doubles(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
    return s;
}

} // namespace detail

/// Parses "x1:lo:hi,x2:lo:hi,...". Axes must appear in order x1..xn.
inline BoxDomain parse_domain(std::string_view text) {
    Vector lower, upper;
    const auto axes = detail::split(text, ',');
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto fields = detail::split(axes[i], ':');
        if (fields.size() != 3) throw Error(ErrorKind::ConfigError, "domain axis '" + axes[i] + "' is not name:lo:hi");
        if (fields[0] != "x" + std::to_string(i + 1))
            throw Error(ErrorKind::ConfigError, "domain axes must be x1..xn in order; got '" + fields[0] + "'");
        lower.push_back(detail::parse_double(fields[1], "domain lower bound"));
        upper.push_back(detail::parse_double(fields[2], "domain upper bound"));
    }
    return BoxDomain(std::move(lower), std::move(upper));
}

inline std::string format_domain(const BoxDomain& box) {
    std::string s;
    for (std::size_t i = 0; i < box.dim(); ++i)
        s += (i ? "," : "") + ("x" + std::to_string(i + 1)) + ":" + detail::format_double(box.lower()[i]) + ":" +
             detail::format_double(box.upper()[i]);
    return s;
}

/// Parses "a11,a12;a21,a22" into a square matrix.
inline Matrix parse_matrix(std::string_view text) {
    std::vector<double> entries;
    std::size_t rows = 0, cols = 0;
    for (const auto& row : detail::split(text, ';')) {
        const auto values = detail::parse_doubles(row, "matrix entry");
        if (rows == 0) cols = values.size();
        if (values.size() != cols || cols == 0) throw Error(ErrorKind::ConfigError, "matrix rows must be non-empty and equal length");
        entries.insert(entries.end(), values.begin(), values.end());
        ++rows;
    }
    return Matrix(rows, cols, std::move(entries));
}

/// Applies one key/value pair. Unknown keys are errors.
inline void set_config_value(RunConfig& c, std::string_view key, std::string_view raw) {
    const std::string k = detail::trim(key);
    const std::string v = detail::trim(raw);
    if (k == "mode") c.mode = v;
    else if (k == "function") c.function = v;
    else if (k == "g") c.g = v.empty() ? std::vector<std::string>{} : detail::split(v, ';');
    else if (k == "lambda") c.lambda = v;
    else if (k == "domain") c.domain = v;
    else if (k == "grid") c.grid = detail::parse_integer<std::size_t>(v, k);
    else if (k == "random_points") c.random_points = detail::parse_integer<std::size_t>(v, k);
    else if (k == "trials") c.trials = detail::parse_integer<std::size_t>(v, k);
    else if (k == "seed") c.seed = detail::parse_integer<std::uint64_t>(v, k);
    else if (k == "tol") c.tol = detail::parse_double(v, k);
    else if (k == "violation_factor") c.violation_factor = detail::parse_double(v, k);
    else if (k == "strict_band") c.strict_band = detail::parse_double(v, k);
    else if (k == "pair_tol") c.pair_tol = detail::parse_double(v, k);
    else if (k == "x_star") c.x_star = detail::parse_doubles(v, k);
    else if (k == "start") c.start = detail::parse_doubles(v, k);
    else if (k == "level") c.level = detail::parse_double(v, k);
    else if (k == "x1_range") c.x1_range = detail::parse_doubles(v, k);
    else if (k == "step") c.step = detail::parse_double(v, k);
    else if (k == "matrix") c.matrix = v;
    else if (k == "border") c.border = detail::parse_doubles(v, k);
    else if (k == "format") c.format = v;
    else if (k == "out") c.out = v;
    else throw Error(ErrorKind::ConfigError, "unknown config key '" + k + "'");
}

inline RunConfig parse_config_text(std::string_view text, RunConfig base = {}) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(base, t.substr(0, eq), t.substr(eq + 1));
    }
    return base;
}

/// Every field, one per line, in a form parse_config_text reads back exactly.
inline std::string to_config_text(const RunConfig& c) {
    std::string g;
    for (std::size_t i = 0; i < c.g.size(); ++i) g += (i ? ";" : "") + c.g[i];
    std::ostringstream out;
    out << "mode = " << c.mode << "\n"
        << "function = " << c.function << "\n"
        << "g = " << g << "\n"
        << "lambda = " << c.lambda << "\n"
        << "domain = " << c.domain << "\n"
        << "grid = " << c.grid << "\n"
        << "random_points = " << c.random_points << "\n"
        << "trials = " << c.trials << "\n"
        << "seed = " << c.seed << "\n"
        << "tol = " << detail::format_double(c.tol) << "\n"
        << "violation_factor = " << detail::format_double(c.violation_factor) << "\n"
        << "strict_band = " << detail::format_double(c.strict_band) << "\n"
        << "pair_tol = " << detail::format_double(c.pair_tol) << "\n"
        << "x_star = " << detail::join_doubles(c.x_star) << "\n"
        << "start = " << detail::join_doubles(c.start) << "\n"
        << "level = " << detail::format_double(c.level) << "\n"
        << "x1_range = " << detail::join_doubles(c.x1_range) << "\n"
        << "step = " << detail::format_double(c.step) << "\n"
        << "matrix = " << c.matrix << "\n"
        << "border = " << detail::join_doubles(c.border) << "\n"
        << "format = " << c.format << "\n"
        << "out = " << c.out << "\n";
    return out.str();
}

} // namespace qcert
