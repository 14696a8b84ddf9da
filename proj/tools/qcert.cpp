// qcert: numerical quasi-concavity certification from the command line.
//
//   qcert <mode> --function <name|expr> [--g <e1;e2;...> --lambda <expr>]
//         --domain "x1:-0.5:0.5,x2:-0.5:0.5" --grid 21 --trials 10000
//         --seed 7 --tol 1e-8 --format json --out report.json

#include <qcert/qcert.hpp>

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

std::string join_modes() {
    std::string s;
    for (const auto& m : qcert::known_modes()) s += (s.empty() ? "" : ", ") + m;
    return s;
}

std::string default_of(const std::string& key) {
    std::istringstream in(qcert::to_config_text(qcert::RunConfig{}));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos && line.substr(0, eq) == key) return line.substr(eq + 3);
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical quasi-concavity certification on boxes.\n"
                 "Exit codes: 0 certified/no violation, 1 refuted, 2 undetermined, 3 precondition failed, "
                 "4 usage or config error."};
    app.get_formatter()->column_width(34);

    std::string mode;
    std::string config_path;
    bool list_corpus = false;
    app.add_option("mode", mode, "One of: " + join_modes());
    app.add_option("--config", config_path, "Flat key = value config file; flags override it");
    app.add_flag("--list-corpus", list_corpus, "List the built-in fields and exit");

    // Flag name -> config key; every value goes through the config parser so
    // the file and the command line share one grammar.
    const std::vector<std::pair<std::string, std::string>> keyed{
        {"--function", "Builtin corpus name or expression in x1..xn"},
        {"--g", "Components of g separated by ';' (Jacobian by finite differences)"},
        {"--lambda", "Positive scale field lambda (default 1 when --g is given)"},
        {"--domain", "Box as x1:lo:hi,x2:lo:hi,... (builtins supply a default)"},
        {"--grid", "Lattice points per axis"},
        {"--random-points", "Extra seeded uniform grid points"},
        {"--trials", "Oracle trials"},
        {"--seed", "Seed for the splitmix64-counter generator"},
        {"--tol", "Certification tolerance"},
        {"--violation-factor", "Refute when a margin exceeds factor * tol"},
        {"--strict-band", "Equality band of the strict oracle"},
        {"--pair-tol", "Residual tolerance for Df = lambda g"},
        {"--x-star", "lemma1 point, comma separated (default: box centre)"},
        {"--start", "trace start x1,x2 (default: 0,level)"},
        {"--level", "trace initial value x2(0)"},
        {"--x1-range", "trace abscissa range lo,hi (default: box)"},
        {"--step", "trace RK4 step"},
        {"--matrix", "property_n matrix, rows ';' entries ','"},
        {"--border", "property_n border vector, comma separated"},
        {"--format", "text or json"},
        {"--out", "Write the report here (atomically) instead of stdout"},
    };
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> options;
    for (const auto& [flag, help] : keyed) {
        std::string key = flag.substr(2);
        for (char& ch : key)
            if (ch == '-') ch = '_';
        const std::string def = default_of(key);
        auto* opt = app.add_option(flag, values[key], help);
        if (!def.empty()) opt->default_str(def);
        options.emplace_back(key, opt);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qcert::kUsageExitCode;
    }

    if (list_corpus) {
        for (const auto& e : qcert::builtin_corpus()) {
            std::cout << e.name << "  domain=" << qcert::format_domain(e.domain)
                      << "  quasiconcave=" << e.labels.quasiconcave
                      << " strict=" << e.labels.strictly_quasiconcave << " concave=" << e.labels.concave
                      << " Df_nonvanishing=" << e.labels.df_nonvanishing << "\n";
        }
        return 0;
    }

    qcert::RunConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw qcert::Error(qcert::ErrorKind::ConfigError, "cannot read '" + config_path + "'");
            std::stringstream buffer;
            buffer << in.rdbuf();
            config = qcert::parse_config_text(buffer.str());
        }
        if (!mode.empty()) config.mode = mode;
        for (const auto& [key, opt] : options)
            if (opt->count() > 0) qcert::set_config_value(config, key, values[key]);
    } catch (const qcert::Error& e) {
        std::cerr << "qcert: " << e.what() << "\n";
        return qcert::kUsageExitCode;
    }
    if (config.mode.empty()) {
        std::cerr << "qcert: a mode is required (" << join_modes() << ")\n";
        return qcert::kUsageExitCode;
    }

    const qcert::RunResult result = qcert::run(config);
    if (!result.error.empty()) std::cerr << "qcert: " << result.error << "\n";
    if (config.out.empty()) std::cout << result.output;
    return result.exit_code;
}
