#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "eshg/eshg.h"

namespace {

// Flag name -> help text. Values are forwarded as text; the library validates them.
const std::pair<const char*, const char*> kFlags[] = {
    {"delta", "relative SH dispersion"},
    {"q", "SHG mismatch"},
    {"gamma1", "FH Kerr coefficient"},
    {"gamma2", "SH Kerr coefficient"},
    {"model", "full|truncated (default truncated)"},
    {"k", "soliton wavenumber"},
    {"kmin", "lower end of the k range"},
    {"kmax", "upper end of the k range"},
    {"samples", "number of scan or table samples"},
    {"tol", "integrator / check tolerance"},
    {"tmax", "half-domain length"},
    {"method", "exact|criterion|scan"},
    {"output", "output file (CSV profile or JSON report)"},
    {"jobs", "worker threads for sweep"},
    {"type", "ordinary|embedded (shoot)"},
    {"guess", "initial U0,V0 for ordinary shooting"},
    {"grid", "sweep grid, e.g. gamma2=-0.3:-0.05:5,q=0.5:1.5:5"},
    {"amplitudes", "A,B for the full-model criterion"},
    {"bracket", "lo,hi for the criterion root search"},
    {"reference-k", "reference k_ES for the criterion comparison"},
};

std::string read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw CLI::ValidationError("--config", "cannot read '" + path + "'");
    }
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ordinary and embedded solitons of the chi(2):chi(3) stationary model"};
    app.set_version_flag("--version", std::string(eshg_version()));
    app.require_subcommand(1);

    const char* commands[] = {"va-solve", "locate-es", "shoot", "sweep", "integrals-check"};
    const char* about[] = {"variational amplitudes at a given k", "locate embedded solitons",
                           "shoot a soliton profile", "locate-es over a parameter grid",
                           "cross-check the sech^n integrals against quadrature"};
    std::map<std::string, std::string> values;
    std::string config_path;
    for (int c = 0; c < 5; ++c) {
        CLI::App* sub = app.add_subcommand(commands[c], about[c]);
        sub->add_option("--config", config_path, "flat key = value file; flags take precedence");
        for (const auto& [name, help] : kFlags) {
            sub->add_option_function<std::string>(
                std::string("--") + name, [&values, key = std::string(name)](const std::string& v) { values[key] = v; },
                help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::string text;
    try {
        if (!config_path.empty()) {
            text = read_file(config_path) + "\n";
        }
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    for (const auto& [key, value] : values) {
        text += key + " = " + value + "\n";
    }

    const CLI::App* sub = app.get_subcommands().front();
    eshg_result* result = nullptr;
    if (eshg_run_command(sub->get_name().c_str(), text.c_str(), &result) != ESHG_OK) {
        std::fprintf(stderr, "error: %s\n", eshg_last_error());
        return 2;
    }
    std::fputs(eshg_result_stdout(result), stdout);
    std::fputs(eshg_result_stderr(result), stderr);
    const int rc = eshg_result_exit_code(result);
    eshg_result_destroy(result);
    return rc;
}
