#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eshg/model.hpp"
#include "eshg/shooting.hpp"

namespace eshg::cli {

/// Flat key/value configuration. Keys mirror the long flag names without the dashes.
class RunConfig {
public:
    /// "key = value" lines; '#' starts a comment; later lines override earlier ones.
    static RunConfig parse(std::string_view text);

    void set(const std::string& key, const std::string& value);
    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double number(const std::string& key) const;
    [[nodiscard]] double number(const std::string& key, double fallback) const;
    [[nodiscard]] long integer(const std::string& key, long fallback) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const;  // comma separated

    [[nodiscard]] ModelParams params() const;
    [[nodiscard]] bvp::ShootingOptions shooting_options() const;
    [[nodiscard]] nlohmann::json echo() const;
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

const std::vector<std::string>& known_keys();

struct CommandOutcome {
    int exit_code = 0;
    std::string out;
    std::string err;
};

/// 0 success, 1 usage/validation, 2 no solution or no convergence.
int exit_code_for(ErrorCode code);

/// Subcommands: va-solve, locate-es, shoot, sweep, integrals-check.
CommandOutcome run_command(std::string_view command, const RunConfig& cfg);
CommandOutcome run_command_text(std::string_view command, std::string_view config_text);

} // namespace eshg::cli
