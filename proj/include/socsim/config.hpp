#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socsim/bench.hpp"
#include "socsim/resources.hpp"
#include "socsim/system.hpp"

namespace socsim {

/// Everything a config file can describe.
struct RunConfig {
    SystemConfig system;
    ResourceBudget budget;
    CostCoefficients costs = default_cost_coefficients();
    BenchSettings bench;
    std::vector<DesignPoint> sweep_space = full_space();
    /// Seed the timing parameters were calibrated with, if any.
    std::optional<std::uint64_t> calibration_seed;

    ResourceModel resources() const { return {costs, budget}; }
    bool operator==(const RunConfig&) const = default;
};

/// Parses `[section]` / `key = value` text. `#` starts a comment. Unknown
/// sections or keys, malformed numbers and duplicate keys raise ConfigError
/// naming the line. Omitted keys keep their defaults.
RunConfig parse_config(std::string_view text);

/// Writes every key; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& config);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& config);

/// Environment variable naming the directory searched for config files.
inline constexpr const char* kConfigDirEnv = "SOCSIM_CONFIG_DIR";

/// Resolves a --config argument against the config directory:
/// $SOCSIM_CONFIG_DIR, or `fallback_dir` when the variable is unset. A
/// relative path that does not exist is looked up there; an empty argument
/// means reference.cfg there.
std::filesystem::path resolve_config_path(const std::string& arg, const std::filesystem::path& fallback_dir);

}  // namespace socsim
