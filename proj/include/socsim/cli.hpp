#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "socsim/resources.hpp"

namespace socsim::cli {

enum class Command { simulate, sweep, fit, calibrate, gen_workload, dual_driver, report };
enum class Format { csv, markdown, plot_data };

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< `fit` on a non-fitting design, or a simulation error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct RunSpec {
    Command command = Command::simulate;
    std::string config_path;  ///< empty: reference.cfg from the config directory
    std::optional<std::uint64_t> seed;
    Format format = Format::csv;
    std::string output_path;  ///< empty: standard output

    std::optional<std::uint32_t> cpus;
    std::optional<std::uint32_t> ic_kb;
    std::optional<std::uint32_t> dc_kb;
    std::optional<std::uint64_t> iterations;
    bool allow_infeasible = false;
    std::string residuals_path;     ///< calibrate
    std::string write_config_path;  ///< gen-workload
};

struct ParseOutcome {
    std::optional<RunSpec> spec;
    int exit_code = kExitOk;  ///< meaningful when spec is empty
    std::string message;
};

/// args excludes the program name. Unknown flags, missing values and a
/// missing --seed on trace-synthesizing commands give kExitUsage.
ParseOutcome parse_args(const std::vector<std::string>& args);

/// Runs a parsed command, writing artifacts to the output path or `out` and
/// diagnostics to `err`.
int execute(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + execute.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace socsim::cli
