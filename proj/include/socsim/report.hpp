#pragma once

#include <string>
#include <vector>

#include "socsim/bench.hpp"

namespace socsim {

inline constexpr const char* kSweepCsvHeader = "n_cpus,ic_kb,dc_kb,dhrystones_per_sec,vax_mips,m9k_used,fits";

/// One row per table row. Throughput columns are empty for points that were
/// not simulated.
std::string to_csv(const SweepTable& table);
/// `| CPUs | IC | DC | Dhrystones/s | VAX MIPS | M9K | fits |` table.
std::string to_markdown(const SweepTable& table);
/// `label dhrystones_per_sec` per simulated row, in table order.
std::string to_plot_data(const SweepTable& table);

/// Per-core counters of one run as markdown.
std::string core_stats_markdown(const SimResult& result);

std::string residuals_csv(const CalibrationResult& result);
std::string recommendation_text(const std::optional<Recommendation>& rec);

/// Published Dhrystone results of other processors, for context only.
struct ReferenceCpu {
    std::string name;
    double mhz = 0.0;
    double vax_mips = 0.0;
};

std::vector<ReferenceCpu> reference_cpus_dhrystone11();
std::vector<ReferenceCpu> reference_cpus_dhrystone21();

std::string reference_markdown();
/// `dhrystone_version,cpu,mhz,vax_mips`
std::string reference_csv();
std::string reference_plot_data();

}  // namespace socsim
