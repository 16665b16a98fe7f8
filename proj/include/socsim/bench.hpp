#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socsim/resources.hpp"
#include "socsim/system.hpp"

namespace socsim {

/// Dhrystones per second of the VAX-11/780, the 1 VAX MIPS reference.
inline constexpr double kVaxDhrystonesPerSecond = 1757.0;

/// Unrounded Dhrystones/s / 1757. Throws ContractViolation for negative input.
double vax_mips(double dhrystones_per_sec);
/// Two decimals, rounded half-up.
std::string format_vax_mips(double dhrystones_per_sec);
/// Integer Dhrystones/s, rounded half-up.
std::uint64_t round_dhrystones(double dhrystones_per_sec);

struct BenchSettings {
    std::size_t iterations = 10'000;
    std::size_t warmup_iterations = 1;
    /// Run design points that do not fit the device (what-if analysis).
    bool allow_infeasible = false;

    bool operator==(const BenchSettings&) const = default;
};

struct ResourceModel {
    CostCoefficients costs = default_cost_coefficients();
    ResourceBudget budget;
};

struct SimResult {
    DesignPoint point;
    std::vector<CoreStats> per_core;           ///< measured window only
    std::uint64_t measured_micro_cycles = 0;   ///< slowest core
    std::size_t measured_iterations = 0;
    double dhrystones_per_sec = 0.0;
    double vax_mips = 0.0;
    ResourceEstimate resources;

    bool operator==(const SimResult& o) const {
        return point == o.point && per_core == o.per_core && measured_micro_cycles == o.measured_micro_cycles &&
               measured_iterations == o.measured_iterations && dhrystones_per_sec == o.dhrystones_per_sec;
    }
};

/// Copy of `base` with the core count and cache sizes of `p`.
SystemConfig configure(const SystemConfig& base, const DesignPoint& p);
DesignPoint design_point(const SystemConfig& config);

/// Each core runs its own copy of the benchmark in its own segment: warm-up
/// iterations first, then the measured iterations. Throughput counts every
/// core's iterations over the slowest core's measured cycles. Throws
/// InfeasibleDesign when the point does not fit and the override is off.
SimResult run_benchmark(const SystemConfig& config, const BenchSettings& bench, std::uint64_t seed,
                        const ResourceModel& resources = {});

// ---------------------------------------------------------------------------
// Design-space sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    DesignPoint point;
    ResourceEstimate resources;
    std::optional<SimResult> result;  ///< only for fitting points
};

struct SweepTable {
    std::vector<SweepRow> rows;

    const SweepRow* find(const DesignPoint& p) const;
    /// Throughput of a fitting, simulated point; nullopt otherwise.
    std::optional<double> throughput(const DesignPoint& p) const;
};

/// Instruction-cache sweep without data cache, 1 and 2 CPUs (8 points).
std::vector<DesignPoint> ic_sweep_space();
/// 8 KB instruction cache, data-cache sweep (6 points).
std::vector<DesignPoint> dc_sweep_space();
/// IC sweep followed by DC sweep (14 points).
std::vector<DesignPoint> full_space();
/// Enlargement ladders covering full_space(), for frontier searches.
SweepGrid full_grid();

/// Simulates every fitting point (concurrently); rows keep `space` order.
SweepTable sweep(const std::vector<DesignPoint>& space, const SystemConfig& base, const BenchSettings& bench,
                 std::uint64_t seed, const ResourceModel& resources = {});

struct Recommendation {
    DesignPoint point;
    double dhrystones_per_sec = 0.0;
    std::uint32_t m9k_used = 0;
    std::string rationale;
};

/// Highest throughput among fitting rows; ties go to fewer M9K blocks, then
/// fewer CPUs. Empty when nothing fits.
std::optional<Recommendation> recommend(const SweepTable& table);

// ---------------------------------------------------------------------------
// Timing calibration
// ---------------------------------------------------------------------------

struct TimingParams {
    std::uint64_t base_cpi_micro = kMicroPerCycle;
    std::uint32_t main_memory_latency = 40;
    std::uint32_t working_set_bytes = 2048;
    std::uint32_t code_footprint_bytes = 12288;

    bool operator==(const TimingParams&) const = default;
};

SystemConfig apply(const SystemConfig& base, const TimingParams& params);
TimingParams timing_params(const SystemConfig& config);

struct TimingAnchor {
    DesignPoint point;
    double dhrystones_per_sec = 0.0;
};

/// Measured Dhrystone 1.1 throughputs: (1, 2 KB IC) 10,000; (1, 16 KB IC) 11,297;
/// (1, 8 KB IC, 4 KB DC) 41,666; (2, 8 KB IC, 8 KB DC) 87,118.
std::vector<TimingAnchor> reference_timing_anchors();

/// The qualitative trade-off facts a calibrated model must reproduce.
struct RatioReport {
    double min_dual_speedup = 0.0;
    double max_dual_speedup = 0.0;
    double ic_gain = 0.0;                ///< 1 CPU, 2 KB -> 16 KB IC, no DC
    double dc_vs_best_no_dc = 0.0;       ///< (1, 8, 4) over best no-DC row
    double dc_vs_best_single_no_dc = 0.0;
    double dc_gain = 0.0;                ///< 1 CPU, 4 KB -> 32 KB DC
    std::optional<DesignPoint> recommended;

    /// Names of the violated conditions; empty when all hold.
    std::vector<std::string> violations() const;
};

/// Requires every full_space() point in `table`.
RatioReport evaluate_ratios(const SweepTable& table);

struct CalibrationGrid {
    std::vector<std::uint64_t> base_cpi_micro;
    std::vector<std::uint32_t> main_memory_latency;
    std::vector<std::uint32_t> working_set_bytes;
    std::vector<std::uint32_t> code_footprint_bytes;
    std::size_t iterations = 400;
    /// Candidates re-simulated with contention after the closed-form pass.
    std::size_t refine = 24;
    /// Reject candidates that break a RatioReport condition.
    bool require_ratios = true;
};

/// base_cpi 3.00..10.00 step 0.25; latency 20..100 step 2; working set
/// 1..6 KB step 1 KB; code footprint 4..16 KB step 2 KB.
CalibrationGrid default_calibration_grid();

struct AnchorResidual {
    TimingAnchor anchor;
    double simulated = 0.0;
    double relative_error = 0.0;
};

struct CalibrationResult {
    TimingParams params;
    std::vector<AnchorResidual> residuals;
    double max_relative_error = 0.0;
    RatioReport ratios;
};

/// Grid search minimising the maximum relative throughput error over the
/// anchors, among points that satisfy every RatioReport condition.
///
/// Single-core throughput is affine in base_cpi and miss latency once the
/// instruction and request counts are known, so the whole grid is scored in
/// closed form from one simulation per (working set, code footprint) pair,
/// with multi-core anchors first estimated contention-free. The best
/// `refine` candidates are then simulated in full and checked against the
/// ratio conditions in order of exact error.
///
/// Throws CalibrationError for fewer than four anchors, anchors that do not
/// cover both the no-DC and with-DC regimes, or (with require_ratios) when
/// no refined candidate satisfies the ratio conditions.
CalibrationResult calibrate_timing(const std::vector<TimingAnchor>& anchors, const SystemConfig& base,
                                   const CalibrationGrid& grid, std::uint64_t seed,
                                   const ResourceModel& resources = {});

}  // namespace socsim
