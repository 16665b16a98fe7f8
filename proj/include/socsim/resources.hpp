#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace socsim {

inline constexpr std::uint32_t kM9kBits = 9216;

/// Device capacity of the Cyclone III part the designs are fitted to.
struct ResourceBudget {
    std::uint32_t logic_elements = 24'624;
    std::uint32_t registers = 25'629;
    std::uint32_t labs = 1'539;
    std::uint32_t m9k_blocks = 66;
    std::uint64_t block_memory_bits = 608'256;
    std::uint32_t io_pins = 216;

    /// block_memory_bits must equal m9k_blocks * 9216.
    void validate() const;
    bool operator==(const ResourceBudget&) const = default;
};

/// The three knobs of the design-space sweep. Cache sizes are per core.
struct DesignPoint {
    std::uint32_t cpus = 1;
    std::uint32_t ic_kb = 0;
    std::uint32_t dc_kb = 0;

    auto operator<=>(const DesignPoint&) const = default;
    std::string label() const;
};

/// Regressors of the affine cost model.
enum class CostFeature : std::uint8_t { fixed, per_cpu, per_ic_kb, per_dc_kb, per_dc_controller };
inline constexpr std::array<const char*, 5> kCostFeatureNames{
    "fixed", "per_cpu", "per_ic_kb", "per_dc_kb", "per_dc_controller"};

/// Feature vector of a design point: 1, cores, total IC KB, total DC KB,
/// number of data-cache controllers.
std::array<double, 5> cost_features(const DesignPoint& p);

struct ResourceCoefficients {
    std::array<double, 5> weights{};  ///< indexed by CostFeature

    double predict(const DesignPoint& p) const;
    bool operator==(const ResourceCoefficients&) const = default;
};

struct CostCoefficients {
    ResourceCoefficients m9k;
    ResourceCoefficients logic_elements;
    ResourceCoefficients registers;

    bool operator==(const CostCoefficients&) const = default;
};

struct ResourceUsage {
    std::uint32_t m9k = 0;
    std::uint32_t logic_elements = 0;
    std::uint32_t registers = 0;

    bool operator==(const ResourceUsage&) const = default;
};

struct ResourceEstimate {
    ResourceUsage used;
    bool fits = false;
    /// M9K contribution of each feature before rounding up to whole blocks.
    std::array<double, 5> m9k_breakdown{};
};

struct CostAnchor {
    DesignPoint point;
    ResourceUsage observed;
};

/// The three fitter reports: (2 CPU, 16 KB IC), (1 CPU, 8 KB IC, 32 KB DC),
/// (2 CPU, 8 KB IC, 8 KB DC).
std::vector<CostAnchor> fitter_report_anchors();

/// Which features each resource is regressed on.
struct CostBasis {
    std::vector<CostFeature> m9k{CostFeature::per_cpu, CostFeature::per_ic_kb, CostFeature::per_dc_kb};
    std::vector<CostFeature> logic_elements{CostFeature::fixed, CostFeature::per_cpu,
                                            CostFeature::per_dc_controller};
    std::vector<CostFeature> registers{CostFeature::fixed, CostFeature::per_cpu,
                                       CostFeature::per_dc_controller};
};

struct CostFit {
    CostCoefficients coefficients;
    /// predicted - observed per anchor, after rounding predictions up.
    std::vector<std::array<std::int64_t, 3>> residuals;
};

/// Least-squares fit of each resource on its basis. Throws CalibrationError
/// for fewer than three anchors, a rank-deficient design matrix, or a
/// negative coefficient.
CostFit calibrate_costs(const std::vector<CostAnchor>& anchors, const CostBasis& basis = {});

/// Coefficients fitted to fitter_report_anchors() with the default basis.
const CostCoefficients& default_cost_coefficients();

ResourceUsage predict_usage(const DesignPoint& p, const CostCoefficients& c);
bool fits(const ResourceUsage& u, const ResourceBudget& budget);
ResourceEstimate estimate(const DesignPoint& p, const CostCoefficients& c, const ResourceBudget& budget = {});

/// Cartesian sweep space. Each list is the enlargement ladder for its knob.
struct SweepGrid {
    std::vector<std::uint32_t> cpus;
    std::vector<std::uint32_t> ic_kb;
    std::vector<std::uint32_t> dc_kb;

    std::vector<DesignPoint> points() const;
};

/// Fitting points whose every one-step enlargement in the grid (next IC size,
/// next DC size, next CPU count) does not fit. Missing rungs do not count.
std::vector<DesignPoint> feasible_frontier(const CostCoefficients& c, const ResourceBudget& budget,
                                           const SweepGrid& grid);

}  // namespace socsim
