#include "socsim/resources.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

namespace {

constexpr double kRoundingSlack = 1e-9;

std::uint32_t whole_units(double v) {
    return v <= 0.0 ? 0u : static_cast<std::uint32_t>(std::ceil(v - kRoundingSlack));
}

ResourceCoefficients fit_one(const std::vector<CostAnchor>& anchors, const std::vector<CostFeature>& basis,
                             auto observed, std::string_view resource) {
    const auto rows = static_cast<Eigen::Index>(anchors.size());
    const auto cols = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto f = cost_features(anchors[i].point);
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = f[static_cast<std::size_t>(basis[j])];
        b(i) = observed(anchors[i].observed);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < cols) {
        throw CalibrationError(fmt::format(
            "{} anchors are rank-deficient: rank {} < {} unknowns; add anchors that vary every regressor",
            resource, qr.rank(), cols));
    }
    const Eigen::VectorXd x = qr.solve(b);

    ResourceCoefficients c;
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (x(j) < -1e-9) {
            throw CalibrationError(fmt::format("{} fit gives negative {} coefficient {:.4f}", resource,
                                               kCostFeatureNames[static_cast<std::size_t>(basis[j])], x(j)));
        }
        // Snap to 1e-9 so solver round-off does not leak into written configs.
        c.weights[static_cast<std::size_t>(basis[j])] = std::max(0.0, std::round(x(j) * 1e9) / 1e9);
    }
    return c;
}

}  // namespace

void ResourceBudget::validate() const {
    if (block_memory_bits != std::uint64_t(m9k_blocks) * kM9kBits) {
        throw ConfigError(fmt::format("block memory bits {} != {} M9K blocks x {}", block_memory_bits,
                                      m9k_blocks, kM9kBits));
    }
}

std::string DesignPoint::label() const { return fmt::format("{}CPU-IC{}-DC{}", cpus, ic_kb, dc_kb); }

std::array<double, 5> cost_features(const DesignPoint& p) {
    const double n = p.cpus;
    return {1.0, n, n * p.ic_kb, n * p.dc_kb, p.dc_kb > 0 ? n : 0.0};
}

double ResourceCoefficients::predict(const DesignPoint& p) const {
    const auto f = cost_features(p);
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) v += weights[i] * f[i];
    return v;
}

std::vector<CostAnchor> fitter_report_anchors() {
    return {
        {{2, 16, 0}, {51, 9'718, 5'460}},
        {{1, 8, 32}, {53, 8'937, 5'492}},
        {{2, 8, 8}, {55, 11'813, 6'631}},
    };
}

CostFit calibrate_costs(const std::vector<CostAnchor>& anchors, const CostBasis& basis) {
    if (anchors.size() < 3) {
        throw CalibrationError(fmt::format("cost calibration needs at least 3 anchors, got {}", anchors.size()));
    }
    CostFit fit;
    fit.coefficients.m9k = fit_one(anchors, basis.m9k, [](const ResourceUsage& u) { return double(u.m9k); }, "M9K");
    fit.coefficients.logic_elements = fit_one(
        anchors, basis.logic_elements, [](const ResourceUsage& u) { return double(u.logic_elements); },
        "logic element");
    fit.coefficients.registers = fit_one(
        anchors, basis.registers, [](const ResourceUsage& u) { return double(u.registers); }, "register");

    for (const auto& a : anchors) {
        const ResourceUsage p = predict_usage(a.point, fit.coefficients);
        fit.residuals.push_back({std::int64_t(p.m9k) - a.observed.m9k,
                                 std::int64_t(p.logic_elements) - a.observed.logic_elements,
                                 std::int64_t(p.registers) - a.observed.registers});
    }
    return fit;
}

const CostCoefficients& default_cost_coefficients() {
    static const CostCoefficients c = calibrate_costs(fitter_report_anchors()).coefficients;
    return c;
}

ResourceUsage predict_usage(const DesignPoint& p, const CostCoefficients& c) {
    return {whole_units(c.m9k.predict(p)), whole_units(c.logic_elements.predict(p)),
            whole_units(c.registers.predict(p))};
}

bool fits(const ResourceUsage& u, const ResourceBudget& budget) {
    return u.m9k <= budget.m9k_blocks && u.logic_elements <= budget.logic_elements &&
           u.registers <= budget.registers;
}

ResourceEstimate estimate(const DesignPoint& p, const CostCoefficients& c, const ResourceBudget& budget) {
    ResourceEstimate e;
    e.used = predict_usage(p, c);
    e.fits = fits(e.used, budget);
    const auto f = cost_features(p);
    for (std::size_t i = 0; i < f.size(); ++i) e.m9k_breakdown[i] = c.m9k.weights[i] * f[i];
    return e;
}

std::vector<DesignPoint> SweepGrid::points() const {
    std::vector<DesignPoint> out;
    for (auto n : cpus) {
        for (auto ic : ic_kb) {
            for (auto dc : dc_kb) out.push_back({n, ic, dc});
        }
    }
    return out;
}

std::vector<DesignPoint> feasible_frontier(const CostCoefficients& c, const ResourceBudget& budget,
                                           const SweepGrid& grid) {
    auto sorted = [](std::vector<std::uint32_t> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const auto cpus = sorted(grid.cpus);
    const auto ics = sorted(grid.ic_kb);
    const auto dcs = sorted(grid.dc_kb);

    auto next = [](const std::vector<std::uint32_t>& ladder, std::uint32_t v) -> std::optional<std::uint32_t> {
        auto it = std::upper_bound(ladder.begin(), ladder.end(), v);
        if (it == ladder.end()) return std::nullopt;
        return *it;
    };
    auto ok = [&](const DesignPoint& p) { return fits(predict_usage(p, c), budget); };

    std::vector<DesignPoint> frontier;
    for (const auto& p : SweepGrid{cpus, ics, dcs}.points()) {
        if (!ok(p)) continue;
        bool maximal = true;
        if (auto n = next(cpus, p.cpus)) maximal = maximal && !ok({*n, p.ic_kb, p.dc_kb});
        if (auto i = next(ics, p.ic_kb)) maximal = maximal && !ok({p.cpus, *i, p.dc_kb});
        if (auto d = next(dcs, p.dc_kb)) maximal = maximal && !ok({p.cpus, p.ic_kb, *d});
        if (maximal) frontier.push_back(p);
    }
    return frontier;
}

}  // namespace socsim
