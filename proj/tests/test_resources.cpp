#include <algorithm>

#include <gtest/gtest.h>

#include "socsim/errors.hpp"
#include "socsim/resources.hpp"

using namespace socsim;

namespace {

double w(const ResourceCoefficients& c, CostFeature f) { return c.weights[static_cast<std::size_t>(f)]; }

}  // namespace

TEST(Resources, FitMatchesHandSolvedSystem) {
    // Three anchors, three unknowns per resource, solved by elimination:
    //   M9K: 2a + 32b = 51, a + 8b + 32c = 53, 2a + 16b + 16c = 55
    //   LE:  f + 2g = 9718, f + g + h = 8937, f + 2g + 2h = 11813
    //   Reg: f + 2g = 5460, f + g + h = 5492, f + 2g + 2h = 6631
    const auto& c = default_cost_coefficients();
    EXPECT_NEAR(w(c.m9k, CostFeature::per_cpu), 12.5, 1e-9);
    EXPECT_NEAR(w(c.m9k, CostFeature::per_ic_kb), 0.8125, 1e-9);
    EXPECT_NEAR(w(c.m9k, CostFeature::per_dc_kb), 1.0625, 1e-9);
    EXPECT_NEAR(w(c.logic_elements, CostFeature::fixed), 6061, 1e-6);
    EXPECT_NEAR(w(c.logic_elements, CostFeature::per_cpu), 1828.5, 1e-6);
    EXPECT_NEAR(w(c.logic_elements, CostFeature::per_dc_controller), 1047.5, 1e-6);
    EXPECT_NEAR(w(c.registers, CostFeature::fixed), 4353, 1e-6);
    EXPECT_NEAR(w(c.registers, CostFeature::per_cpu), 553.5, 1e-6);
    EXPECT_NEAR(w(c.registers, CostFeature::per_dc_controller), 585.5, 1e-6);
}

TEST(Resources, AnchorsReproducedWithinTwoBlocks) {
    const auto& c = default_cost_coefficients();
    for (const auto& a : fitter_report_anchors()) {
        const auto u = predict_usage(a.point, c);
        EXPECT_LE(std::abs(int(u.m9k) - int(a.observed.m9k)), 2) << a.point.label();
        EXPECT_LE(std::abs(int(u.logic_elements) - int(a.observed.logic_elements)), 2);
        EXPECT_LE(std::abs(int(u.registers) - int(a.observed.registers)), 2);
    }
    EXPECT_EQ(predict_usage({2, 16, 0}, c).m9k, 51u);
    EXPECT_EQ(predict_usage({1, 8, 32}, c).m9k, 53u);
    EXPECT_EQ(predict_usage({2, 8, 8}, c).m9k, 55u);
}

TEST(Resources, FeasibilityOfNamedPoints) {
    const auto& c = default_cost_coefficients();
    const std::vector<DesignPoint> swept{{1, 2, 0}, {1, 4, 0},  {1, 8, 0},  {1, 16, 0}, {2, 2, 0},
                                        {2, 4, 0}, {2, 8, 0},  {2, 16, 0}, {1, 8, 4},  {1, 8, 8},
                                        {1, 8, 16}, {1, 8, 32}, {2, 8, 4}, {2, 8, 8}};
    for (const auto& p : swept) EXPECT_TRUE(estimate(p, c).fits) << p.label();
    EXPECT_FALSE(estimate({2, 32, 0}, c).fits);
    EXPECT_FALSE(estimate({1, 8, 64}, c).fits);
    // 2 * 12.5 + 64 * 0.8125 = 77; 12.5 + 8 * 0.8125 + 64 * 1.0625 = 87.
    EXPECT_EQ(estimate({2, 32, 0}, c).used.m9k, 77u);
    EXPECT_EQ(estimate({1, 8, 64}, c).used.m9k, 87u);
}

TEST(Resources, IdenticalAnchorsAreRankDeficient) {
    const CostAnchor a{{2, 8, 8}, {55, 11'813, 6'631}};
    EXPECT_THROW(calibrate_costs({a, a, a}), CalibrationError);
    EXPECT_THROW(calibrate_costs({a, a}), CalibrationError);
}

TEST(Resources, RecoversPlantedCoefficients) {
    auto m9k = [](DesignPoint p) { return 4 * p.cpus + 1 * p.cpus * p.ic_kb + 2 * p.cpus * p.dc_kb; };
    auto le = [](DesignPoint p) { return 1000 + 500 * p.cpus + (p.dc_kb ? 200 * p.cpus : 0); };
    auto reg = [](DesignPoint p) { return 800 + 300 * p.cpus + (p.dc_kb ? 100 * p.cpus : 0); };
    std::vector<CostAnchor> anchors;
    for (DesignPoint p : {DesignPoint{1, 2, 0}, {2, 4, 4}, {1, 8, 16}, {2, 16, 0}}) {
        anchors.push_back({p, {m9k(p), le(p), reg(p)}});
    }
    const CostFit fit = calibrate_costs(anchors);
    const auto& c = fit.coefficients;
    EXPECT_NEAR(w(c.m9k, CostFeature::per_cpu), 4, 1e-9);
    EXPECT_NEAR(w(c.m9k, CostFeature::per_ic_kb), 1, 1e-9);
    EXPECT_NEAR(w(c.m9k, CostFeature::per_dc_kb), 2, 1e-9);
    EXPECT_NEAR(w(c.logic_elements, CostFeature::fixed), 1000, 1e-6);
    EXPECT_NEAR(w(c.logic_elements, CostFeature::per_cpu), 500, 1e-6);
    EXPECT_NEAR(w(c.logic_elements, CostFeature::per_dc_controller), 200, 1e-6);
    EXPECT_NEAR(w(c.registers, CostFeature::fixed), 800, 1e-6);
    EXPECT_NEAR(w(c.registers, CostFeature::per_cpu), 300, 1e-6);
    EXPECT_NEAR(w(c.registers, CostFeature::per_dc_controller), 100, 1e-6);
    for (const auto& r : fit.residuals) EXPECT_EQ(r, (std::array<std::int64_t, 3>{0, 0, 0}));
}

TEST(Resources, UsageMonotoneInEveryKnob) {
    const auto& c = default_cost_coefficients();
    const SweepGrid g{{1, 2}, {2, 4, 8, 16, 32}, {0, 4, 8, 16, 32, 64}};
    for (const auto& p : g.points()) {
        const auto u = predict_usage(p, c);
        for (DesignPoint q : {DesignPoint{p.cpus + 1, p.ic_kb, p.dc_kb}, {p.cpus, p.ic_kb * 2, p.dc_kb},
                              {p.cpus, p.ic_kb, p.dc_kb ? p.dc_kb * 2 : 4}}) {
            const auto v = predict_usage(q, c);
            EXPECT_GE(v.m9k, u.m9k) << p.label() << " -> " << q.label();
            EXPECT_GE(v.logic_elements, u.logic_elements);
            EXPECT_GE(v.registers, u.registers);
        }
    }
}

TEST(Resources, FrontierOfFullGrid) {
    const auto& c = default_cost_coefficients();
    const SweepGrid g{{1, 2}, {2, 4, 8, 16, 32}, {0, 4, 8, 16, 32, 64}};
    const auto f = feasible_frontier(c, ResourceBudget{}, g);
    EXPECT_NE(std::find(f.begin(), f.end(), DesignPoint{2, 8, 8}), f.end());
    for (const auto& p : f) EXPECT_TRUE(estimate(p, c).fits) << p.label();
    EXPECT_EQ(std::find(f.begin(), f.end(), DesignPoint{1, 2, 0}), f.end());

    ResourceBudget none;
    none.m9k_blocks = 0;
    none.block_memory_bits = 0;
    EXPECT_TRUE(feasible_frontier(c, none, g).empty());
}

TEST(Resources, ExactBudgetPointIsOnFrontier) {
    const auto& c = default_cost_coefficients();
    ResourceBudget b;
    b.m9k_blocks = 55;
    b.block_memory_bits = 55ull * kM9kBits;
    const SweepGrid g{{2}, {8, 16}, {8, 16}};
    EXPECT_EQ(feasible_frontier(c, b, g), (std::vector<DesignPoint>{{2, 8, 8}}));
}

TEST(Resources, BudgetValidation) {
    EXPECT_NO_THROW(ResourceBudget{}.validate());
    ResourceBudget b;
    b.block_memory_bits += 1;
    EXPECT_THROW(b.validate(), ConfigError);
}
