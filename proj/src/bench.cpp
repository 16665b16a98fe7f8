#include "socsim/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

double vax_mips(double dhrystones_per_sec) {
    if (!(dhrystones_per_sec >= 0.0)) {
        throw ContractViolation(fmt::format("Dhrystones/s must be non-negative, got {}", dhrystones_per_sec));
    }
    return dhrystones_per_sec / kVaxDhrystonesPerSecond;
}

std::string format_vax_mips(double dhrystones_per_sec) {
    // Exact half-up on the rational value: hundredths = floor(dps * 100 / 1757 + 1/2).
    const long double hundredths =
        std::floor(static_cast<long double>(dhrystones_per_sec) * 100.0L / 1757.0L + 0.5L);
    const auto h = static_cast<std::uint64_t>(hundredths);
    (void)vax_mips(dhrystones_per_sec);
    return fmt::format("{}.{:02}", h / 100, h % 100);
}

std::uint64_t round_dhrystones(double dhrystones_per_sec) {
    if (!(dhrystones_per_sec >= 0.0)) {
        throw ContractViolation(fmt::format("Dhrystones/s must be non-negative, got {}", dhrystones_per_sec));
    }
    return static_cast<std::uint64_t>(std::floor(dhrystones_per_sec + 0.5));
}

SystemConfig configure(const SystemConfig& base, const DesignPoint& p) {
    SystemConfig c = base;
    c.cpus = p.cpus;
    c.ic.capacity_bytes = p.ic_kb * 1024;
    c.dc.capacity_bytes = p.dc_kb * 1024;
    return c;
}

DesignPoint design_point(const SystemConfig& config) {
    return {config.cpus, config.ic.capacity_bytes / 1024, config.dc.capacity_bytes / 1024};
}

SimResult run_benchmark(const SystemConfig& config, const BenchSettings& bench, std::uint64_t seed,
                        const ResourceModel& resources) {
    config.validate();
    if (bench.iterations == 0) throw ContractViolation("a benchmark needs at least one measured iteration");

    SimResult out;
    out.point = design_point(config);
    out.resources = estimate(out.point, resources.costs, resources.budget);
    if (!out.resources.fits && !bench.allow_infeasible) {
        const auto& u = out.resources.used;
        const auto& b = resources.budget;
        throw InfeasibleDesign(fmt::format(
            "{} does not fit: M9K {}/{}, logic elements {}/{}, registers {}/{}", out.point.label(), u.m9k,
            b.m9k_blocks, u.logic_elements, b.logic_elements, u.registers, b.registers));
    }

    const MemoryMap map = config.memory_map();
    const Trace body = synthesize(config.workload, 1, seed);
    std::vector<Trace> warm, measured;
    warm.reserve(config.cpus);
    measured.reserve(config.cpus);
    for (CoreId k = 0; k < config.cpus; ++k) {
        const Trace t = body.relocated(map.segment(k).base);
        warm.push_back(t.with_iterations(bench.warmup_iterations));
        measured.push_back(t.with_iterations(bench.iterations));
    }

    std::vector<std::vector<Action>> programs(config.cpus);
    for (CoreId k = 0; k < config.cpus; ++k) {
        if (bench.warmup_iterations > 0) programs[k].push_back(action::RunTrace{&warm[k]});
        programs[k].push_back(action::Snapshot{});
        programs[k].push_back(action::RunTrace{&measured[k]});
    }
    const EngineResult run = run_programs(config, programs);

    for (const auto& core : run.cores) {
        out.per_core.push_back(core.stats - core.snapshots.front());
        out.measured_micro_cycles = std::max(out.measured_micro_cycles, out.per_core.back().micro_cycles);
    }
    out.measured_iterations = bench.iterations;
    out.dhrystones_per_sec = static_cast<double>(static_cast<long double>(bench.iterations) * config.cpus *
                                                 config.core.clock_hz * kMicroPerCycle /
                                                 out.measured_micro_cycles);
    out.vax_mips = vax_mips(out.dhrystones_per_sec);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

const SweepRow* SweepTable::find(const DesignPoint& p) const {
    for (const auto& r : rows) {
        if (r.point == p) return &r;
    }
    return nullptr;
}

std::optional<double> SweepTable::throughput(const DesignPoint& p) const {
    const SweepRow* r = find(p);
    if (!r || !r->result) return std::nullopt;
    return r->result->dhrystones_per_sec;
}

std::vector<DesignPoint> ic_sweep_space() {
    std::vector<DesignPoint> s;
    for (std::uint32_t n : {1u, 2u}) {
        for (std::uint32_t ic : {2u, 4u, 8u, 16u}) s.push_back({n, ic, 0});
    }
    return s;
}

std::vector<DesignPoint> dc_sweep_space() {
    return {{1, 8, 4}, {1, 8, 8}, {1, 8, 16}, {1, 8, 32}, {2, 8, 4}, {2, 8, 8}};
}

std::vector<DesignPoint> full_space() {
    auto s = ic_sweep_space();
    const auto e2 = dc_sweep_space();
    s.insert(s.end(), e2.begin(), e2.end());
    return s;
}

SweepGrid full_grid() { return {{1, 2}, {2, 4, 8, 16, 32}, {0, 4, 8, 16, 32, 64}}; }

SweepTable sweep(const std::vector<DesignPoint>& space, const SystemConfig& base, const BenchSettings& bench,
                 std::uint64_t seed, const ResourceModel& resources) {
    SweepTable table;
    std::vector<std::future<SimResult>> jobs(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        SweepRow row{space[i], estimate(space[i], resources.costs, resources.budget), std::nullopt};
        if (row.resources.fits) {
            jobs[i] = std::async(std::launch::async, [&, p = space[i]] {
                return run_benchmark(configure(base, p), bench, seed, resources);
            });
        }
        table.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (jobs[i].valid()) table.rows[i].result = jobs[i].get();
    }
    return table;
}

std::optional<Recommendation> recommend(const SweepTable& table) {
    const SweepRow* best = nullptr;
    std::size_t fitting = 0;
    for (const auto& r : table.rows) {
        if (!r.resources.fits || !r.result) continue;
        ++fitting;
        if (!best) {
            best = &r;
            continue;
        }
        const double a = r.result->dhrystones_per_sec, b = best->result->dhrystones_per_sec;
        if (a > b || (a == b && (r.resources.used.m9k < best->resources.used.m9k ||
                                 (r.resources.used.m9k == best->resources.used.m9k &&
                                  r.point.cpus < best->point.cpus)))) {
            best = &r;
        }
    }
    if (!best) return std::nullopt;

    Recommendation rec;
    rec.point = best->point;
    rec.dhrystones_per_sec = best->result->dhrystones_per_sec;
    rec.m9k_used = best->resources.used.m9k;
    rec.rationale = fmt::format("highest throughput of {} fitting configurations: {} Dhrystones/s ({} VAX MIPS), "
                                "{} M9K blocks",
                                fitting, round_dhrystones(rec.dhrystones_per_sec),
                                format_vax_mips(rec.dhrystones_per_sec), rec.m9k_used);
    return rec;
}

// ---------------------------------------------------------------------------
// Ratios
// ---------------------------------------------------------------------------

namespace {

double need(const SweepTable& t, const DesignPoint& p) {
    if (auto v = t.throughput(p)) return *v;
    throw ContractViolation(fmt::format("sweep table has no simulated result for {}", p.label()));
}

}  // namespace

RatioReport evaluate_ratios(const SweepTable& table) {
    RatioReport r;
    r.min_dual_speedup = std::numeric_limits<double>::infinity();
    r.max_dual_speedup = 0.0;
    for (const auto& p : full_space()) {
        if (p.cpus != 1) continue;
        const DesignPoint dual{2, p.ic_kb, p.dc_kb};
        if (!table.find(dual)) continue;
        const double s = need(table, dual) / need(table, p);
        r.min_dual_speedup = std::min(r.min_dual_speedup, s);
        r.max_dual_speedup = std::max(r.max_dual_speedup, s);
    }

    r.ic_gain = need(table, {1, 16, 0}) / need(table, {1, 2, 0}) - 1.0;
    double best = 0.0, best_single = 0.0;
    for (const auto& p : ic_sweep_space()) {
        const double v = need(table, p);
        best = std::max(best, v);
        if (p.cpus == 1) best_single = std::max(best_single, v);
    }
    const double with_dc = need(table, {1, 8, 4});
    r.dc_vs_best_no_dc = with_dc / best;
    r.dc_vs_best_single_no_dc = with_dc / best_single;
    r.dc_gain = need(table, {1, 8, 32}) / with_dc - 1.0;
    if (auto rec = recommend(table)) r.recommended = rec->point;
    return r;
}

std::vector<std::string> RatioReport::violations() const {
    std::vector<std::string> v;
    if (min_dual_speedup < 1.9 || max_dual_speedup > 2.1) {
        v.push_back(fmt::format("dual/single speedup {:.3f}..{:.3f} outside [1.9, 2.1]", min_dual_speedup,
                                max_dual_speedup));
    }
    if (ic_gain > 0.15) v.push_back(fmt::format("2->16 KB IC gain {:.2f}% > 15%", 100 * ic_gain));
    if (dc_vs_best_no_dc < 1.8) {
        v.push_back(fmt::format("4 KB DC vs best no-DC {:.3f}x < 1.8x", dc_vs_best_no_dc));
    }
    if (dc_vs_best_single_no_dc < 3.0) {
        v.push_back(fmt::format("4 KB DC vs best single-CPU no-DC {:.3f}x < 3.0x", dc_vs_best_single_no_dc));
    }
    if (dc_gain > 0.10) v.push_back(fmt::format("4->32 KB DC gain {:.2f}% > 10%", 100 * dc_gain));
    const DesignPoint want{2, 8, 8};
    if (recommended != want) {
        v.push_back(fmt::format("recommendation {} != {}", recommended ? recommended->label() : "none",
                                want.label()));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Timing calibration
// ---------------------------------------------------------------------------

SystemConfig apply(const SystemConfig& base, const TimingParams& params) {
    SystemConfig c = base;
    c.core.base_cpi_micro = params.base_cpi_micro;
    c.latency.main_memory_latency = params.main_memory_latency;
    c.workload.working_set_bytes = params.working_set_bytes;
    c.workload.code_footprint_bytes = params.code_footprint_bytes;
    return c;
}

TimingParams timing_params(const SystemConfig& config) {
    return {config.core.base_cpi_micro, config.latency.main_memory_latency, config.workload.working_set_bytes,
            config.workload.code_footprint_bytes};
}

std::vector<TimingAnchor> reference_timing_anchors() {
    return {{{1, 2, 0}, 10'000}, {{1, 16, 0}, 11'297}, {{1, 8, 4}, 41'666}, {{2, 8, 8}, 87'118}};
}

CalibrationGrid default_calibration_grid() {
    CalibrationGrid g;
    for (std::uint64_t v = 3'000'000; v <= 10'000'000; v += 250'000) g.base_cpi_micro.push_back(v);
    for (std::uint32_t v = 20; v <= 100; v += 2) g.main_memory_latency.push_back(v);
    for (std::uint32_t v = 1024; v <= 6144; v += 1024) g.working_set_bytes.push_back(v);
    for (std::uint32_t v = 4096; v <= 16384; v += 2048) g.code_footprint_bytes.push_back(v);
    return g;
}

namespace {

/// Per measured iteration of one core, independent of base_cpi and latency.
struct EventCounts {
    double instructions = 0.0;
    double main_requests = 0.0;
    double onchip_requests = 0.0;
};

struct Candidate {
    TimingParams params;
    double estimated_error = 0.0;
};

SweepTable table_from(const std::vector<DesignPoint>& space, const std::map<DesignPoint, double>& dps,
                      const ResourceModel& resources) {
    SweepTable t;
    for (const auto& p : space) {
        SweepRow row{p, estimate(p, resources.costs, resources.budget), std::nullopt};
        if (row.resources.fits) {
            SimResult r;
            r.point = p;
            r.dhrystones_per_sec = dps.at(p);
            row.result = r;
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

double max_error(const std::vector<TimingAnchor>& anchors, const std::map<DesignPoint, double>& dps,
                 std::vector<AnchorResidual>* residuals = nullptr) {
    double worst = 0.0;
    for (const auto& a : anchors) {
        const double sim = dps.at(a.point);
        const double err = std::abs(sim - a.dhrystones_per_sec) / a.dhrystones_per_sec;
        worst = std::max(worst, err);
        if (residuals) residuals->push_back({a, sim, err});
    }
    return worst;
}

}  // namespace

CalibrationResult calibrate_timing(const std::vector<TimingAnchor>& anchors, const SystemConfig& base,
                                   const CalibrationGrid& grid, std::uint64_t seed,
                                   const ResourceModel& resources) {
    if (anchors.size() < 4) {
        throw CalibrationError(fmt::format("timing calibration needs at least 4 anchors, got {}", anchors.size()));
    }
    const bool no_dc = std::any_of(anchors.begin(), anchors.end(), [](auto& a) { return a.point.dc_kb == 0; });
    const bool with_dc = std::any_of(anchors.begin(), anchors.end(), [](auto& a) { return a.point.dc_kb > 0; });
    if (!no_dc || !with_dc) {
        throw CalibrationError(
            "anchors must include both no-DC and with-DC configurations; with one regime the miss latency "
            "and base CPI cannot be separated");
    }
    for (const auto& a : anchors) {
        if (!(a.dhrystones_per_sec > 0.0)) {
            throw CalibrationError(fmt::format("anchor {} has non-positive throughput", a.point.label()));
        }
    }
    if (grid.base_cpi_micro.empty() || grid.main_memory_latency.empty() || grid.working_set_bytes.empty() ||
        grid.code_footprint_bytes.empty()) {
        throw CalibrationError("calibration grid has an empty axis");
    }

    // Every point the ratio checks and the anchors refer to.
    std::vector<DesignPoint> space = full_space();
    for (const auto& a : anchors) {
        if (std::find(space.begin(), space.end(), a.point) == space.end()) space.push_back(a.point);
    }
    std::vector<DesignPoint> caches;  // single-core cache configurations
    for (const auto& p : space) {
        const DesignPoint one{1, p.ic_kb, p.dc_kb};
        if (std::find(caches.begin(), caches.end(), one) == caches.end()) caches.push_back(one);
    }

    BenchSettings bench;
    bench.iterations = grid.iterations;
    bench.allow_infeasible = true;
    const double clock = static_cast<double>(base.core.clock_hz);
    const double onchip = base.latency.onchip_latency;

    // Closed-form pass. Contention is ignored, so an n-core point runs at n
    // times its single-core rate.
    std::vector<Candidate> candidates;
    for (auto ws : grid.working_set_bytes) {
        for (auto code : grid.code_footprint_bytes) {
            const TimingParams shape{base.core.base_cpi_micro, base.latency.main_memory_latency, ws, code};
            const SystemConfig cfg = apply(base, shape);
            try {
                cfg.validate();
            } catch (const ConfigError&) {
                continue;
            }
            std::map<DesignPoint, EventCounts> counts;
            for (const auto& c : caches) {
                const SimResult r = run_benchmark(configure(cfg, c), bench, seed, resources);
                const CoreStats& s = r.per_core.front();
                const double it = static_cast<double>(bench.iterations);
                counts[c] = {s.instructions_retired / it, (s.memory_requests - s.onchip_accesses) / it,
                             s.onchip_accesses / it};
            }
            for (auto cpi : grid.base_cpi_micro) {
                for (auto lat : grid.main_memory_latency) {
                    std::map<DesignPoint, double> dps;
                    for (const auto& p : space) {
                        const EventCounts& e = counts.at({1, p.ic_kb, p.dc_kb});
                        const double cycles = e.instructions * (double(cpi) / kMicroPerCycle) +
                                              e.main_requests * lat + e.onchip_requests * onchip;
                        dps[p] = p.cpus * clock / cycles;
                    }
                    if (grid.require_ratios && !evaluate_ratios(table_from(space, dps, resources)).violations().empty()) {
                        continue;
                    }
                    candidates.push_back({{cpi, lat, ws, code}, max_error(anchors, dps)});
                }
            }
        }
    }
    if (candidates.empty()) {
        throw CalibrationError("no grid point satisfies the ratio conditions even without contention");
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.estimated_error < b.estimated_error; });
    candidates.resize(std::min(candidates.size(), std::max<std::size_t>(grid.refine, 1)));

    // Full simulation of the shortlisted points.
    std::optional<CalibrationResult> best;
    std::vector<std::string> last_violations;
    for (const auto& cand : candidates) {
        const SweepTable table = sweep(space, apply(base, cand.params), bench, seed, resources);
        std::map<DesignPoint, double> dps;
        for (const auto& row : table.rows) {
            if (row.result) dps[row.point] = row.result->dhrystones_per_sec;
        }
        bool anchors_simulated = true;
        for (const auto& a : anchors) anchors_simulated = anchors_simulated && dps.count(a.point);
        if (!anchors_simulated) continue;

        CalibrationResult r;
        r.params = cand.params;
        r.max_relative_error = max_error(anchors, dps, &r.residuals);
        r.ratios = evaluate_ratios(table);
        const auto v = r.ratios.violations();
        if (grid.require_ratios && !v.empty()) {
            last_violations = v;
            continue;
        }
        if (!best || r.max_relative_error < best->max_relative_error) best = std::move(r);
    }
    if (!best) {
        std::string why = "no shortlisted grid point satisfies the ratio conditions";
        for (const auto& v : last_violations) why += "; " + v;
        throw CalibrationError(why);
    }
    return *best;
}

}  // namespace socsim
