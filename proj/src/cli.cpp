#include "socsim/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "socsim/bench.hpp"
#include "socsim/config.hpp"
#include "socsim/errors.hpp"
#include "socsim/report.hpp"

#ifndef SOCSIM_DEFAULT_CONFIG_DIR
#define SOCSIM_DEFAULT_CONFIG_DIR "configs"
#endif

namespace socsim::cli {

namespace {

const std::map<std::string, Format> kFormats{
    {"csv", Format::csv}, {"markdown", Format::markdown}, {"plot-data", Format::plot_data}};

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string output;
    std::uint32_t cpus = 0, ic_kb = 0, dc_kb = 0;
    std::uint64_t iterations = 0;
    bool allow_infeasible = false;
    std::string residuals;
    std::string write_config;
};

class IoError : public Error {
public:
    using Error::Error;
};

void emit(const RunSpec& spec, const std::string& text, std::ostream& out) {
    if (spec.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(spec.output_path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open output '{}'", spec.output_path));
    f << text;
    if (!f) throw IoError(fmt::format("failed writing output '{}'", spec.output_path));
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(fmt::format("cannot open '{}'", path));
    f << text;
    if (!f) throw IoError(fmt::format("failed writing '{}'", path));
}

RunConfig load(const RunSpec& spec) {
    return load_config(resolve_config_path(spec.config_path, SOCSIM_DEFAULT_CONFIG_DIR));
}

std::string render(const SweepTable& table, Format format) {
    switch (format) {
    case Format::csv:
        return to_csv(table);
    case Format::markdown:
        return to_markdown(table);
    case Format::plot_data:
        return to_plot_data(table);
    }
    return {};
}

BenchSettings bench_of(const RunSpec& spec, const RunConfig& cfg) {
    BenchSettings b = cfg.bench;
    if (spec.iterations) b.iterations = *spec.iterations;
    if (spec.allow_infeasible) b.allow_infeasible = true;
    return b;
}

int do_simulate(const RunSpec& spec, std::ostream& out) {
    const RunConfig cfg = load(spec);
    DesignPoint p = design_point(cfg.system);
    if (spec.cpus) p.cpus = *spec.cpus;
    if (spec.ic_kb) p.ic_kb = *spec.ic_kb;
    if (spec.dc_kb) p.dc_kb = *spec.dc_kb;
    const SimResult r = run_benchmark(configure(cfg.system, p), bench_of(spec, cfg), *spec.seed, cfg.resources());
    SweepTable t;
    t.rows.push_back({p, r.resources, r});
    std::string text = render(t, spec.format);
    if (spec.format == Format::markdown) text += "\n" + core_stats_markdown(r);
    emit(spec, text, out);
    return kExitOk;
}

int do_sweep(const RunSpec& spec, std::ostream& out) {
    const RunConfig cfg = load(spec);
    const SweepTable t = sweep(cfg.sweep_space, cfg.system, bench_of(spec, cfg), *spec.seed, cfg.resources());
    emit(spec, render(t, spec.format), out);
    return kExitOk;
}

int do_fit(const RunSpec& spec, std::ostream& out) {
    const RunConfig cfg = spec.config_path.empty() ? RunConfig{} : load(spec);
    const DesignPoint p{*spec.cpus, *spec.ic_kb, *spec.dc_kb};
    const ResourceEstimate e = estimate(p, cfg.costs, cfg.budget);
    emit(spec,
         fmt::format("{}: M9K {}/{}, logic elements {}/{}, registers {}/{}: {}\n", p.label(), e.used.m9k,
                     cfg.budget.m9k_blocks, e.used.logic_elements, cfg.budget.logic_elements, e.used.registers,
                     cfg.budget.registers, e.fits ? "fits" : "does not fit"),
         out);
    return e.fits ? kExitOk : kExitFailure;
}

int do_calibrate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load(spec);
    CalibrationGrid grid = default_calibration_grid();
    if (spec.iterations) grid.iterations = *spec.iterations;
    const CalibrationResult r =
        calibrate_timing(reference_timing_anchors(), cfg.system, grid, *spec.seed, cfg.resources());
    cfg.system = apply(cfg.system, r.params);
    cfg.calibration_seed = *spec.seed;
    emit(spec, write_config(cfg), out);

    const std::string residuals = residuals_csv(r);
    if (spec.residuals_path.empty()) {
        err << residuals;
    } else {
        write_file(spec.residuals_path, residuals);
    }
    return kExitOk;
}

int do_gen_workload(const RunSpec& spec, std::ostream& out) {
    const RunConfig cfg = load(spec);
    const Trace t = synthesize(cfg.system.workload, spec.iterations.value_or(1), *spec.seed);
    emit(spec, to_text(t), out);
    if (!spec.write_config_path.empty()) write_file(spec.write_config_path, write_config(cfg));
    return kExitOk;
}

int do_dual_driver(const RunSpec& spec, std::ostream& out) {
    const RunConfig cfg = load(spec);
    DualDriverSettings s;
    s.seed = *spec.seed;
    if (spec.iterations) s.iterations = *spec.iterations;
    const DualDriverResult r = run_dual_driver(cfg.system, s);
    emit(spec, "iteration,poster_value,getter_value\n" + format_transcript(r.transcript), out);
    return kExitOk;
}

int do_report(const RunSpec& spec, std::ostream& out) {
    const RunConfig cfg = load(spec);
    const SweepTable t = sweep(cfg.sweep_space, cfg.system, bench_of(spec, cfg), *spec.seed, cfg.resources());
    std::string text;
    switch (spec.format) {
    case Format::csv:
        text = to_csv(t) + "\n" + reference_csv();
        break;
    case Format::markdown:
        text = "## Design space\n\n" + to_markdown(t) + "\n" + recommendation_text(recommend(t)) +
               "\n## Published processors (VAX MIPS)\n\n" + reference_markdown();
        break;
    case Format::plot_data:
        text = to_plot_data(t) + "\n" + reference_plot_data();
        break;
    }
    emit(spec, text, out);
    return kExitOk;
}

}  // namespace

ParseOutcome parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Multi-core soft-processor SoC simulator and design-space explorer", "socsim"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool needs_seed) {
        sub->add_option("--config", o.config, "config file (default: reference.cfg in $SOCSIM_CONFIG_DIR)");
        auto* seed = sub->add_option("--seed", o.seed, "workload seed");
        if (needs_seed) seed->required();
        sub->add_option("--output", o.output, "output file (default: stdout)");
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "csv | markdown | plot-data")
            ->check(CLI::IsMember({"csv", "markdown", "plot-data"}));
    };
    auto add_point = [&](CLI::App* sub, bool required) {
        auto* a = sub->add_option("--cpus", o.cpus, "number of CPUs")->check(CLI::Range(1u, 64u));
        auto* b = sub->add_option("--ic-kb", o.ic_kb, "instruction cache per core, KB");
        auto* c = sub->add_option("--dc-kb", o.dc_kb, "data cache per core, KB (0 = none)");
        if (required) {
            a->required();
            b->required();
            c->required();
        }
    };

    auto* simulate = app.add_subcommand("simulate", "run the benchmark on one design point");
    add_common(simulate, true);
    add_format(simulate);
    add_point(simulate, false);
    simulate->add_option("--iterations", o.iterations, "measured iterations per core")->check(CLI::PositiveNumber);
    simulate->add_flag("--allow-infeasible", o.allow_infeasible, "simulate even if the design does not fit");

    auto* sweep_cmd = app.add_subcommand("sweep", "simulate every fitting point of the configured space");
    add_common(sweep_cmd, true);
    add_format(sweep_cmd);
    sweep_cmd->add_option("--iterations", o.iterations, "measured iterations per core")->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "check a design point against the device budget (exit 0 fits, 1 not)");
    fit->add_option("--config", o.config, "config file with [budget] and [costs] (default: built-in)");
    fit->add_option("--output", o.output, "output file (default: stdout)");
    add_point(fit, true);

    auto* calibrate = app.add_subcommand("calibrate", "fit timing parameters to the anchor throughputs");
    add_common(calibrate, true);
    calibrate->add_option("--iterations", o.iterations, "iterations per calibration run")
        ->check(CLI::PositiveNumber);
    calibrate->add_option("--residuals", o.residuals, "residual CSV file (default: stderr)");

    auto* gen = app.add_subcommand("gen-workload", "write a synthesized trace as text");
    add_common(gen, true);
    gen->add_option("--iterations", o.iterations, "loop iterations to expand")->check(CLI::PositiveNumber);
    gen->add_option("--write-config", o.write_config, "also write the config used");

    auto* dual = app.add_subcommand("dual-driver", "run the two-CPU mailbox driver and print its transcript");
    add_common(dual, true);
    dual->add_option("--iterations", o.iterations, "driver loop iterations")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "sweep table, recommendation and published reference data");
    add_common(report, true);
    add_format(report);
    report->add_option("--iterations", o.iterations, "measured iterations per core")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg, err;
        const int code = app.exit(e, msg, err);
        ParseOutcome r;
        r.exit_code = code == 0 ? kExitOk : kExitUsage;
        r.message = msg.str() + err.str();
        return r;
    }

    RunSpec spec;
    const std::vector<std::pair<CLI::App*, Command>> commands{
        {simulate, Command::simulate}, {sweep_cmd, Command::sweep},  {fit, Command::fit},
        {calibrate, Command::calibrate}, {gen, Command::gen_workload}, {dual, Command::dual_driver},
        {report, Command::report}};
    CLI::App* used = nullptr;
    for (const auto& [sub, cmd] : commands) {
        if (sub->parsed()) {
            spec.command = cmd;
            used = sub;
        }
    }
    spec.config_path = o.config;
    if (used->get_option_no_throw("--seed") && used->count("--seed")) spec.seed = o.seed;
    spec.format = kFormats.at(o.format);
    spec.output_path = o.output;
    if (used->get_option_no_throw("--cpus") && used->count("--cpus")) spec.cpus = o.cpus;
    if (used->get_option_no_throw("--ic-kb") && used->count("--ic-kb")) spec.ic_kb = o.ic_kb;
    if (used->get_option_no_throw("--dc-kb") && used->count("--dc-kb")) spec.dc_kb = o.dc_kb;
    if (used->get_option_no_throw("--iterations") && used->count("--iterations")) spec.iterations = o.iterations;
    spec.allow_infeasible = o.allow_infeasible;
    spec.residuals_path = o.residuals;
    spec.write_config_path = o.write_config;
    return {spec, kExitOk, {}};
}

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        switch (spec.command) {
        case Command::simulate:
            return do_simulate(spec, out);
        case Command::sweep:
            return do_sweep(spec, out);
        case Command::fit:
            return do_fit(spec, out);
        case Command::calibrate:
            return do_calibrate(spec, out, err);
        case Command::gen_workload:
            return do_gen_workload(spec, out);
        case Command::dual_driver:
            return do_dual_driver(spec, out);
        case Command::report:
            return do_report(spec, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitIo;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const ParseOutcome p = parse_args(args);
    if (!p.spec) {
        (p.exit_code == kExitOk ? out : err) << p.message;
        return p.exit_code;
    }
    return execute(*p.spec, out, err);
}

}  // namespace socsim::cli
