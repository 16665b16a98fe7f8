#include "socsim/report.hpp"

#include <fmt/format.h>

namespace socsim {

namespace {

std::string kb(std::uint32_t v) { return v == 0 ? "0" : fmt::format("{} KB", v); }

std::string fmt_mhz(double v) { return fmt::format("{}", v); }

}  // namespace

std::string to_csv(const SweepTable& table) {
    std::string out = std::string(kSweepCsvHeader) + "\n";
    for (const auto& r : table.rows) {
        std::string dps, mips;
        if (r.result) {
            dps = fmt::to_string(round_dhrystones(r.result->dhrystones_per_sec));
            mips = format_vax_mips(r.result->dhrystones_per_sec);
        }
        out += fmt::format("{},{},{},{},{},{},{}\n", r.point.cpus, r.point.ic_kb, r.point.dc_kb, dps, mips,
                           r.resources.used.m9k, r.resources.fits ? "true" : "false");
    }
    return out;
}

std::string to_markdown(const SweepTable& table) {
    std::string out =
        "| Number of CPUs | IC Size | DC Size | Dhrystones/Second | VAX MIPS | M9K Used | Fits |\n"
        "|---:|---:|---:|---:|---:|---:|:---:|\n";
    for (const auto& r : table.rows) {
        std::string dps = "-", mips = "-";
        if (r.result) {
            dps = fmt::to_string(round_dhrystones(r.result->dhrystones_per_sec));
            mips = format_vax_mips(r.result->dhrystones_per_sec);
        }
        out += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", r.point.cpus, kb(r.point.ic_kb),
                           kb(r.point.dc_kb), dps, mips, r.resources.used.m9k, r.resources.fits ? "yes" : "no");
    }
    return out;
}

std::string to_plot_data(const SweepTable& table) {
    std::string out;
    for (const auto& r : table.rows) {
        if (!r.result) continue;
        out += fmt::format("{} {}\n", r.point.label(), round_dhrystones(r.result->dhrystones_per_sec));
    }
    return out;
}

std::string core_stats_markdown(const SimResult& result) {
    std::string out =
        "| Core | Instructions | Cycles | IC miss rate | DC miss rate | DC writebacks | Memory requests |\n"
        "|---:|---:|---:|---:|---:|---:|---:|\n";
    auto rate = [](std::uint64_t miss, std::uint64_t acc) {
        return acc == 0 ? std::string("-") : fmt::format("{:.4f}", double(miss) / double(acc));
    };
    for (std::size_t k = 0; k < result.per_core.size(); ++k) {
        const auto& s = result.per_core[k];
        out += fmt::format("| {} | {} | {:.0f} | {} | {} | {} | {} |\n", k, s.instructions_retired, s.cycles(),
                           rate(s.ic_misses, s.ic_accesses), rate(s.dc_misses, s.dc_accesses), s.dc_writebacks,
                           s.memory_requests);
    }
    return out;
}

std::string residuals_csv(const CalibrationResult& result) {
    std::string out = "n_cpus,ic_kb,dc_kb,anchor_dhrystones_per_sec,simulated_dhrystones_per_sec,relative_error\n";
    for (const auto& r : result.residuals) {
        const auto& p = r.anchor.point;
        out += fmt::format("{},{},{},{},{},{:.6f}\n", p.cpus, p.ic_kb, p.dc_kb,
                           round_dhrystones(r.anchor.dhrystones_per_sec), round_dhrystones(r.simulated),
                           r.relative_error);
    }
    return out;
}

std::string recommendation_text(const std::optional<Recommendation>& rec) {
    if (!rec) return "no configuration fits the device\n";
    return fmt::format("recommended: {} CPU, {} KB IC, {} KB DC ({})\n", rec->point.cpus, rec->point.ic_kb,
                       rec->point.dc_kb, rec->rationale);
}

std::vector<ReferenceCpu> reference_cpus_dhrystone11() {
    return {
        {"AMD 80386", 40, 4.32},  {"IBM 486D2", 50, 7.89},
        {"AMD 5X86", 133, 9.37},  {"IBM 486BL", 100, 12},
        {"80486 DX2", 66, 12},    {"Nios II Dual-Processor System", 66.5, 49.58},
        {"AMD K62", 500, 77.8},   {"AMD K63", 450, 76.3},
    };
}

std::vector<ReferenceCpu> reference_cpus_dhrystone21() {
    return {
        {"AMD 80386", 40, 4.53},  {"IBM 486D2", 50, 7.89},
        {"AMD 5X86", 133, 9.42},  {"IBM 486BL", 100, 11.8},
        {"80486 DX2", 66, 12.4},  {"Nios II Dual-Processor System", 66.5, 40.65},
        {"AMD K6", 200, 43.3},    {"IBM 6x86", 150, 43.9},
    };
}

std::string reference_markdown() {
    std::string out;
    auto table = [&](const char* version, const std::vector<ReferenceCpu>& rows) {
        out += fmt::format("| CPU | MHz | VAX MIPS {} |\n|:---|---:|---:|\n", version);
        for (const auto& r : rows) out += fmt::format("| {} | {} | {} |\n", r.name, fmt_mhz(r.mhz), r.vax_mips);
    };
    table("1.1", reference_cpus_dhrystone11());
    out += '\n';
    table("2.1", reference_cpus_dhrystone21());
    return out;
}

std::string reference_csv() {
    std::string out = "dhrystone_version,cpu,mhz,vax_mips\n";
    for (const auto& r : reference_cpus_dhrystone11()) out += fmt::format("1.1,{},{},{}\n", r.name, fmt_mhz(r.mhz), r.vax_mips);
    for (const auto& r : reference_cpus_dhrystone21()) out += fmt::format("2.1,{},{},{}\n", r.name, fmt_mhz(r.mhz), r.vax_mips);
    return out;
}

std::string reference_plot_data() {
    std::string out;
    auto label = [](const std::string& name) {
        std::string s = name;
        for (char& c : s) {
            if (c == ' ') c = '_';
        }
        return s;
    };
    for (const auto& r : reference_cpus_dhrystone11()) out += fmt::format("{}/1.1 {}\n", label(r.name), r.vax_mips);
    for (const auto& r : reference_cpus_dhrystone21()) out += fmt::format("{}/2.1 {}\n", label(r.name), r.vax_mips);
    return out;
}

}  // namespace socsim
