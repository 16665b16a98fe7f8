#include "socsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "socsim/errors.hpp"

namespace socsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    while (true) {
        const auto p = s.find(sep);
        parts.push_back(trim(s.substr(0, p)));
        if (p == std::string_view::npos) break;
        s.remove_prefix(p + 1);
    }
    return parts;
}

template <class T>
void decode_unsigned(std::string_view s, T& out) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
        throw ConfigError(fmt::format("expected a non-negative integer, got '{}'", s));
    }
    out = v;
}

void decode(std::string_view s, std::uint32_t& out) { decode_unsigned(s, out); }
void decode(std::string_view s, std::uint64_t& out) { decode_unsigned(s, out); }

void decode(std::string_view s, double& out) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
        throw ConfigError(fmt::format("expected a number, got '{}'", s));
    }
    out = v;
}

void decode(std::string_view s, bool& out) {
    if (s == "true") {
        out = true;
    } else if (s == "false") {
        out = false;
    } else {
        throw ConfigError(fmt::format("expected true or false, got '{}'", s));
    }
}

void decode(std::string_view s, std::string& out) {
    if (s.empty()) throw ConfigError("expected a non-empty string");
    out = std::string(s);
}

template <std::size_t N>
void decode(std::string_view s, std::array<double, N>& out) {
    const auto parts = split(s, ',');
    if (parts.size() != N) throw ConfigError(fmt::format("expected {} comma-separated numbers, got '{}'", N, s));
    for (std::size_t i = 0; i < N; ++i) decode(parts[i], out[i]);
}

std::string encode(std::uint32_t v) { return fmt::to_string(v); }
std::string encode(std::uint64_t v) { return fmt::to_string(v); }
std::string encode(double v) { return fmt::format("{}", v); }
std::string encode(bool v) { return v ? "true" : "false"; }
std::string encode(const std::string& v) { return v; }
template <std::size_t N>
std::string encode(const std::array<double, N>& v) {
    return fmt::format("{}", fmt::join(v, ", "));
}

struct Field {
    std::string section;
    std::string key;
    std::string doc;
    std::function<void(RunConfig&, std::string_view)> read;
    std::function<std::optional<std::string>(const RunConfig&)> write;
};

template <class Access>
Field field(std::string section, std::string key, std::string doc, Access access) {
    return {std::move(section), std::move(key), std::move(doc),
            [access](RunConfig& c, std::string_view v) { decode(v, access(c)); },
            [access](const RunConfig& c) -> std::optional<std::string> { return encode(access(c)); }};
}

template <class Access>
Field hex_field(std::string section, std::string key, std::string doc, Access access) {
    return {std::move(section), std::move(key), std::move(doc),
            [access](RunConfig& c, std::string_view v) { decode(v, access(c)); },
            [access](const RunConfig& c) -> std::optional<std::string> {
                return fmt::format("0x{:08x}", access(c));
            }};
}

#define SOCSIM_ACCESS(expr) [](auto& c) -> auto& { return expr; }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v;
        v.push_back(field("system", "cpus", "number of processor cores", SOCSIM_ACCESS(c.system.cpus)));

        v.push_back(field("core", "clock_hz", "core clock, Hz", SOCSIM_ACCESS(c.system.core.clock_hz)));
        v.push_back({"core", "base_cpi", "cycles per instruction with every access hitting (6 decimals)",
                     [](RunConfig& c, std::string_view s) {
                         double cpi = 0.0;
                         decode(s, cpi);
                         if (cpi <= 0.0) throw ConfigError("base_cpi must be positive");
                         c.system.core.base_cpi_micro = static_cast<std::uint64_t>(
                             std::llround(cpi * static_cast<double>(kMicroPerCycle)));
                     },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         const auto m = c.system.core.base_cpi_micro;
                         return fmt::format("{}.{:06}", m / kMicroPerCycle, m % kMicroPerCycle);
                     }});
        v.push_back(field("core", "pipeline_depth", "pipeline stages (informational)",
                          SOCSIM_ACCESS(c.system.core.pipeline_depth)));

        v.push_back(field("cache.ic", "size_bytes", "instruction cache capacity per core, bytes (0 = none)",
                          SOCSIM_ACCESS(c.system.ic.capacity_bytes)));
        v.push_back(field("cache.ic", "line_bytes", "instruction cache line, bytes",
                          SOCSIM_ACCESS(c.system.ic.line_bytes)));
        v.push_back(field("cache.dc", "size_bytes", "data cache capacity per core, bytes (0 = none)",
                          SOCSIM_ACCESS(c.system.dc.capacity_bytes)));
        v.push_back(field("cache.dc", "line_bytes", "data cache line, bytes", SOCSIM_ACCESS(c.system.dc.line_bytes)));

        v.push_back(hex_field("memory", "main_memory_base", "first main-memory address",
                              SOCSIM_ACCESS(c.system.memory.main_memory_base)));
        v.push_back(field("memory", "main_memory_size", "main memory, bytes",
                          SOCSIM_ACCESS(c.system.memory.main_memory_size)));
        v.push_back(hex_field("memory", "segment_bytes", "private segment per core, bytes",
                              SOCSIM_ACCESS(c.system.memory.segment_bytes)));
        v.push_back(hex_field("memory", "onchip_base", "first on-chip buffer address",
                              SOCSIM_ACCESS(c.system.memory.onchip_base)));
        v.push_back(field("memory", "onchip_size", "on-chip buffer, bytes", SOCSIM_ACCESS(c.system.memory.onchip_size)));
        v.push_back(field("memory", "main_memory_latency", "main-memory access, cycles",
                          SOCSIM_ACCESS(c.system.latency.main_memory_latency)));
        v.push_back(field("memory", "onchip_latency", "on-chip buffer access, cycles",
                          SOCSIM_ACCESS(c.system.latency.onchip_latency)));

        v.push_back(field("workload", "statement_mix", "assignment, control, call; percent",
                          SOCSIM_ACCESS(c.system.workload.statement_mix)));
        v.push_back(field("workload", "operator_mix", "arithmetic, comparison, logic; percent",
                          SOCSIM_ACCESS(c.system.workload.operator_mix)));
        v.push_back(field("workload", "operand_type_mix",
                          "integer, character, pointer, string, array, record; percent",
                          SOCSIM_ACCESS(c.system.workload.operand_type_mix)));
        v.push_back(field("workload", "locality_mix", "local, global, parameter, function result, constant; percent",
                          SOCSIM_ACCESS(c.system.workload.locality_mix)));
        v.push_back(field("workload", "reference_parameter_percent",
                          "operands that are by-reference parameters; percent of all operands",
                          SOCSIM_ACCESS(c.system.workload.reference_parameter_percent)));
        v.push_back(field("workload", "avg_call_params", "parameters per call",
                          SOCSIM_ACCESS(c.system.workload.avg_call_params)));
        v.push_back(field("workload", "statements_per_iteration", "statements in one loop body",
                          SOCSIM_ACCESS(c.system.workload.statements_per_iteration)));
        v.push_back(field("workload", "operands_per_iteration", "operands in one loop body",
                          SOCSIM_ACCESS(c.system.workload.operands_per_iteration)));
        v.push_back(field("workload", "operators_per_iteration", "operators in one loop body",
                          SOCSIM_ACCESS(c.system.workload.operators_per_iteration)));
        v.push_back(field("workload", "working_set_bytes", "span of array data touched, bytes",
                          SOCSIM_ACCESS(c.system.workload.working_set_bytes)));
        v.push_back(field("workload", "code_footprint_bytes", "span the code blocks are spread over, bytes",
                          SOCSIM_ACCESS(c.system.workload.code_footprint_bytes)));

        v.push_back(field("mailbox", "name", "mailbox device name", SOCSIM_ACCESS(c.system.mailbox.name)));
        v.push_back(field("mailbox", "capacity", "messages (0 = on-chip buffer bytes / 8)",
                          SOCSIM_ACCESS(c.system.mailbox.capacity)));

        v.push_back(field("budget", "logic_elements", "count", SOCSIM_ACCESS(c.budget.logic_elements)));
        v.push_back(field("budget", "registers", "count", SOCSIM_ACCESS(c.budget.registers)));
        v.push_back(field("budget", "labs", "logic array blocks", SOCSIM_ACCESS(c.budget.labs)));
        v.push_back(field("budget", "m9k_blocks", "9216-bit memory blocks", SOCSIM_ACCESS(c.budget.m9k_blocks)));
        v.push_back(field("budget", "block_memory_bits", "bits, must equal m9k_blocks * 9216",
                          SOCSIM_ACCESS(c.budget.block_memory_bits)));
        v.push_back(field("budget", "io_pins", "count", SOCSIM_ACCESS(c.budget.io_pins)));

        const std::string basis = "weights for fixed, per_cpu, per_ic_kb, per_dc_kb, per_dc_controller";
        v.push_back(field("costs", "m9k", "M9K blocks; " + basis, SOCSIM_ACCESS(c.costs.m9k.weights)));
        v.push_back(field("costs", "logic_elements", "logic elements; " + basis,
                          SOCSIM_ACCESS(c.costs.logic_elements.weights)));
        v.push_back(field("costs", "registers", "registers; " + basis, SOCSIM_ACCESS(c.costs.registers.weights)));

        v.push_back({"bench", "iterations", "measured benchmark iterations per core",
                     [](RunConfig& c, std::string_view s) {
                         std::uint64_t n = 0;
                         decode(s, n);
                         c.bench.iterations = n;
                     },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         return fmt::to_string(c.bench.iterations);
                     }});
        v.push_back({"bench", "warmup_iterations", "unmeasured iterations before the measured ones",
                     [](RunConfig& c, std::string_view s) {
                         std::uint64_t n = 0;
                         decode(s, n);
                         c.bench.warmup_iterations = n;
                     },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         return fmt::to_string(c.bench.warmup_iterations);
                     }});
        v.push_back(field("bench", "allow_infeasible", "simulate designs that do not fit the device",
                          SOCSIM_ACCESS(c.bench.allow_infeasible)));

        v.push_back({"sweep", "points", "design points as cpus:ic_kb:dc_kb, in report order",
                     [](RunConfig& c, std::string_view s) {
                         c.sweep_space.clear();
                         if (s.empty()) return;
                         for (auto item : split(s, ',')) {
                             const auto parts = split(item, ':');
                             if (parts.size() != 3) {
                                 throw ConfigError(fmt::format("expected cpus:ic_kb:dc_kb, got '{}'", item));
                             }
                             DesignPoint p;
                             decode(parts[0], p.cpus);
                             decode(parts[1], p.ic_kb);
                             decode(parts[2], p.dc_kb);
                             c.sweep_space.push_back(p);
                         }
                     },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         std::vector<std::string> items;
                         for (const auto& p : c.sweep_space) {
                             items.push_back(fmt::format("{}:{}:{}", p.cpus, p.ic_kb, p.dc_kb));
                         }
                         return fmt::format("{}", fmt::join(items, ", "));
                     }});

        v.push_back({"calibration", "seed", "workload seed the timing parameters were fitted with",
                     [](RunConfig& c, std::string_view s) {
                         std::uint64_t seed = 0;
                         decode(s, seed);
                         c.calibration_seed = seed;
                     },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         if (!c.calibration_seed) return std::nullopt;
                         return fmt::to_string(*c.calibration_seed);
                     }});
        return v;
    }();
    return f;
}

#undef SOCSIM_ACCESS

}  // namespace

RunConfig parse_config(std::string_view text) {
    std::map<std::pair<std::string, std::string>, const Field*> index;
    std::set<std::string> sections;
    for (const auto& f : fields()) {
        index[{f.section, f.key}] = &f;
        sections.insert(f.section);
    }

    RunConfig config;
    std::set<std::pair<std::string, std::string>> seen;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(fmt::format("malformed section header '{}'", line));
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (!sections.count(section)) throw ConfigError(fmt::format("unknown section [{}]", section));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError(fmt::format("expected key = value, got '{}'", line));
            const std::string key(trim(line.substr(0, eq)));
            if (section.empty()) throw ConfigError(fmt::format("key '{}' outside any section", key));
            const auto it = index.find({section, key});
            if (it == index.end()) throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
            if (!seen.insert({section, key}).second) {
                throw ConfigError(fmt::format("duplicate key '{}' in [{}]", key, section));
            }
            it->second->read(config, trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    config.system.validate();
    config.budget.validate();
    return config;
}

std::string write_config(const RunConfig& config) {
    std::string out = "# socsim configuration; the line above each key gives its meaning and unit\n\n";
    std::string section;
    for (const auto& f : fields()) {
        const auto value = f.write(config);
        if (!value) continue;
        if (f.section != section) {
            if (!section.empty()) out += '\n';
            section = f.section;
            out += fmt::format("[{}]\n", section);
        }
        out += fmt::format("# {}\n{} = {}\n", f.doc, f.key, *value);
    }
    return out;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write config '{}'", path.string()));
    out << write_config(config);
    if (!out) throw ConfigError(fmt::format("failed writing config '{}'", path.string()));
}

std::filesystem::path resolve_config_path(const std::string& arg, const std::filesystem::path& fallback_dir) {
    const char* env = std::getenv(kConfigDirEnv);
    const std::filesystem::path dir = env && *env ? std::filesystem::path(env) : fallback_dir;
    if (arg.empty()) return dir / "reference.cfg";
    const std::filesystem::path p(arg);
    if (p.is_relative() && !std::filesystem::exists(p)) return dir / p;
    return p;
}

}  // namespace socsim
