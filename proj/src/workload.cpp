#include "socsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "socsim/errors.hpp"
#include "socsim/rng.hpp"

namespace socsim {

namespace {

constexpr double kMixSlack = 0.2;

template <std::size_t N>
double sum_of(const std::array<double, N>& mix) {
    return std::accumulate(mix.begin(), mix.end(), 0.0);
}

template <std::size_t N>
void check_mix(const std::array<double, N>& mix, std::string_view name) {
    for (double v : mix) {
        if (!(v >= 0.0)) throw ConfigError(fmt::format("{} mix has a negative share", name));
    }
    const double s = sum_of(mix);
    if (std::abs(s - 100.0) > kMixSlack + 1e-9) {
        throw ConfigError(fmt::format("{} mix sums to {:.2f}%, expected 100 +/- {}", name, s, kMixSlack));
    }
}

/// Largest-remainder apportionment of `total` items over percentage shares.
/// Ties go to the lower index.
template <std::size_t N>
std::array<std::uint32_t, N> apportion(const std::array<double, N>& shares, std::uint32_t total) {
    std::array<std::uint32_t, N> counts{};
    const double s = sum_of(shares);
    if (s <= 0.0 || total == 0) return counts;

    std::array<double, N> remainder{};
    std::uint32_t assigned = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double exact = shares[i] / s * total;
        counts[i] = static_cast<std::uint32_t>(std::floor(exact));
        remainder[i] = exact - counts[i];
        assigned += counts[i];
    }
    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % N, ++assigned) ++counts[order[k]];
    return counts;
}

template <std::size_t N, class E>
std::vector<E> expand(const std::array<std::uint32_t, N>& counts) {
    std::vector<E> out;
    for (std::size_t i = 0; i < N; ++i) out.insert(out.end(), counts[i], static_cast<E>(i));
    return out;
}

template <std::size_t N>
double max_deviation(const std::array<double, N>& measured, const std::array<double, N>& profile) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, std::abs(measured[i] - profile[i]));
    return worst;
}

template <std::size_t N>
std::array<double, N> to_percent(const std::array<std::uint64_t, N>& counts) {
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    std::array<double, N> pct{};
    if (total == 0) return pct;
    for (std::size_t i = 0; i < N; ++i) pct[i] = 100.0 * double(counts[i]) / double(total);
    return pct;
}

struct Slot {
    std::size_t statement = 0;
    bool dest = false;
    bool in_assignment = false;
};

class BodyBuilder {
public:
    BodyBuilder(const WorkloadProfile& profile, std::uint64_t seed)
        : profile_(profile), rng_(seed) {}

    std::vector<Statement> statements() {
        const auto counts = apportion(profile_.statement_mix, profile_.statements_per_iteration);
        auto kinds = expand<3, StatementClass>(counts);
        shuffle(std::span(kinds), rng_);

        std::vector<Statement> stmts(kinds.size());
        for (std::size_t i = 0; i < kinds.size(); ++i) stmts[i].kind = kinds[i];
        assign_operators(stmts);
        assign_operands(stmts);
        return stmts;
    }

    std::vector<AbstractInstruction> lower(const std::vector<Statement>& stmts) {
        std::vector<std::vector<AbstractInstruction>> blocks(1);
        const auto params = static_cast<std::uint32_t>(std::lround(profile_.avg_call_params));
        std::uint32_t call_index = 0;

        auto emit = [&](OpClass op, std::vector<DataRef> refs = {}) {
            blocks.back().push_back(AbstractInstruction{0, op, std::move(refs)});
        };

        for (const Statement& st : stmts) {
            switch (st.kind) {
            case StatementClass::assignment: {
                for (std::size_t i = 1; i < st.operands.size(); ++i) {
                    if (auto ref = operand_ref(st.operands[i], AccessKind::read)) {
                        emit(OpClass::load, {*ref});
                    }
                }
                emit(OpClass::alu);
                if (!st.operands.empty()) {
                    if (auto ref = operand_ref(st.operands.front(), AccessKind::write)) {
                        emit(OpClass::store, {*ref});
                    }
                }
                break;
            }
            case StatementClass::control:
                emit(OpClass::alu);
                emit(OpClass::branch);
                break;
            case StatementClass::call:
                for (std::uint32_t p = 0; p < params; ++p) {
                    const Address slot = (call_index * params + p) % (layout::kHotRegionBytes / 4);
                    emit(OpClass::store, {DataRef{hot_base() + 4 * slot, AccessKind::write}});
                }
                emit(OpClass::call_overhead);
                blocks.emplace_back();
                emit(OpClass::call_overhead);
                ++call_index;
                break;
            }
        }
        place_code(blocks);

        std::vector<AbstractInstruction> body;
        for (auto& b : blocks) std::move(b.begin(), b.end(), std::back_inserter(body));
        return body;
    }

private:
    static Address hot_base() { return layout::kStackTop - layout::kHotRegionBytes; }

    void assign_operators(std::vector<Statement>& stmts) {
        const auto counts = apportion(profile_.operator_mix, profile_.operators_per_iteration);
        std::vector<std::size_t> controls, assignments;
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            if (stmts[i].kind == StatementClass::control) controls.push_back(i);
            if (stmts[i].kind == StatementClass::assignment) assignments.push_back(i);
        }
        shuffle(std::span(controls), rng_);

        auto random_host = [&](const std::vector<std::size_t>& primary,
                               const std::vector<std::size_t>& fallback) -> std::size_t {
            const auto& pool = primary.empty() ? fallback : primary;
            if (pool.empty()) return stmts.size();
            return pool[uniform_below(rng_, pool.size())];
        };

        // Comparisons sit in conditions first; everything else in expressions.
        for (std::uint32_t k = 0; k < counts[1]; ++k) {
            const std::size_t host = k < controls.size() ? controls[k] : random_host(assignments, controls);
            if (host < stmts.size()) stmts[host].operators.push_back(OperatorClass::comparison);
        }
        for (auto op : {OperatorClass::arithmetic, OperatorClass::logic}) {
            for (std::uint32_t k = 0; k < counts[static_cast<std::size_t>(op)]; ++k) {
                const std::size_t host = random_host(assignments, controls);
                if (host < stmts.size()) stmts[host].operators.push_back(op);
            }
        }
    }

    void assign_operands(std::vector<Statement>& stmts) {
        const std::uint32_t total = profile_.operands_per_iteration;
        auto localities = expand<5, Locality>(apportion(profile_.locality_mix, total));
        auto types = expand<6, OperandType>(apportion(profile_.operand_type_mix, total));
        shuffle(std::span(localities), rng_);
        shuffle(std::span(types), rng_);

        const std::uint32_t params_total = static_cast<std::uint32_t>(
            std::count(localities.begin(), localities.end(), Locality::parameter));
        auto by_ref = static_cast<std::uint32_t>(std::lround(total * profile_.reference_parameter_percent / 100.0));
        by_ref = std::min(by_ref, params_total);

        std::vector<Operand> operands(total);
        std::uint32_t refs_marked = 0;
        for (std::uint32_t i = 0; i < total; ++i) {
            operands[i].locality = localities[i];
            operands[i].type = types[i];
            if (localities[i] == Locality::parameter && refs_marked < by_ref) {
                operands[i].by_reference = true;
                ++refs_marked;
            }
        }

        // Slots: destination per assignment, two per condition, call
        // parameters, and the remainder as assignment sources.
        std::vector<std::size_t> assignments, calls;
        std::size_t controls = 0;
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            if (stmts[i].kind == StatementClass::assignment) assignments.push_back(i);
            if (stmts[i].kind == StatementClass::call) calls.push_back(i);
            if (stmts[i].kind == StatementClass::control) ++controls;
        }
        std::vector<std::uint32_t> per_stmt(stmts.size(), 0);
        for (std::size_t a : assignments) per_stmt[a] = 1;
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            if (stmts[i].kind == StatementClass::control) per_stmt[i] = 2;
        }
        const auto call_params =
            static_cast<std::uint32_t>(std::lround(profile_.avg_call_params * calls.size()));
        distribute(per_stmt, calls, call_params);

        const std::uint64_t fixed = assignments.size() + 2 * controls + call_params;
        if (fixed > total) {
            throw ConfigError(fmt::format(
                "profile has {} operands per iteration but its statements need {}", total, fixed));
        }
        distribute(per_stmt, assignments, static_cast<std::uint32_t>(total - fixed));

        std::vector<Slot> slots;
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            const bool assign = stmts[i].kind == StatementClass::assignment;
            for (std::uint32_t k = 0; k < per_stmt[i]; ++k) slots.push_back({i, assign && k == 0, assign});
        }

        // Array and record operands are assignment operands; constants and
        // function results never appear as a destination.
        std::vector<int> owner(slots.size(), -1);
        std::vector<std::size_t> order(slots.size());
        std::iota(order.begin(), order.end(), 0);
        shuffle(std::span(order), rng_);

        auto place = [&](std::size_t operand, auto&& admissible) {
            for (std::size_t s : order) {
                if (owner[s] < 0 && admissible(slots[s])) {
                    owner[s] = static_cast<int>(operand);
                    return true;
                }
            }
            return false;
        };
        auto any = [](const Slot&) { return true; };
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < operands.size(); ++i) {
            const auto& op = operands[i];
            bool placed = false;
            if (op.type == OperandType::array || op.type == OperandType::record) {
                placed = place(i, [](const Slot& s) { return s.in_assignment; });
            } else if (op.locality == Locality::constant || op.locality == Locality::function_result) {
                placed = place(i, [](const Slot& s) { return !s.dest; });
            } else {
                rest.push_back(i);
                continue;
            }
            if (!placed) place(i, any);
        }
        for (std::size_t i : rest) place(i, any);

        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (owner[s] >= 0) stmts[slots[s].statement].operands.push_back(operands[owner[s]]);
        }
    }

    /// One item per target first, then the rest uniformly at random.
    void distribute(std::vector<std::uint32_t>& per_stmt, const std::vector<std::size_t>& targets,
                    std::uint32_t items) {
        if (targets.empty()) return;
        std::uint32_t k = 0;
        for (; k < items && k < targets.size(); ++k) ++per_stmt[targets[k]];
        for (; k < items; ++k) ++per_stmt[targets[uniform_below(rng_, targets.size())]];
    }

    std::optional<DataRef> operand_ref(const Operand& op, AccessKind kind) {
        if (!op.memory_resident()) return std::nullopt;
        if (op.type == OperandType::array) {
            const std::uint32_t span = profile_.working_set_bytes & ~3u;
            return DataRef{layout::kDataBase, kind, span, next_salt_++};
        }
        if (op.type == OperandType::record) {
            const auto rec = static_cast<Address>(uniform_below(rng_, 2));
            const auto field = static_cast<Address>(uniform_below(rng_, layout::kRecordBytes / 4));
            return DataRef{layout::kRecordBase + rec * layout::kRecordBytes + 4 * field, kind};
        }
        if (op.locality == Locality::global) {
            const auto var = static_cast<Address>(uniform_below(rng_, layout::kGlobalVariables));
            return DataRef{layout::kDataBase + 4 * var, kind};
        }
        const auto slot = static_cast<Address>(uniform_below(rng_, layout::kHotRegionBytes / 4));
        return DataRef{hot_base() + 4 * slot, kind};
    }

    void place_code(std::vector<std::vector<AbstractInstruction>>& blocks) {
        constexpr std::uint32_t kAlign = 32;
        const std::uint32_t footprint = profile_.code_footprint_bytes;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> used;  // [begin, end)

        auto free_at = [&](std::uint32_t begin, std::uint32_t end) {
            return std::none_of(used.begin(), used.end(),
                                [&](const auto& u) { return begin < u.second && u.first < end; });
        };

        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto bytes = static_cast<std::uint32_t>(4 * blocks[b].size());
            const std::uint32_t padded = (bytes + kAlign - 1) / kAlign * kAlign;
            if (padded > footprint) throw ConfigError("code footprint smaller than one code block");
            const std::uint32_t positions = (footprint - padded) / kAlign + 1;

            std::optional<std::uint32_t> start;
            if (b == 0) {
                start = 0;
            } else {
                for (int attempt = 0; attempt < 64 && !start; ++attempt) {
                    const auto pos = static_cast<std::uint32_t>(uniform_below(rng_, positions)) * kAlign;
                    if (free_at(pos, pos + padded)) start = pos;
                }
                for (std::uint32_t p = 0; p < positions && !start; ++p) {
                    if (free_at(p * kAlign, p * kAlign + padded)) start = p * kAlign;
                }
            }
            if (!start) {
                throw ConfigError(fmt::format("code does not fit a {} byte code footprint", footprint));
            }
            used.emplace_back(*start, *start + padded);
            for (std::size_t i = 0; i < blocks[b].size(); ++i) {
                blocks[b][i].fetch_address = layout::kCodeBase + *start + static_cast<Address>(4 * i);
            }
        }
    }

    const WorkloadProfile& profile_;
    Rng rng_;
    std::uint32_t next_salt_ = 1;
};

}  // namespace

void WorkloadProfile::validate() const {
    check_mix(statement_mix, "statement");
    check_mix(operator_mix, "operator");
    check_mix(operand_type_mix, "operand type");
    check_mix(locality_mix, "locality");
    if (reference_parameter_percent < 0.0 ||
        reference_parameter_percent > locality_mix[static_cast<std::size_t>(Locality::parameter)] + 1e-9) {
        throw ConfigError("reference parameters must be a subset of parameter operands");
    }
    if (avg_call_params < 0.0) throw ConfigError("average call parameter count is negative");
    if (statements_per_iteration == 0) throw ConfigError("a loop body needs at least one statement");
    if (working_set_bytes < 32) {
        throw ConfigError(fmt::format("working set of {} bytes is smaller than one cache line", working_set_bytes));
    }
    if (working_set_bytes > layout::kStackTop - layout::kHotRegionBytes - layout::kDataBase) {
        throw ConfigError("working set overlaps the stack region");
    }
    if (code_footprint_bytes == 0 || code_footprint_bytes > layout::kDataBase) {
        throw ConfigError("code footprint must be between 1 byte and the data base offset");
    }
}

WorkloadProfile default_profile() { return WorkloadProfile{}; }

std::string_view to_string(OpClass op) {
    switch (op) {
    case OpClass::alu: return "alu";
    case OpClass::load: return "load";
    case OpClass::store: return "store";
    case OpClass::branch: return "branch";
    case OpClass::call_overhead: return "call_overhead";
    }
    return "?";
}

std::optional<OpClass> parse_op_class(std::string_view text) {
    for (auto op : {OpClass::alu, OpClass::load, OpClass::store, OpClass::branch, OpClass::call_overhead}) {
        if (to_string(op) == text) return op;
    }
    return std::nullopt;
}

bool Operand::memory_resident() const {
    return locality == Locality::global || (locality == Locality::parameter && by_reference) ||
           type == OperandType::array || type == OperandType::record;
}

Trace::Trace(std::vector<AbstractInstruction> body, std::size_t iterations,
             std::vector<Statement> statements, std::uint64_t draw_seed)
    : body_(std::move(body)), iterations_(body_.empty() ? 0 : iterations),
      statements_(std::move(statements)), draw_seed_(draw_seed) {}

void Trace::materialize(std::size_t index, AbstractInstruction& out) const {
    const std::size_t n = body_.size();
    const std::size_t iteration = index / n;
    out = body_[index % n];
    for (DataRef& ref : out.data_refs) {
        if (ref.draw_span == 0) continue;
        const std::uint64_t h =
            splitmix64(draw_seed_ ^ (std::uint64_t(ref.draw_salt) << 40) ^ std::uint64_t(iteration));
        const std::uint32_t words = std::max<std::uint32_t>(ref.draw_span / 4, 1);
        ref.address += static_cast<Address>(4 * (h % words));
        ref.draw_span = 0;
        ref.draw_salt = 0;
    }
}

AbstractInstruction Trace::at(std::size_t index) const {
    AbstractInstruction out;
    materialize(index, out);
    return out;
}

Trace Trace::with_iterations(std::size_t iterations) const {
    Trace t = *this;
    t.iterations_ = body_.empty() ? 0 : iterations;
    return t;
}

Trace Trace::relocated(Address offset) const {
    Trace t = *this;
    for (auto& ins : t.body_) {
        ins.fetch_address += offset;
        for (auto& ref : ins.data_refs) ref.address += offset;
    }
    return t;
}

Trace synthesize(const WorkloadProfile& profile, std::size_t iterations, std::uint64_t seed,
                 Address base) {
    profile.validate();
    BodyBuilder builder(profile, seed);
    auto statements = builder.statements();
    auto body = builder.lower(statements);
    Trace trace(std::move(body), iterations, std::move(statements), splitmix64(seed));
    return base == 0 ? trace : trace.relocated(base);
}

std::array<double, 3> measured_statement_mix(const Trace& trace) {
    std::uint64_t alu = 0, branch = 0, call_overhead = 0;
    for (const auto& ins : trace.body()) {
        alu += ins.op == OpClass::alu;
        branch += ins.op == OpClass::branch;
        call_overhead += ins.op == OpClass::call_overhead;
    }
    const std::array<std::uint64_t, 3> counts{alu > branch ? alu - branch : 0, branch, call_overhead / 2};
    return to_percent(counts);
}

double MixDeviation::max() const {
    double m = statement;
    for (const auto& d : {operators, operand_type, locality}) {
        if (d) m = std::max(m, *d);
    }
    return m;
}

MixDeviation validate(const Trace& trace, const WorkloadProfile& profile) {
    if (trace.empty()) throw ContractViolation("cannot validate an empty trace");
    if (sum_of(profile.statement_mix) <= 0.0) {
        throw ContractViolation("profile has an empty statement mix");
    }

    MixDeviation dev;
    dev.statement = max_deviation(measured_statement_mix(trace), profile.statement_mix);

    if (trace.statements().empty()) return dev;
    std::array<std::uint64_t, 3> ops{};
    std::array<std::uint64_t, 6> types{};
    std::array<std::uint64_t, 5> locs{};
    for (const Statement& st : trace.statements()) {
        for (auto op : st.operators) ++ops[static_cast<std::size_t>(op)];
        for (const auto& operand : st.operands) {
            ++types[static_cast<std::size_t>(operand.type)];
            ++locs[static_cast<std::size_t>(operand.locality)];
        }
    }
    dev.operators = max_deviation(to_percent(ops), profile.operator_mix);
    dev.operand_type = max_deviation(to_percent(types), profile.operand_type_mix);
    dev.locality = max_deviation(to_percent(locs), profile.locality_mix);
    return dev;
}

std::string to_text(const Trace& trace) {
    std::string out;
    AbstractInstruction ins;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        trace.materialize(i, ins);
        out += fmt::format("0x{:08x} {}", ins.fetch_address, to_string(ins.op));
        for (const auto& ref : ins.data_refs) {
            out += fmt::format(" {} 0x{:08x}", ref.kind == AccessKind::read ? 'R' : 'W', ref.address);
        }
        out += '\n';
    }
    return out;
}

Trace parse_trace_text(std::string_view text) {
    std::vector<AbstractInstruction> body;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto parse_addr = [&](const std::string& tok) -> Address {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used, 0);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || v > 0xffffffffUL) {
            throw ConfigError(fmt::format("trace line {}: bad address '{}'", lineno, tok));
        }
        return static_cast<Address>(v);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string addr, op;
        if (!(fields >> addr)) continue;
        if (!(fields >> op)) throw ConfigError(fmt::format("trace line {}: missing op class", lineno));
        const auto cls = parse_op_class(op);
        if (!cls) throw ConfigError(fmt::format("trace line {}: unknown op class '{}'", lineno, op));
        AbstractInstruction ins{parse_addr(addr), *cls, {}};
        std::string rw, target;
        while (fields >> rw) {
            if ((rw != "R" && rw != "W") || !(fields >> target)) {
                throw ConfigError(fmt::format("trace line {}: malformed data reference", lineno));
            }
            ins.data_refs.push_back({parse_addr(target), rw == "R" ? AccessKind::read : AccessKind::write});
        }
        body.push_back(std::move(ins));
    }
    return Trace(std::move(body), 1);
}

}  // namespace socsim
