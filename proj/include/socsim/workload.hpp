#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socsim/cache.hpp"

namespace socsim {

// ---------------------------------------------------------------------------
// Benchmark profile
// ---------------------------------------------------------------------------

enum class StatementClass : std::uint8_t { assignment, control, call };
enum class OperatorClass : std::uint8_t { arithmetic, comparison, logic };
enum class OperandType : std::uint8_t { integer, character, pointer, string, array, record };
enum class Locality : std::uint8_t { local, global, parameter, function_result, constant };

inline constexpr std::array<std::string_view, 3> kStatementNames{"assignment", "control", "call"};
inline constexpr std::array<std::string_view, 3> kOperatorNames{"arithmetic", "comparison", "logic"};
inline constexpr std::array<std::string_view, 6> kOperandTypeNames{
    "integer", "character", "pointer", "string", "array", "record"};
inline constexpr std::array<std::string_view, 5> kLocalityNames{
    "local", "global", "parameter", "function_result", "constant"};

/// Statistical shape of one benchmark loop body, in percent.
struct WorkloadProfile {
    std::array<double, 3> statement_mix{51.0, 32.4, 16.7};
    std::array<double, 3> operator_mix{50.8, 42.8, 6.3};
    std::array<double, 6> operand_type_mix{72.3, 18.6, 5.0, 2.5, 0.8, 0.8};
    std::array<double, 5> locality_mix{47.1, 9.1, 18.6, 2.5, 22.7};
    /// Share of all operands that are parameters passed by reference (a
    /// subset of the `parameter` locality).
    double reference_parameter_percent = 9.1;
    double avg_call_params = 1.82;
    std::uint32_t statements_per_iteration = 103;
    std::uint32_t operands_per_iteration = 242;
    std::uint32_t operators_per_iteration = 63;
    std::uint32_t working_set_bytes = 2048;
    std::uint32_t code_footprint_bytes = 12288;

    /// Each mix must sum to 100 within 0.2 percentage points.
    void validate() const;
    bool operator==(const WorkloadProfile&) const = default;
};

/// The benchmark's published statement, operator, operand and locality
/// distributions.
WorkloadProfile default_profile();

// ---------------------------------------------------------------------------
// Abstract instructions and traces
// ---------------------------------------------------------------------------

enum class OpClass : std::uint8_t { alu, load, store, branch, call_overhead };

std::string_view to_string(OpClass op);
std::optional<OpClass> parse_op_class(std::string_view text);

struct DataRef {
    Address address = 0;
    AccessKind kind = AccessKind::read;
    /// Non-zero for array element references: each iteration picks a word
    /// inside [address, address + draw_span).
    std::uint32_t draw_span = 0;
    std::uint32_t draw_salt = 0;

    bool operator==(const DataRef&) const = default;
};

struct AbstractInstruction {
    Address fetch_address = 0;
    OpClass op = OpClass::alu;
    std::vector<DataRef> data_refs;

    bool operator==(const AbstractInstruction&) const = default;
};

struct Operand {
    OperandType type = OperandType::integer;
    Locality locality = Locality::local;
    bool by_reference = false;

    /// Operands that live in memory rather than in a register.
    bool memory_resident() const;
    bool operator==(const Operand&) const = default;
};

struct Statement {
    StatementClass kind = StatementClass::assignment;
    std::vector<OperatorClass> operators;
    std::vector<Operand> operands;  ///< for assignments the first operand is the destination

    bool operator==(const Statement&) const = default;
};

/// A loop body replayed `iterations` times. Instruction `i` of the trace is
/// body instruction `i % body_size` in iteration `i / body_size`.
class Trace {
public:
    Trace() = default;
    Trace(std::vector<AbstractInstruction> body, std::size_t iterations,
          std::vector<Statement> statements = {}, std::uint64_t draw_seed = 0);

    std::size_t size() const { return body_.size() * iterations_; }
    bool empty() const { return size() == 0; }
    std::size_t iterations() const { return iterations_; }
    std::span<const AbstractInstruction> body() const { return body_; }
    std::span<const Statement> statements() const { return statements_; }
    std::uint64_t draw_seed() const { return draw_seed_; }

    /// Concrete instruction at trace position `index` (array draws resolved).
    AbstractInstruction at(std::size_t index) const;
    /// Same as at(), reusing `out`'s storage.
    void materialize(std::size_t index, AbstractInstruction& out) const;

    Trace with_iterations(std::size_t iterations) const;
    /// Shifts every fetch and data address by `offset`.
    Trace relocated(Address offset) const;

    bool operator==(const Trace&) const = default;

private:
    std::vector<AbstractInstruction> body_;
    std::size_t iterations_ = 0;
    std::vector<Statement> statements_;
    std::uint64_t draw_seed_ = 0;
};

/// Address layout of a synthesized workload, as offsets from the segment base.
namespace layout {
inline constexpr Address kCodeBase = 0x0000'0000;
inline constexpr Address kDataBase = 0x0004'0000;
inline constexpr Address kStackTop = 0x0008'0000;
inline constexpr std::uint32_t kHotRegionBytes = 256;
inline constexpr std::uint32_t kGlobalVariables = 12;
inline constexpr std::uint32_t kRecordBytes = 48;
inline constexpr Address kRecordBase = kDataBase + 0x40;
/// Smallest segment that holds a synthesized workload.
inline constexpr std::uint32_t kSegmentBytesRequired = kStackTop;
}  // namespace layout

/// Builds one loop body from `seed` and replays it `iterations` times.
/// Throws ConfigError when the working set is smaller than a cache line or
/// the code does not fit the code footprint.
Trace synthesize(const WorkloadProfile& profile, std::size_t iterations, std::uint64_t seed,
                 Address base = 0);

/// Per-mix maximum absolute deviation from the profile, in percentage points.
/// Mixes that need statement metadata are empty for hand-built traces.
struct MixDeviation {
    double statement = 0.0;
    std::optional<double> operators;
    std::optional<double> operand_type;
    std::optional<double> locality;

    double max() const;
};

/// Throws ContractViolation for an empty trace or a profile whose statement
/// mix is all zero.
MixDeviation validate(const Trace& trace, const WorkloadProfile& profile);

/// Measured statement mix (percent) recovered from the instruction stream:
/// one branch per control statement, two call_overhead instructions per call,
/// the remaining alu instructions are assignments.
std::array<double, 3> measured_statement_mix(const Trace& trace);

/// Line-per-instruction text: `fetch_addr op_class [R|W addr]*`.
std::string to_text(const Trace& trace);
/// Parses to_text() output into a flat single-iteration trace.
Trace parse_trace_text(std::string_view text);

}  // namespace socsim
