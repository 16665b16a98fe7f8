#pragma once

#include <cstdint>
#include <optional>

#include "socsim/cache.hpp"
#include "socsim/memory.hpp"
#include "socsim/workload.hpp"

namespace socsim {

/// One cycle expressed in the integer time unit used for all core timing.
inline constexpr std::uint64_t kMicroPerCycle = 1'000'000;

struct CoreConfig {
    std::uint64_t clock_hz = 66'500'000;
    /// Cycles per instruction with every access hitting, in micro-cycles.
    std::uint64_t base_cpi_micro = kMicroPerCycle;
    std::uint32_t pipeline_depth = 6;  // informational

    void validate() const;
    bool operator==(const CoreConfig&) const = default;
};

struct CoreStats {
    std::uint64_t instructions_retired = 0;
    std::uint64_t micro_cycles = 0;
    std::uint64_t stall_cycles = 0;
    std::uint64_t ic_accesses = 0;
    std::uint64_t ic_misses = 0;
    std::uint64_t dc_accesses = 0;
    std::uint64_t dc_misses = 0;
    std::uint64_t dc_writebacks = 0;
    std::uint64_t onchip_accesses = 0;
    std::uint64_t memory_requests = 0;

    double cycles() const { return double(micro_cycles) / double(kMicroPerCycle); }
    bool operator==(const CoreStats&) const = default;
};

CoreStats operator-(const CoreStats& a, const CoreStats& b);

/// Timing model of one soft core with private instruction and data caches.
///
/// An instruction fetches through the instruction cache, spends base_cpi
/// executing, then performs its data references in order. Every miss, dirty
/// eviction and on-chip access becomes one interconnect request and the core
/// stalls for the latency the interconnect reports. Data references outside
/// the core's own segment and the on-chip buffer raise SegmentationFault.
///
/// The incremental interface (begin/advance/complete) lets a multi-core
/// engine interleave several cores on one interconnect; step() drives the
/// same state machine against an interconnect serviced immediately.
class Core {
public:
    Core(CoreId id, CoreConfig config, CacheGeometry ic, CacheGeometry dc, const MemoryMap& map);

    /// Executes one instruction; returns micro-cycles consumed.
    std::uint64_t step(const AbstractInstruction& instr, Interconnect& mem);

    void begin(const AbstractInstruction& instr);
    /// Runs the current instruction until it needs the interconnect.
    /// Returns nullopt once the instruction has retired.
    std::optional<MemRequest> advance();
    void complete(std::uint32_t latency_cycles);

    /// Spends time without executing instructions (e.g. mailbox accesses).
    void idle(std::uint64_t cycles);

    CoreId id() const { return id_; }
    const CoreConfig& config() const { return config_; }
    std::uint64_t now_micro() const { return stats_.micro_cycles; }
    std::uint64_t now_cycle() const { return stats_.micro_cycles / kMicroPerCycle; }
    const CoreStats& stats() const { return stats_; }
    CacheState& icache() { return ic_; }
    CacheState& dcache() { return dc_; }
    const CacheState& icache() const { return ic_; }
    const CacheState& dcache() const { return dc_; }

private:
    enum class Phase { idle, fetch, execute, data, writeback, done };

    const AbstractInstruction* instr_ = nullptr;
    CoreId id_;
    CoreConfig config_;
    CacheState ic_;
    CacheState dc_;
    const MemoryMap* map_;
    Phase phase_ = Phase::idle;
    std::size_t ref_index_ = 0;
    CoreStats stats_;
};

/// Runs a whole trace on a single core. Errors carry the failing trace index.
CoreStats run_trace(Core& core, const Trace& trace, Interconnect& mem);

}  // namespace socsim
