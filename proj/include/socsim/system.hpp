#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socsim/core.hpp"
#include "socsim/mailbox.hpp"
#include "socsim/memory.hpp"
#include "socsim/workload.hpp"

namespace socsim {

struct MemorySettings {
    Address main_memory_base = 0;
    std::uint64_t main_memory_size = 8u << 20;
    std::uint32_t segment_bytes = 1u << 20;
    Address onchip_base = 0x0400'0000;
    std::uint32_t onchip_size = 1024;

    bool operator==(const MemorySettings&) const = default;
};

struct MailboxSettings {
    std::string name{kDefaultMailboxName};
    /// 0 derives the capacity from the on-chip buffer size.
    std::uint32_t capacity = 0;

    bool operator==(const MailboxSettings&) const = default;
};

/// One design point: core count, cache geometries, timing, memory map and
/// the workload each core runs.
struct SystemConfig {
    std::uint32_t cpus = 2;
    CoreConfig core;
    CacheGeometry ic{8192, 32, CacheKind::instruction};
    CacheGeometry dc{8192, 32, CacheKind::data};
    MemorySettings memory;
    LatencyModel latency;
    WorkloadProfile workload;
    MailboxSettings mailbox;

    void validate() const;
    MemoryMap memory_map() const;
    std::size_t mailbox_capacity() const;

    bool operator==(const SystemConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Multi-core engine
// ---------------------------------------------------------------------------

namespace action {
struct RunTrace {
    const Trace* trace = nullptr;
};
struct Snapshot {};
struct Post {};
struct Get {};
}  // namespace action

using Action = std::variant<action::RunTrace, action::Snapshot, action::Post, action::Get>;

struct PostRecord {
    std::uint32_t value = 0;
    PostResult result = PostResult::ok;
    std::uint64_t cycle = 0;
};

struct GetRecord {
    GetResult result;
    std::uint64_t cycle = 0;
};

struct CoreOutcome {
    CoreStats stats;
    std::vector<CoreStats> snapshots;
    std::vector<std::uint32_t> run_results;  ///< Dhrystones/s of each RunTrace
    std::vector<PostRecord> posts;
    std::vector<GetRecord> gets;
};

struct EngineResult {
    std::vector<CoreOutcome> cores;
    InterconnectStats interconnect;
    std::optional<MailboxStats> mailbox;
    std::size_t mailbox_queue_length = 0;
    std::vector<MutexEvent> mutex_events;
};

/// Runs one program per core on a shared interconnect.
///
/// Cores advance independently until they need the fabric. The engine then
/// takes the earliest pending cycle, hands every memory request issued in
/// that cycle to the arbiter as one batch, and processes mailbox mutex
/// attempts for that cycle in core order. A mailbox call costs one on-chip
/// latency for the mutex acquire, one for the queue touch and one for the
/// release; a failed acquire costs one on-chip latency and is retried.
EngineResult run_programs(const SystemConfig& config, const std::vector<std::vector<Action>>& programs);

// ---------------------------------------------------------------------------
// Dual-CPU mailbox driver
// ---------------------------------------------------------------------------

struct DualDriverSettings {
    std::size_t iterations = 4;
    /// Benchmark loop iterations per dhrystone() call on CPU1 / CPU2.
    std::size_t cpu1_benchmark_iterations = 20;
    std::size_t cpu2_benchmark_iterations = 20;
    std::uint64_t seed = 1;
};

struct TranscriptRow {
    std::size_t iteration = 0;
    std::uint32_t poster_value = 0;
    std::optional<std::uint32_t> getter_value;

    bool operator==(const TranscriptRow&) const = default;
};

struct DualDriverResult {
    std::vector<TranscriptRow> transcript;
    std::vector<PostRecord> posts;
    std::vector<GetRecord> gets;
    MailboxStats mailbox;
    std::size_t final_queue_length = 0;
    std::vector<MutexEvent> mutex_events;
};

/// CPU2 loops {benchmark; post result}, CPU1 loops {benchmark; get}. Both
/// calls are non-blocking, so CPU1 may see an empty mailbox and CPU2 a full one.
DualDriverResult run_dual_driver(const SystemConfig& config, const DualDriverSettings& settings);

/// `iter,poster_value,getter_value_or_EMPTY` per row.
std::string format_transcript(const std::vector<TranscriptRow>& rows);

}  // namespace socsim
