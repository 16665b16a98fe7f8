#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "socsim/cache.hpp"

namespace socsim {

using CoreId = std::uint32_t;

struct AddressRange {
    Address base = 0;
    std::uint32_t size = 0;

    bool contains(Address a) const { return a >= base && std::uint64_t(a) < std::uint64_t(base) + size; }
    std::uint64_t end() const { return std::uint64_t(base) + size; }
    bool overlaps(const AddressRange& o) const { return base < o.end() && o.base < end(); }
    bool operator==(const AddressRange&) const = default;
};

/// Where an address lives.
struct Region {
    enum class Kind { core_segment, onchip, fault };

    Kind kind = Kind::fault;
    CoreId segment = 0;  ///< only meaningful for core_segment

    static Region fault() { return {}; }
    static Region onchip() { return {Kind::onchip, 0}; }
    static Region core(CoreId k) { return {Kind::core_segment, k}; }
    bool operator==(const Region&) const = default;
};

/// Per-core segments of the shared main memory plus the on-chip buffer that
/// hosts the mailbox.
class MemoryMap {
public:
    MemoryMap() = default;
    MemoryMap(std::vector<AddressRange> segments, AddressRange onchip_buffer,
              std::uint64_t main_memory_size);

    /// Contiguous equal-size segments starting at `main_base`.
    static MemoryMap uniform(std::uint32_t cores, Address main_base, std::uint32_t segment_bytes,
                             AddressRange onchip_buffer, std::uint64_t main_memory_size);

    Region resolve(Address address) const;

    const std::vector<AddressRange>& segments() const { return segments_; }
    const AddressRange& segment(CoreId k) const { return segments_.at(k); }
    const AddressRange& onchip_buffer() const { return onchip_; }
    std::uint64_t main_memory_size() const { return main_memory_size_; }

    bool operator==(const MemoryMap&) const = default;

private:
    std::vector<AddressRange> segments_;
    AddressRange onchip_;
    std::uint64_t main_memory_size_ = 0;
};

/// Contention domains behind the fabric. All core segments share the one
/// physical main memory; the on-chip buffer is a separate slave.
enum class Domain : std::uint8_t { main_memory = 0, onchip = 1 };
inline constexpr std::size_t kDomainCount = 2;

struct LatencyModel {
    std::uint32_t main_memory_latency = 40;
    std::uint32_t onchip_latency = 1;

    void validate() const;
    std::uint32_t latency(Domain d) const {
        return d == Domain::main_memory ? main_memory_latency : onchip_latency;
    }
    bool operator==(const LatencyModel&) const = default;
};

struct MemRequest {
    CoreId core = 0;
    Domain domain = Domain::main_memory;
};

struct InterconnectStats {
    std::uint64_t requests = 0;
    std::uint64_t conflicts = 0;  ///< requests that waited behind another core
    std::uint64_t charged_cycles = 0;
};

/// Round-robin arbiter in front of each contention domain.
///
/// Requests issued in the same cycle to the same domain are granted one after
/// another; the k-th granted request completes after k * latency cycles.
/// Priority starts at the arbiter pointer and the pointer then moves to the
/// core after the first one granted, so the lead position rotates.
class Interconnect {
public:
    Interconnect(LatencyModel latency, std::uint32_t cores);

    /// Completion latency (cycles) for each request, in input order. At most
    /// one request per core.
    std::vector<std::uint32_t> service(std::span<const MemRequest> requests);

    std::uint32_t service_one(const MemRequest& request);

    const LatencyModel& latency() const { return latency_; }
    const InterconnectStats& stats() const { return stats_; }
    CoreId pointer(Domain d) const { return pointer_[static_cast<std::size_t>(d)]; }
    void set_pointer(Domain d, CoreId core) { pointer_[static_cast<std::size_t>(d)] = core % cores_; }
    std::uint32_t cores() const { return cores_; }

private:
    LatencyModel latency_;
    std::uint32_t cores_;
    std::array<CoreId, kDomainCount> pointer_{};
    InterconnectStats stats_;
};

}  // namespace socsim
