#pragma once

#include <cstdint>
#include <vector>

namespace socsim {

using Address = std::uint32_t;

enum class CacheKind { instruction, data };
enum class AccessKind { read, write };

/// Direct-mapped cache shape. A capacity of zero models a core built without
/// the cache: every access misses and nothing is retained.
struct CacheGeometry {
    std::uint32_t capacity_bytes = 8192;
    std::uint32_t line_bytes = 32;
    CacheKind kind = CacheKind::data;

    /// Throws ConfigError unless capacity is 0 or a power of two >= line_bytes
    /// and line_bytes is a power of two.
    void validate() const;
    std::uint32_t num_lines() const { return line_bytes == 0 ? 0 : capacity_bytes / line_bytes; }

    bool operator==(const CacheGeometry&) const = default;
};

struct CacheStats {
    std::uint64_t accesses = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t writebacks = 0;

    double miss_rate() const { return accesses == 0 ? 0.0 : double(misses) / double(accesses); }
    bool operator==(const CacheStats&) const = default;
};

struct AccessResult {
    bool hit = false;
    bool writeback_required = false;

    bool operator==(const AccessResult&) const = default;
};

/// Tag store plus statistics for one core-side cache. Write-back and
/// write-allocate on data caches; instruction caches are read-only.
class CacheState {
public:
    explicit CacheState(CacheGeometry geometry);

    AccessResult access(Address address, AccessKind op);

    /// Invalidates every line and returns how many of them were dirty.
    std::uint64_t flush();

    const CacheGeometry& geometry() const { return geometry_; }
    const CacheStats& stats() const { return stats_; }
    std::uint64_t dirty_lines() const;
    bool contains(Address address) const;

private:
    struct Line {
        std::uint32_t tag = 0;
        bool valid = false;
        bool dirty = false;
    };

    CacheGeometry geometry_;
    std::uint32_t offset_bits_ = 0;
    std::uint32_t index_mask_ = 0;
    std::uint32_t index_bits_ = 0;
    std::vector<Line> lines_;
    CacheStats stats_;
};

}  // namespace socsim
