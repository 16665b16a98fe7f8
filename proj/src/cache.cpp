#include "socsim/cache.hpp"

#include <bit>

#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

void CacheGeometry::validate() const {
    if (line_bytes == 0 || !std::has_single_bit(line_bytes)) {
        throw ConfigError(fmt::format("cache line size {} is not a power of two", line_bytes));
    }
    if (capacity_bytes != 0 &&
        (!std::has_single_bit(capacity_bytes) || capacity_bytes < line_bytes)) {
        throw ConfigError(fmt::format(
            "cache capacity {} must be 0 or a power of two >= line size {}", capacity_bytes,
            line_bytes));
    }
}

CacheState::CacheState(CacheGeometry geometry) : geometry_(geometry) {
    geometry_.validate();
    offset_bits_ = std::countr_zero(geometry_.line_bytes);
    const std::uint32_t n = geometry_.num_lines();
    if (n > 0) {
        index_bits_ = std::countr_zero(n);
        index_mask_ = n - 1;
        lines_.resize(n);
    }
}

AccessResult CacheState::access(Address address, AccessKind op) {
    if (op == AccessKind::write && geometry_.kind == CacheKind::instruction) {
        throw ContractViolation(fmt::format("write to 0x{:08x} on an instruction cache", address));
    }
    ++stats_.accesses;
    if (lines_.empty()) {
        ++stats_.misses;
        return {};
    }

    const std::uint32_t block = address >> offset_bits_;
    Line& line = lines_[block & index_mask_];
    const std::uint32_t tag = block >> index_bits_;

    if (line.valid && line.tag == tag) {
        ++stats_.hits;
        if (op == AccessKind::write) line.dirty = true;
        return {.hit = true};
    }

    ++stats_.misses;
    AccessResult result;
    if (line.valid && line.dirty) {
        result.writeback_required = true;
        ++stats_.writebacks;
    }
    line = Line{.tag = tag, .valid = true, .dirty = op == AccessKind::write};
    return result;
}

std::uint64_t CacheState::flush() {
    std::uint64_t written = 0;
    for (Line& line : lines_) {
        if (line.valid && line.dirty) ++written;
        line = Line{};
    }
    stats_.writebacks += written;
    return written;
}

std::uint64_t CacheState::dirty_lines() const {
    std::uint64_t n = 0;
    for (const Line& line : lines_) n += (line.valid && line.dirty) ? 1 : 0;
    return n;
}

bool CacheState::contains(Address address) const {
    if (lines_.empty()) return false;
    const std::uint32_t block = address >> offset_bits_;
    const Line& line = lines_[block & index_mask_];
    return line.valid && line.tag == (block >> index_bits_);
}

}  // namespace socsim
