#include "socsim/memory.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

MemoryMap::MemoryMap(std::vector<AddressRange> segments, AddressRange onchip_buffer,
                     std::uint64_t main_memory_size)
    : segments_(std::move(segments)), onchip_(onchip_buffer), main_memory_size_(main_memory_size) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].size == 0) throw ConfigError(fmt::format("segment {} is empty", i));
        if (segments_[i].overlaps(onchip_)) {
            throw ConfigError(fmt::format("segment {} overlaps the on-chip buffer", i));
        }
        for (std::size_t j = i + 1; j < segments_.size(); ++j) {
            if (segments_[i].overlaps(segments_[j])) {
                throw ConfigError(fmt::format("segments {} and {} overlap", i, j));
            }
        }
    }
    std::uint64_t total = 0;
    for (const auto& s : segments_) total += s.size;
    if (total > main_memory_size_) {
        throw ConfigError(fmt::format("segments need {} bytes but main memory has {}", total,
                                      main_memory_size_));
    }
}

MemoryMap MemoryMap::uniform(std::uint32_t cores, Address main_base, std::uint32_t segment_bytes,
                             AddressRange onchip_buffer, std::uint64_t main_memory_size) {
    std::vector<AddressRange> segs;
    segs.reserve(cores);
    for (std::uint32_t k = 0; k < cores; ++k) {
        const std::uint64_t base = std::uint64_t(main_base) + std::uint64_t(k) * segment_bytes;
        if (base + segment_bytes > (std::uint64_t(1) << 32)) {
            throw ConfigError("segment layout exceeds the 32-bit address space");
        }
        segs.push_back({static_cast<Address>(base), segment_bytes});
    }
    return MemoryMap(std::move(segs), onchip_buffer, main_memory_size);
}

Region MemoryMap::resolve(Address address) const {
    if (onchip_.contains(address)) return Region::onchip();
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        if (segments_[k].contains(address)) return Region::core(static_cast<CoreId>(k));
    }
    return Region::fault();
}

void LatencyModel::validate() const {
    if (main_memory_latency < 1 || onchip_latency < 1) {
        throw ConfigError("memory latencies must be at least one cycle");
    }
}

Interconnect::Interconnect(LatencyModel latency, std::uint32_t cores)
    : latency_(latency), cores_(std::max<std::uint32_t>(cores, 1)) {
    latency_.validate();
}

std::vector<std::uint32_t> Interconnect::service(std::span<const MemRequest> requests) {
    std::vector<std::uint32_t> completion(requests.size(), 0);

    for (std::size_t d = 0; d < kDomainCount; ++d) {
        const auto domain = static_cast<Domain>(d);
        const CoreId ptr = pointer_[d];

        std::vector<std::size_t> queue;
        for (std::size_t i = 0; i < requests.size(); ++i) {
            if (requests[i].domain == domain) queue.push_back(i);
        }
        if (queue.empty()) continue;

        auto distance = [&](std::size_t i) { return (requests[i].core + cores_ - ptr) % cores_; };
        std::sort(queue.begin(), queue.end(),
                  [&](std::size_t a, std::size_t b) { return distance(a) < distance(b); });

        const std::uint32_t lat = latency_.latency(domain);
        for (std::size_t pos = 0; pos < queue.size(); ++pos) {
            completion[queue[pos]] = static_cast<std::uint32_t>(pos + 1) * lat;
            stats_.charged_cycles += completion[queue[pos]];
        }
        stats_.requests += queue.size();
        stats_.conflicts += queue.size() - 1;
        pointer_[d] = (requests[queue.front()].core + 1) % cores_;
    }
    return completion;
}

std::uint32_t Interconnect::service_one(const MemRequest& request) {
    return service(std::span<const MemRequest>(&request, 1)).front();
}

}  // namespace socsim
