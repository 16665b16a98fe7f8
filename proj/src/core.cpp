#include "socsim/core.hpp"

#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

void CoreConfig::validate() const {
    if (clock_hz == 0) throw ConfigError("clock_hz must be positive");
    if (base_cpi_micro == 0) throw ConfigError("base_cpi must be at least one micro-cycle");
}

CoreStats operator-(const CoreStats& a, const CoreStats& b) {
    return CoreStats{
        .instructions_retired = a.instructions_retired - b.instructions_retired,
        .micro_cycles = a.micro_cycles - b.micro_cycles,
        .stall_cycles = a.stall_cycles - b.stall_cycles,
        .ic_accesses = a.ic_accesses - b.ic_accesses,
        .ic_misses = a.ic_misses - b.ic_misses,
        .dc_accesses = a.dc_accesses - b.dc_accesses,
        .dc_misses = a.dc_misses - b.dc_misses,
        .dc_writebacks = a.dc_writebacks - b.dc_writebacks,
        .onchip_accesses = a.onchip_accesses - b.onchip_accesses,
        .memory_requests = a.memory_requests - b.memory_requests,
    };
}

Core::Core(CoreId id, CoreConfig config, CacheGeometry ic, CacheGeometry dc, const MemoryMap& map)
    : id_(id), config_(config),
      ic_((ic.kind = CacheKind::instruction, ic)),
      dc_((dc.kind = CacheKind::data, dc)),
      map_(&map) {
    config_.validate();
    if (id_ >= map.segments().size()) {
        throw ConfigError(fmt::format("core {} has no memory segment", id_));
    }
}

void Core::begin(const AbstractInstruction& instr) {
    instr_ = &instr;
    phase_ = Phase::fetch;
    ref_index_ = 0;
}

std::optional<MemRequest> Core::advance() {
    while (true) {
        switch (phase_) {
        case Phase::idle:
        case Phase::done:
            return std::nullopt;

        case Phase::fetch: {
            phase_ = Phase::execute;
            const Region r = map_->resolve(instr_->fetch_address);
            if (r != Region::core(id_)) {
                throw SegmentationFault(fmt::format("core {} fetch from 0x{:08x} outside its segment",
                                                    id_, instr_->fetch_address));
            }
            ++stats_.ic_accesses;
            if (!ic_.access(instr_->fetch_address, AccessKind::read).hit) {
                ++stats_.ic_misses;
                ++stats_.memory_requests;
                return MemRequest{id_, Domain::main_memory};
            }
            break;
        }

        case Phase::execute:
            stats_.micro_cycles += config_.base_cpi_micro;
            phase_ = Phase::data;
            break;

        case Phase::writeback:
            phase_ = Phase::data;
            ++stats_.memory_requests;
            return MemRequest{id_, Domain::main_memory};

        case Phase::data: {
            if (ref_index_ >= instr_->data_refs.size()) {
                phase_ = Phase::done;
                ++stats_.instructions_retired;
                return std::nullopt;
            }
            const DataRef& ref = instr_->data_refs[ref_index_++];
            const Region r = map_->resolve(ref.address);
            if (r.kind == Region::Kind::onchip) {
                ++stats_.onchip_accesses;
                ++stats_.memory_requests;
                return MemRequest{id_, Domain::onchip};
            }
            if (r != Region::core(id_)) {
                throw SegmentationFault(fmt::format(
                    "core {} data reference to 0x{:08x} outside its segment and shared regions", id_,
                    ref.address));
            }
            ++stats_.dc_accesses;
            const AccessResult res = dc_.access(ref.address, ref.kind);
            if (!res.hit) {
                ++stats_.dc_misses;
                if (res.writeback_required) {
                    ++stats_.dc_writebacks;
                    phase_ = Phase::writeback;
                }
                ++stats_.memory_requests;
                return MemRequest{id_, Domain::main_memory};
            }
            break;
        }
        }
    }
}

void Core::complete(std::uint32_t latency_cycles) {
    stats_.micro_cycles += std::uint64_t(latency_cycles) * kMicroPerCycle;
    stats_.stall_cycles += latency_cycles;
}

void Core::idle(std::uint64_t cycles) { stats_.micro_cycles += cycles * kMicroPerCycle; }

std::uint64_t Core::step(const AbstractInstruction& instr, Interconnect& mem) {
    const std::uint64_t start = stats_.micro_cycles;
    begin(instr);
    while (auto req = advance()) complete(mem.service_one(*req));
    return stats_.micro_cycles - start;
}

CoreStats run_trace(Core& core, const Trace& trace, Interconnect& mem) {
    const CoreStats before = core.stats();
    AbstractInstruction ins;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        trace.materialize(i, ins);
        try {
            core.step(ins, mem);
        } catch (const SegmentationFault& e) {
            throw SegmentationFault(fmt::format("trace index {}: {}", i, e.what()));
        } catch (const ContractViolation& e) {
            throw ContractViolation(fmt::format("trace index {}: {}", i, e.what()));
        }
    }
    return core.stats() - before;
}

}  // namespace socsim
