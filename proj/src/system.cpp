#include "socsim/system.hpp"

#include <algorithm>
#include <limits>
#include <memory>

#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

void SystemConfig::validate() const {
    if (cpus == 0) throw ConfigError("a system needs at least one CPU");
    core.validate();
    ic.validate();
    dc.validate();
    if (ic.kind != CacheKind::instruction || dc.kind != CacheKind::data) {
        throw ConfigError("cache kinds are swapped");
    }
    latency.validate();
    workload.validate();
    if (memory.segment_bytes < layout::kSegmentBytesRequired) {
        throw ConfigError(fmt::format("segment of {} bytes cannot hold the workload layout ({} bytes)",
                                      memory.segment_bytes, layout::kSegmentBytesRequired));
    }
    (void)memory_map();
}

MemoryMap SystemConfig::memory_map() const {
    return MemoryMap::uniform(cpus, memory.main_memory_base, memory.segment_bytes,
                              {memory.onchip_base, memory.onchip_size}, memory.main_memory_size);
}

std::size_t SystemConfig::mailbox_capacity() const {
    return mailbox.capacity != 0 ? mailbox.capacity : mailbox_capacity_for(memory.onchip_size);
}

namespace {

enum class Wait { none, memory, acquire, release, finished };

struct CoreContext {
    CoreContext(CoreId id, const SystemConfig& cfg, const MemoryMap& map, const std::vector<Action>& p)
        : core(id, cfg.core, cfg.ic, cfg.dc, map), program(&p) {}

    Core core;
    const std::vector<Action>* program;
    std::size_t pc = 0;
    std::size_t index = 0;
    bool run_started = false;
    bool in_instruction = false;
    std::uint64_t run_start_micro = 0;
    AbstractInstruction scratch;

    Wait wait = Wait::none;
    MemRequest request;
    std::uint64_t event_cycle = 0;
    std::uint32_t last_result = 0;
    CoreOutcome out;
};

std::uint32_t dhrystones_per_second(std::size_t iterations, std::uint64_t clock_hz, std::uint64_t micro) {
    if (micro == 0) return 0;
    const long double v = static_cast<long double>(iterations) * clock_hz * kMicroPerCycle / micro;
    return static_cast<std::uint32_t>(std::min<long double>(v + 0.5L, std::numeric_limits<std::uint32_t>::max()));
}

}  // namespace

EngineResult run_programs(const SystemConfig& config, const std::vector<std::vector<Action>>& programs) {
    config.validate();
    if (programs.size() != config.cpus) {
        throw ContractViolation(fmt::format("{} programs for {} CPUs", programs.size(), config.cpus));
    }

    const MemoryMap map = config.memory_map();
    Interconnect fabric(config.latency, config.cpus);
    MailboxRegistry registry;
    registry.add(config.mailbox.name, config.mailbox_capacity());
    Mailbox* mailbox = nullptr;
    const std::uint32_t onchip = config.latency.onchip_latency;

    std::vector<std::unique_ptr<CoreContext>> ctx;
    for (CoreId k = 0; k < config.cpus; ++k) {
        ctx.push_back(std::make_unique<CoreContext>(k, config, map, programs[k]));
    }

    auto progress = [&](CoreContext& c) {
        while (c.wait == Wait::none) {
            if (c.pc >= c.program->size()) {
                c.wait = Wait::finished;
                return;
            }
            const Action& a = (*c.program)[c.pc];
            if (const auto* run = std::get_if<action::RunTrace>(&a)) {
                if (!c.run_started) {
                    c.run_started = true;
                    c.run_start_micro = c.core.now_micro();
                    c.index = 0;
                }
                if (!c.in_instruction) {
                    if (c.index >= run->trace->size()) {
                        c.last_result = dhrystones_per_second(run->trace->iterations(), config.core.clock_hz,
                                                              c.core.now_micro() - c.run_start_micro);
                        c.out.run_results.push_back(c.last_result);
                        c.run_started = false;
                        ++c.pc;
                        continue;
                    }
                    run->trace->materialize(c.index, c.scratch);
                    c.core.begin(c.scratch);
                    c.in_instruction = true;
                }
                std::optional<MemRequest> req;
                try {
                    req = c.core.advance();
                } catch (const SegmentationFault& e) {
                    throw SegmentationFault(fmt::format("trace index {}: {}", c.index, e.what()));
                }
                if (req) {
                    c.wait = Wait::memory;
                    c.request = *req;
                    c.event_cycle = c.core.now_cycle();
                    return;
                }
                c.in_instruction = false;
                ++c.index;
            } else if (std::holds_alternative<action::Snapshot>(a)) {
                c.out.snapshots.push_back(c.core.stats());
                ++c.pc;
            } else {
                if (!mailbox) mailbox = registry.open(config.mailbox.name);
                c.wait = Wait::acquire;
                c.event_cycle = c.core.now_cycle();
                return;
            }
        }
    };

    std::vector<MemRequest> batch;
    std::vector<CoreContext*> batch_owner;
    while (true) {
        for (auto& c : ctx) progress(*c);

        std::uint64_t t = std::numeric_limits<std::uint64_t>::max();
        for (auto& c : ctx) {
            if (c->wait != Wait::finished) t = std::min(t, c->event_cycle);
        }
        if (t == std::numeric_limits<std::uint64_t>::max()) break;

        batch.clear();
        batch_owner.clear();
        for (auto& c : ctx) {
            if (c->wait == Wait::memory && c->event_cycle == t) {
                batch.push_back(c->request);
                batch_owner.push_back(c.get());
            }
        }
        if (!batch.empty()) {
            const auto latencies = fabric.service(batch);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                batch_owner[i]->core.complete(latencies[i]);
                batch_owner[i]->wait = Wait::none;
            }
        }

        for (auto& cp : ctx) {
            CoreContext& c = *cp;
            if (c.event_cycle != t) continue;
            if (c.wait == Wait::acquire) {
                const bool is_post = std::holds_alternative<action::Post>((*c.program)[c.pc]);
                if (mailbox->try_acquire(c.core.id(), t)) {
                    c.core.idle(onchip);
                    if (is_post) {
                        const PostResult r = mailbox->enqueue(c.core.id(), c.last_result);
                        c.out.posts.push_back({c.last_result, r, t});
                    } else {
                        c.out.gets.push_back({mailbox->dequeue(c.core.id()), t});
                    }
                    c.core.idle(onchip);
                    c.wait = Wait::release;
                } else {
                    c.core.idle(onchip);
                }
                c.event_cycle = c.core.now_cycle();
            } else if (c.wait == Wait::release) {
                mailbox->release(c.core.id(), t);
                c.core.idle(onchip);
                c.wait = Wait::none;
                ++c.pc;
            }
        }
    }

    EngineResult result;
    for (auto& c : ctx) {
        c->out.stats = c->core.stats();
        result.cores.push_back(std::move(c->out));
    }
    result.interconnect = fabric.stats();
    if (mailbox) {
        result.mailbox = mailbox->stats();
        result.mutex_events = mailbox->mutex_events();
        result.mailbox_queue_length = mailbox->size();
    }
    return result;
}

DualDriverResult run_dual_driver(const SystemConfig& config, const DualDriverSettings& settings) {
    if (config.cpus != 2) {
        throw ConfigError(fmt::format("the dual driver needs exactly 2 CPUs, config has {}", config.cpus));
    }
    const MemoryMap map = config.memory_map();
    const Trace cpu1 = synthesize(config.workload, settings.cpu1_benchmark_iterations, settings.seed,
                                  map.segment(0).base);
    const Trace cpu2 = synthesize(config.workload, settings.cpu2_benchmark_iterations, settings.seed,
                                  map.segment(1).base);

    std::vector<std::vector<Action>> programs(2);
    for (std::size_t i = 0; i < settings.iterations; ++i) {
        programs[0].push_back(action::RunTrace{&cpu1});
        programs[0].push_back(action::Get{});
        programs[1].push_back(action::RunTrace{&cpu2});
        programs[1].push_back(action::Post{});
    }
    EngineResult run = run_programs(config, programs);

    DualDriverResult out;
    out.posts = run.cores[1].posts;
    out.gets = run.cores[0].gets;
    out.mailbox = run.mailbox.value_or(MailboxStats{});
    out.final_queue_length = run.mailbox_queue_length;
    out.mutex_events = run.mutex_events;
    for (std::size_t i = 0; i < settings.iterations; ++i) {
        out.transcript.push_back({i, out.posts.at(i).value, out.gets.at(i).result.message});
    }
    return out;
}

std::string format_transcript(const std::vector<TranscriptRow>& rows) {
    std::string text;
    for (const auto& r : rows) {
        text += fmt::format("{},{},{}\n", r.iteration, r.poster_value,
                            r.getter_value ? fmt::to_string(*r.getter_value) : std::string("EMPTY"));
    }
    return text;
}

}  // namespace socsim
