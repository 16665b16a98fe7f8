#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "socsim/errors.hpp"
#include "socsim/memory.hpp"

using namespace socsim;

namespace {

MemoryMap two_core_map() { return MemoryMap::uniform(2, 0, 1u << 20, {0x0400'0000, 1024}, 8u << 20); }

}  // namespace

TEST(MemoryMap, ResolvesSegmentsOnchipAndFaults) {
    const auto m = two_core_map();
    EXPECT_EQ(m.resolve(m.segment(0).base), Region::core(0));
    EXPECT_EQ(m.resolve(m.segment(1).base), Region::core(1));
    EXPECT_EQ(m.resolve(m.segment(0).base + (1u << 20) - 1), Region::core(0));
    EXPECT_EQ(m.resolve(m.onchip_buffer().base), Region::onchip());
    EXPECT_EQ(m.resolve(0x0400'0000 + 1023), Region::onchip());
    EXPECT_EQ(m.resolve(0x0400'0000 + 1024), Region::fault());
    EXPECT_EQ(m.resolve(static_cast<Address>(m.segment(1).end())), Region::fault());
}

TEST(MemoryMap, RejectsOverlapAndOversize) {
    EXPECT_THROW(MemoryMap({{0, 100}, {50, 100}}, {0x1000, 16}, 1000), ConfigError);
    EXPECT_THROW(MemoryMap({{0, 100}}, {50, 16}, 1000), ConfigError);
    EXPECT_THROW(MemoryMap({{0, 100}, {100, 100}}, {0x1000, 16}, 150), ConfigError);
    EXPECT_NO_THROW(MemoryMap({{0, 100}, {100, 100}}, {0x1000, 16}, 200));
}

TEST(Interconnect, SingleRequestTakesLatency) {
    Interconnect ic({40, 1}, 2);
    EXPECT_EQ(ic.service_one({0, Domain::main_memory}), 40u);
    EXPECT_EQ(ic.service_one({1, Domain::onchip}), 1u);
}

TEST(Interconnect, SameCycleSameDomainSerializes) {
    Interconnect ic({40, 1}, 2);
    ASSERT_EQ(ic.pointer(Domain::main_memory), 0u);
    const std::vector<MemRequest> reqs{{0, Domain::main_memory}, {1, Domain::main_memory}};
    EXPECT_EQ(ic.service(reqs), (std::vector<std::uint32_t>{40, 80}));
    EXPECT_EQ(ic.stats().conflicts, 1u);
}

TEST(Interconnect, DifferentDomainsDoNotSerialize) {
    Interconnect ic({40, 1}, 2);
    const std::vector<MemRequest> reqs{{0, Domain::main_memory}, {1, Domain::onchip}};
    EXPECT_EQ(ic.service(reqs), (std::vector<std::uint32_t>{40, 1}));
}

TEST(Interconnect, HandSimulatedThreeCoreRoundRobin) {
    // Pointer 0, cores 2 and 1 request: core 1 is nearer the pointer, so it
    // goes first, and the pointer moves to core 2.
    Interconnect ic({10, 1}, 3);
    std::vector<MemRequest> reqs{{2, Domain::main_memory}, {1, Domain::main_memory}};
    EXPECT_EQ(ic.service(reqs), (std::vector<std::uint32_t>{20, 10}));
    EXPECT_EQ(ic.pointer(Domain::main_memory), 2u);

    reqs = {{0, Domain::main_memory}, {1, Domain::main_memory}, {2, Domain::main_memory}};
    EXPECT_EQ(ic.service(reqs), (std::vector<std::uint32_t>{20, 30, 10}));
    EXPECT_EQ(ic.pointer(Domain::main_memory), 0u);
}

TEST(Interconnect, FirstGrantRotatesUnderFullConflict) {
    for (std::uint32_t n : {2u, 3u, 5u}) {
        Interconnect ic({7, 1}, n);
        std::vector<MemRequest> reqs;
        for (CoreId k = 0; k < n; ++k) reqs.push_back({k, Domain::main_memory});
        std::vector<std::uint32_t> firsts(n, 0);
        for (std::uint32_t e = 0; e < 2 * n; ++e) {
            const auto lat = ic.service(reqs);
            const auto first = std::min_element(lat.begin(), lat.end()) - lat.begin();
            EXPECT_EQ(static_cast<std::uint32_t>(first), e % n);
            ++firsts[first];
        }
        for (auto f : firsts) EXPECT_EQ(f, 2u);
    }
}

TEST(Interconnect, ChargedCyclesEqualSumOfCompletions) {
    std::mt19937 rng(3);
    Interconnect ic({40, 2}, 4);
    std::uint64_t total = 0;
    for (int e = 0; e < 500; ++e) {
        std::vector<MemRequest> reqs;
        for (CoreId k = 0; k < 4; ++k) {
            if (rng() % 2) reqs.push_back({k, rng() % 3 ? Domain::main_memory : Domain::onchip});
        }
        const auto lat = ic.service(reqs);
        total = std::accumulate(lat.begin(), lat.end(), total);
    }
    EXPECT_EQ(ic.stats().charged_cycles, total);
}

TEST(Interconnect, LatencyMustBePositive) {
    EXPECT_THROW(Interconnect({0, 1}, 2), ConfigError);
    EXPECT_THROW(Interconnect({40, 0}, 2), ConfigError);
}
