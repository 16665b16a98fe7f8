#include <gtest/gtest.h>

#include "socsim/errors.hpp"
#include "socsim/system.hpp"

using namespace socsim;

namespace {

SystemConfig two_cpus() {
    SystemConfig c;
    c.cpus = 2;
    return c;
}

}  // namespace

TEST(System, SingleCoreEngineMatchesRunTrace) {
    SystemConfig cfg;
    cfg.cpus = 1;
    cfg.dc.capacity_bytes = 4096;
    const MemoryMap map = cfg.memory_map();
    const Trace t = synthesize(cfg.workload, 5, 7, map.segment(0).base);

    const EngineResult run = run_programs(cfg, {{action::RunTrace{&t}}});

    Core core(0, cfg.core, cfg.ic, cfg.dc, map);
    Interconnect mem(cfg.latency, 1);
    const CoreStats direct = run_trace(core, t, mem);
    ASSERT_EQ(run.cores.size(), 1u);
    EXPECT_EQ(run.cores[0].stats, direct);
    EXPECT_EQ(run.interconnect.conflicts, 0u);
}

TEST(System, SnapshotRecordsCountersSoFar) {
    SystemConfig cfg;
    cfg.cpus = 1;
    const MemoryMap map = cfg.memory_map();
    const Trace t = synthesize(cfg.workload, 2, 7, map.segment(0).base);
    const EngineResult run = run_programs(cfg, {{action::RunTrace{&t}, action::Snapshot{}, action::RunTrace{&t}}});
    ASSERT_EQ(run.cores[0].snapshots.size(), 1u);
    EXPECT_EQ(run.cores[0].snapshots[0].instructions_retired, t.size());
    EXPECT_EQ(run.cores[0].stats.instructions_retired, 2 * t.size());
    EXPECT_LT(run.cores[0].snapshots[0].micro_cycles, run.cores[0].stats.micro_cycles);
}

TEST(System, TwoCoresContendOnMainMemory) {
    SystemConfig cfg = two_cpus();
    const MemoryMap map = cfg.memory_map();
    const Trace a = synthesize(cfg.workload, 2, 1, map.segment(0).base);
    const Trace b = synthesize(cfg.workload, 2, 1, map.segment(1).base);
    const EngineResult run = run_programs(cfg, {{action::RunTrace{&a}}, {action::RunTrace{&b}}});
    // Identical programs start in lockstep, so their first misses collide.
    EXPECT_GT(run.interconnect.conflicts, 0u);
    EXPECT_EQ(run.cores[0].stats.instructions_retired, run.cores[1].stats.instructions_retired);
}

TEST(DualDriver, DeterministicForSameSeed) {
    const SystemConfig cfg = two_cpus();
    const DualDriverSettings s{6, 5, 5, 3};
    const auto r1 = run_dual_driver(cfg, s);
    const auto r2 = run_dual_driver(cfg, s);
    EXPECT_EQ(r1.transcript, r2.transcript);
    EXPECT_EQ(format_transcript(r1.transcript), format_transcript(r2.transcript));
    EXPECT_EQ(r1.mailbox, r2.mailbox);
}

TEST(DualDriver, DeliveredValuesAreOrderedSubsequenceOfPosts) {
    SystemConfig cfg = two_cpus();
    for (std::uint32_t cap : {1u, 2u, 0u}) {
        cfg.mailbox.capacity = cap;
        for (auto [i1, i2] : {std::pair<std::size_t, std::size_t>{20, 1}, {1, 20}, {5, 5}}) {
            const auto r = run_dual_driver(cfg, {8, i1, i2, 2});
            std::vector<std::uint32_t> accepted;
            for (const auto& p : r.posts) {
                if (p.result == PostResult::ok) accepted.push_back(p.value);
            }
            std::vector<std::uint32_t> delivered;
            for (const auto& g : r.gets) {
                if (g.result.message) delivered.push_back(*g.result.message);
            }
            ASSERT_LE(delivered.size(), accepted.size());
            EXPECT_TRUE(std::equal(delivered.begin(), delivered.end(), accepted.begin()));
            EXPECT_EQ(r.mailbox.posts_accepted, r.mailbox.gets_successful + r.final_queue_length);
            EXPECT_EQ(r.mailbox.posts, r.mailbox.posts_accepted + r.mailbox.full_rejections);
            EXPECT_TRUE(mutually_exclusive(r.mutex_events));
        }
    }
}

TEST(DualDriver, FastPosterFillsSmallMailbox) {
    SystemConfig cfg = two_cpus();
    cfg.mailbox.capacity = 1;
    const auto r = run_dual_driver(cfg, {6, 20, 1, 1});
    EXPECT_GT(r.mailbox.full_rejections, 0u);
}

TEST(DualDriver, SlowPosterLeavesGetterEmpty) {
    const auto r = run_dual_driver(two_cpus(), {4, 1, 20, 1});
    ASSERT_FALSE(r.transcript.empty());
    EXPECT_FALSE(r.transcript[0].getter_value);
    EXPECT_GT(r.mailbox.empty_rejections, 0u);
}

TEST(DualDriver, RequiresTwoCpus) {
    SystemConfig cfg;
    cfg.cpus = 1;
    EXPECT_THROW(run_dual_driver(cfg, {}), ConfigError);
}

TEST(DualDriver, TranscriptFormat) {
    const std::vector<TranscriptRow> rows{{0, 35723, std::nullopt}, {1, 41752, 35723u}};
    EXPECT_EQ(format_transcript(rows), "0,35723,EMPTY\n1,41752,35723\n");
}
