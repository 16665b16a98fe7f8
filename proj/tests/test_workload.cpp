#include <gtest/gtest.h>

#include "socsim/errors.hpp"
#include "socsim/workload.hpp"

using namespace socsim;

namespace {

// Data-cache miss rate over the iterations after the first.
double steady_dc_miss_rate(const Trace& t, std::uint32_t dc_bytes) {
    CacheState dc({dc_bytes, 32, CacheKind::data});
    const std::size_t body = t.body().size();
    std::uint64_t misses = 0, accesses = 0;
    AbstractInstruction ins;
    for (std::size_t i = 0; i < t.size(); ++i) {
        t.materialize(i, ins);
        for (const auto& r : ins.data_refs) {
            const bool hit = dc.access(r.address, r.kind).hit;
            if (i >= body) {
                ++accesses;
                misses += !hit;
            }
        }
    }
    return accesses ? double(misses) / double(accesses) : 0.0;
}

}  // namespace

TEST(Workload, DefaultProfileValues) {
    const auto p = default_profile();
    EXPECT_EQ(p.statement_mix, (std::array<double, 3>{51.0, 32.4, 16.7}));
    EXPECT_EQ(p.operator_mix, (std::array<double, 3>{50.8, 42.8, 6.3}));
    EXPECT_EQ(p.operand_type_mix, (std::array<double, 6>{72.3, 18.6, 5.0, 2.5, 0.8, 0.8}));
    EXPECT_EQ(p.locality_mix, (std::array<double, 5>{47.1, 9.1, 18.6, 2.5, 22.7}));
    EXPECT_EQ(p.statements_per_iteration, 103u);
    EXPECT_EQ(p.operands_per_iteration, 242u);
    EXPECT_EQ(p.operators_per_iteration, 63u);
    EXPECT_NO_THROW(p.validate());
}

TEST(Workload, ZeroIterationsGivesEmptyTrace) {
    const Trace t = synthesize(default_profile(), 0, 1);
    EXPECT_TRUE(t.empty());
    EXPECT_EQ(t.size(), 0u);
}

TEST(Workload, SameSeedSameTrace) {
    EXPECT_EQ(synthesize(default_profile(), 3, 17), synthesize(default_profile(), 3, 17));
    EXPECT_NE(synthesize(default_profile(), 3, 17), synthesize(default_profile(), 3, 18));
}

TEST(Workload, StatementCountsFollowLargestRemainder) {
    // 103 statements at 51.0 / 32.4 / 16.7 percent: 52.53, 33.37, 17.20
    // floors to 52 + 33 + 17 and the spare statement goes to assignments.
    const Trace t = synthesize(default_profile(), 1, 5);
    std::array<int, 3> counts{};
    for (const auto& st : t.statements()) ++counts[static_cast<std::size_t>(st.kind)];
    EXPECT_EQ(counts, (std::array<int, 3>{53, 33, 17}));
}

TEST(Workload, MixesWithinTwoPointsForManySeeds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Trace t = synthesize(default_profile(), 1000, seed);
        const auto d = validate(t, default_profile());
        EXPECT_LE(d.statement, 2.0) << seed;
        ASSERT_TRUE(d.operators && d.operand_type && d.locality);
        EXPECT_LE(*d.operators, 2.0) << seed;
        EXPECT_LE(*d.operand_type, 2.0) << seed;
        EXPECT_LE(*d.locality, 2.0) << seed;
    }
}

TEST(Workload, AllAssignmentTraceDeviatesByControlAndCallShare) {
    std::vector<AbstractInstruction> body(50, AbstractInstruction{0, OpClass::alu, {}});
    const auto d = validate(Trace(body, 1), default_profile());
    EXPECT_NEAR(d.statement, 49.0, 1e-9);  // 100 - 51.0
    EXPECT_FALSE(d.operators);
}

TEST(Workload, ValidateRejectsEmptyInputs) {
    EXPECT_THROW(validate(Trace{}, default_profile()), ContractViolation);
    WorkloadProfile p = default_profile();
    p.statement_mix = {0, 0, 0};
    const Trace t(std::vector<AbstractInstruction>(4), 1);
    EXPECT_THROW(validate(t, p), ContractViolation);
}

TEST(Workload, WorkingSetSmallerThanLineIsConfigError) {
    WorkloadProfile p = default_profile();
    p.working_set_bytes = 16;
    EXPECT_THROW(synthesize(p, 1, 1), ConfigError);
}

TEST(Workload, BadMixIsConfigError) {
    WorkloadProfile p = default_profile();
    p.statement_mix = {60, 32.4, 16.7};
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Workload, LoadsAndStoresCarryReferences) {
    const Trace t = synthesize(default_profile(), 1, 3);
    for (const auto& ins : t.body()) {
        switch (ins.op) {
        case OpClass::load:
            ASSERT_FALSE(ins.data_refs.empty());
            for (const auto& r : ins.data_refs) EXPECT_EQ(r.kind, AccessKind::read);
            break;
        case OpClass::store:
            ASSERT_FALSE(ins.data_refs.empty());
            for (const auto& r : ins.data_refs) EXPECT_EQ(r.kind, AccessKind::write);
            break;
        case OpClass::alu:
        case OpClass::branch:
            EXPECT_TRUE(ins.data_refs.empty());
            break;
        default:
            break;
        }
    }
}

TEST(Workload, AddressesStayInsideLayout) {
    const auto p = default_profile();
    const Address base = 0x0010'0000;
    const Trace t = synthesize(p, 4, 8, base);
    AbstractInstruction ins;
    for (std::size_t i = 0; i < t.size(); ++i) {
        t.materialize(i, ins);
        EXPECT_GE(ins.fetch_address, base + layout::kCodeBase);
        EXPECT_LT(ins.fetch_address, base + layout::kCodeBase + p.code_footprint_bytes);
        for (const auto& r : ins.data_refs) {
            EXPECT_GE(r.address, base + layout::kDataBase);
            EXPECT_LT(r.address, base + layout::kStackTop);
        }
    }
}

TEST(Workload, TextRoundTrip) {
    const Trace t = synthesize(default_profile(), 2, 9);
    const std::string text = to_text(t);
    const Trace back = parse_trace_text(text);
    EXPECT_EQ(back.size(), t.size());
    EXPECT_EQ(to_text(back), text);
    EXPECT_THROW(parse_trace_text("0x10 jump\n"), ConfigError);
    EXPECT_THROW(parse_trace_text("zz alu\n"), ConfigError);
}

TEST(Workload, SmallWorkingSetBarelyUsesLargerDataCache) {
    for (std::uint32_t ws : {1024u, 2048u, 3072u, 4096u}) {
        WorkloadProfile p = default_profile();
        p.working_set_bytes = ws;
        const Trace t = synthesize(p, 50, 1);
        const double small = steady_dc_miss_rate(t, 4096);
        const double large = steady_dc_miss_rate(t, 32768);
        EXPECT_LT(small - large, 0.01) << ws;
        EXPECT_GE(small, large);
    }
}

TEST(Workload, CodeFitsLargestInstructionCache) {
    const Trace t = synthesize(default_profile(), 20, 2);
    CacheState ic({16384, 32, CacheKind::instruction});
    std::uint64_t late_misses = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const bool hit = ic.access(t.at(i).fetch_address, AccessKind::read).hit;
        if (i >= t.body().size()) late_misses += !hit;
    }
    EXPECT_EQ(late_misses, 0u);
}
