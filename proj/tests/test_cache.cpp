#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "socsim/cache.hpp"
#include "socsim/errors.hpp"

using namespace socsim;

namespace {

CacheState data_cache(std::uint32_t capacity, std::uint32_t line = 32) {
    return CacheState({capacity, line, CacheKind::data});
}

}  // namespace

TEST(Cache, ZeroCapacityAlwaysMisses) {
    auto c = data_cache(0);
    for (Address a : {0u, 0u, 4u, 0x1000u}) {
        const auto r = c.access(a, AccessKind::write);
        EXPECT_FALSE(r.hit);
        EXPECT_FALSE(r.writeback_required);
    }
    EXPECT_DOUBLE_EQ(c.stats().miss_rate(), 1.0);
    EXPECT_EQ(c.flush(), 0u);
}

TEST(Cache, ColdMissThenHit) {
    auto c = data_cache(8192);
    EXPECT_FALSE(c.access(0x1234, AccessKind::read).hit);
    EXPECT_TRUE(c.access(0x1234, AccessKind::read).hit);
    EXPECT_TRUE(c.access(0x1220, AccessKind::read).hit);  // same 32-byte line
}

TEST(Cache, ConflictOnSameIndex) {
    auto c = data_cache(2048);
    EXPECT_EQ(c.geometry().num_lines(), 64u);
    EXPECT_FALSE(c.access(0x0000, AccessKind::read).hit);
    EXPECT_FALSE(c.access(0x0800, AccessKind::read).hit);
    EXPECT_FALSE(c.access(0x0000, AccessKind::read).hit);
}

TEST(Cache, DirtyEvictionNeedsWriteback) {
    auto c = data_cache(2048);
    c.access(0x0000, AccessKind::write);
    const auto r = c.access(0x0800, AccessKind::read);
    EXPECT_FALSE(r.hit);
    EXPECT_TRUE(r.writeback_required);
    EXPECT_EQ(c.stats().writebacks, 1u);
    EXPECT_FALSE(c.access(0x1000, AccessKind::read).writeback_required);
}

TEST(Cache, WriteOnInstructionCacheIsContractViolation) {
    CacheState ic({8192, 32, CacheKind::instruction});
    EXPECT_THROW(ic.access(0, AccessKind::write), ContractViolation);
    EXPECT_FALSE(ic.access(0, AccessKind::read).hit);
}

TEST(Cache, FlushCountsDirtyLines) {
    auto fresh = data_cache(4096);
    EXPECT_EQ(fresh.flush(), 0u);

    auto one = data_cache(4096);
    one.access(0x40, AccessKind::write);
    EXPECT_EQ(one.flush(), 1u);
    EXPECT_FALSE(one.contains(0x40));
    EXPECT_EQ(one.flush(), 0u);
}

TEST(Cache, FlushMatchesShadowDirtyCount) {
    std::mt19937 rng(11);
    for (int t = 0; t < 50; ++t) {
        auto c = data_cache(2048);
        oracle::ShadowCache shadow(2048, 32);
        for (int i = 0; i < 500; ++i) {
            const Address a = rng() % 16384;
            const bool w = rng() % 3 == 0;
            c.access(a, w ? AccessKind::write : AccessKind::read);
            shadow.access(a, w);
        }
        EXPECT_EQ(c.dirty_lines(), shadow.dirty());
        EXPECT_EQ(c.flush(), shadow.dirty());
    }
}

TEST(Cache, GeometryValidation) {
    EXPECT_NO_THROW((CacheGeometry{0, 32}.validate()));
    EXPECT_NO_THROW((CacheGeometry{32768, 32}.validate()));
    EXPECT_THROW((CacheGeometry{3000, 32}.validate()), ConfigError);
    EXPECT_THROW((CacheGeometry{16, 32}.validate()), ConfigError);
    EXPECT_THROW((CacheGeometry{2048, 24}.validate()), ConfigError);
    EXPECT_THROW((CacheGeometry{2048, 0}.validate()), ConfigError);
}

TEST(Cache, MatchesShadowModelOnRandomTraces) {
    std::mt19937_64 rng(5);
    const std::uint32_t capacities[] = {0, 2048, 4096, 8192, 16384, 32768};
    const std::uint32_t lines[] = {16, 32, 64};
    for (int t = 0; t < 120; ++t) {
        const std::uint32_t cap = capacities[rng() % 6];
        const std::uint32_t line = lines[rng() % 3];
        auto c = data_cache(cap, line);
        oracle::ShadowCache shadow(cap, line);
        const std::uint32_t span = 1u << (10 + rng() % 8);
        for (int i = 0; i < 2000; ++i) {
            const Address a = static_cast<Address>(rng() % span);
            const bool w = rng() % 4 == 0;
            const auto got = c.access(a, w ? AccessKind::write : AccessKind::read);
            const auto want = shadow.access(a, w);
            ASSERT_EQ(got.hit, want.hit) << "trace " << t << " access " << i;
            ASSERT_EQ(got.writeback_required, want.writeback) << "trace " << t << " access " << i;
        }
        const auto& s = c.stats();
        EXPECT_EQ(s.hits + s.misses, s.accesses);
        EXPECT_LE(s.writebacks, s.misses);
    }
}
