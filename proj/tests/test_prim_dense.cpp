#include <gtest/gtest.h>

#include "pim/prim/gemv.hpp"
#include "pim/prim/mlp.hpp"
#include "pim/prim/va.hpp"

using namespace pim;
using namespace pim::prim;

namespace {
BenchParams params(std::uint32_t dpus, unsigned tasklets, std::uint64_t seed = 1) {
    BenchParams p;
    p.dpus = dpus;
    p.tasklets = tasklets;
    p.seed = seed;
    return p;
}
}  // namespace

TEST(Va, SmallVector) {
    va::Input in{{1, 2, 3}, {4, 5, 6}};
    EXPECT_EQ(va::run(SystemConfig{}, params(1, 4), in).c, (std::vector<std::int32_t>{5, 7, 9}));
}

TEST(Va, ZeroLength) {
    va::Input in;
    const auto r = va::run(SystemConfig{}, params(2, 4), in);
    EXPECT_TRUE(r.c.empty());
}

TEST(Va, RandomMatchesOracleAcrossShapes) {
    const auto in = va::generate(65536 + 3, 9);
    const auto want = va::oracle(in);
    for (auto [d, t] : {std::pair{1u, 16u}, {3u, 11u}, {8u, 1u}, {5u, 20u}})
        EXPECT_EQ(va::run(SystemConfig{}, params(d, t), in).c, want) << d << " " << t;
    auto p = params(2, 24);
    EXPECT_THROW(va::run(SystemConfig{}, p, in), CapacityError);
    p.tile_bytes = 512;
    EXPECT_EQ(va::run(SystemConfig{}, p, in).c, want);
}

TEST(Va, WrapsAround) {
    va::Input in{{INT32_MAX, INT32_MIN}, {1, -1}};
    EXPECT_EQ(va::run(SystemConfig{}, params(1, 1), in).c, (std::vector<std::int32_t>{INT32_MIN, INT32_MAX}));
}

TEST(Gemv, IdentityAndSmall) {
    gemv::Input id{3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {7, 8, 9}};
    EXPECT_EQ(gemv::run(SystemConfig{}, params(2, 4), id).y, (std::vector<std::uint32_t>{7, 8, 9}));
    gemv::Input two{2, 2, {1, 2, 3, 4}, {1, 1}};
    EXPECT_EQ(gemv::run(SystemConfig{}, params(1, 16), two).y, (std::vector<std::uint32_t>{3, 7}));
}

TEST(Gemv, RandomMatchesOracle) {
    const auto in = gemv::generate(256, 64, 3);
    const auto want = gemv::oracle(in);
    for (auto [d, t] : {std::pair{1u, 16u}, {4u, 7u}, {64u, 16u}})
        EXPECT_EQ(gemv::run(SystemConfig{}, params(d, t), in).y, want) << d << " " << t;
    const auto odd = gemv::generate(37, 301, 4);
    EXPECT_EQ(gemv::run(SystemConfig{}, params(3, 5), odd).y, gemv::oracle(odd));
}

TEST(Mlp, IdentityPassesPositiveInput) {
    mlp::Input in;
    for (int l = 0; l < 3; ++l) in.layers.push_back({2, 2, {1, 0, 0, 1}});
    in.x = {5, 6};
    EXPECT_EQ(mlp::run(SystemConfig{}, params(1, 2), in).y, in.x);
}

TEST(Mlp, ReluZeroesNegative) {
    mlp::Input in;
    in.layers.push_back({2, 2, {0xFFFFFFFFu, 0, 0, 1}});
    in.x = {5, 6};
    EXPECT_EQ(mlp::run(SystemConfig{}, params(1, 2), in).y, (std::vector<std::uint32_t>{0, 6}));
}

TEST(Mlp, RandomThreeLayers) {
    const auto in = mlp::generate(128, 3, 5);
    const auto want = mlp::oracle(in);
    const auto r = mlp::run(SystemConfig{}, params(4, 16), in);
    EXPECT_EQ(r.y, want);
    EXPECT_EQ(r.stats.time.launches, 3u);
    EXPECT_GT(r.stats.time.inter_dpu_seconds, 0.0);
}
