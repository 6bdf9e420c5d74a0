#include <gtest/gtest.h>

#include <random>

#include "pim/timing/host_link.hpp"

using namespace pim;

namespace {

constexpr std::uint64_t k32MiB = 32ull << 20;

double bandwidth_gbps(TransferMode mode, TransferDirection dir, unsigned dpus, std::uint64_t size) {
    const HostLinkConfig h;
    return transfer_time({mode, dir, std::vector<std::uint64_t>(dpus, size)}, h).bandwidth_bps / 1e9;
}

}  // namespace

TEST(HostLink, SingleDpuCalibration) {
    EXPECT_NEAR(bandwidth_gbps(TransferMode::parallel, TransferDirection::cpu_to_dpu, 1, k32MiB), 0.33, 1e-9);
    EXPECT_NEAR(bandwidth_gbps(TransferMode::parallel, TransferDirection::dpu_to_cpu, 1, k32MiB), 0.12, 1e-9);
}

TEST(HostLink, ParallelSixtyFourDpus) {
    const double in = bandwidth_gbps(TransferMode::parallel, TransferDirection::cpu_to_dpu, 64, k32MiB);
    const double out = bandwidth_gbps(TransferMode::parallel, TransferDirection::dpu_to_cpu, 64, k32MiB);
    EXPECT_NEAR(in / 0.33, 20.13, 1e-9);
    EXPECT_NEAR(out / 0.12, 38.76, 1e-9);
    EXPECT_NEAR(in, 6.68, 0.02 * 6.68);
    EXPECT_NEAR(out, 4.74, 0.02 * 4.74);
}

TEST(HostLink, Broadcast) {
    EXPECT_NEAR(bandwidth_gbps(TransferMode::broadcast, TransferDirection::cpu_to_dpu, 64, k32MiB), 16.88, 1e-6);
    const HostLinkConfig h;
    EXPECT_THROW(transfer_time({TransferMode::broadcast, TransferDirection::dpu_to_cpu, {8}}, h), TransferError);
}

TEST(HostLink, SerialIsFlat) {
    const double one = bandwidth_gbps(TransferMode::serial, TransferDirection::cpu_to_dpu, 1, k32MiB);
    for (unsigned n : {2u, 4u, 16u, 64u})
        EXPECT_NEAR(bandwidth_gbps(TransferMode::serial, TransferDirection::cpu_to_dpu, n, k32MiB), one, 1e-9);
}

TEST(HostLink, SmallTransfersShareSlope) {
    const HostLinkConfig h;
    const double in = single_dpu_bandwidth(TransferDirection::cpu_to_dpu, 8, h);
    const double out = single_dpu_bandwidth(TransferDirection::dpu_to_cpu, 8, h);
    EXPECT_NEAR(in / out, 1.0, 1e-3);
}

TEST(HostLink, ParallelNeedsEqualSizes) {
    const HostLinkConfig h;
    EXPECT_THROW(transfer_time({TransferMode::parallel, TransferDirection::cpu_to_dpu, {8, 16}}, h), TransferError);
    EXPECT_NO_THROW(transfer_time({TransferMode::serial, TransferDirection::cpu_to_dpu, {8, 16}}, h));
    EXPECT_NO_THROW(transfer_time({TransferMode::parallel, TransferDirection::cpu_to_dpu, {8, 0, 8}}, h));
}

TEST(HostLink, ZeroBytesZeroTime) {
    const HostLinkConfig h;
    EXPECT_EQ(transfer_time({TransferMode::parallel, TransferDirection::cpu_to_dpu, {0, 0}}, h).seconds, 0.0);
}

TEST(RankPartition, SequentialRanks) {
    SystemConfig sys;
    sys.n_ranks = 2;
    const TransferPlan one{TransferMode::parallel, TransferDirection::cpu_to_dpu, std::vector<std::uint64_t>(64, 1 << 20)};
    const TransferPlan two{TransferMode::parallel, TransferDirection::cpu_to_dpu, std::vector<std::uint64_t>(128, 1 << 20)};
    EXPECT_EQ(rank_partition(128, two, sys).size(), 2u);
    EXPECT_NEAR(system_transfer_time(two, sys).seconds, 2 * transfer_time(one, sys.host_link).seconds, 1e-12);
    EXPECT_NEAR(system_transfer_time(one, sys).seconds, transfer_time(one, sys.host_link).seconds, 1e-15);
    EXPECT_THROW(rank_partition(129, two, sys), TransferError);
}

TEST(HostLink, RankGroupSlowdown) {
    SystemConfig sys;
    sys.n_ranks = 2;
    sys.host_link.rank_group_slowdown = 1.5;
    const TransferPlan two{TransferMode::parallel, TransferDirection::cpu_to_dpu, std::vector<std::uint64_t>(128, 4096)};
    const TransferPlan one{TransferMode::parallel, TransferDirection::cpu_to_dpu, std::vector<std::uint64_t>(64, 4096)};
    EXPECT_NEAR(system_transfer_time(two, sys).seconds, 3 * transfer_time(one, sys.host_link).seconds, 1e-12);
}

TEST(HostLink, PropertiesOverRandomPlans) {
    const HostLinkConfig h;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto mode = static_cast<TransferMode>(rng() % 3);
        const auto dir = mode == TransferMode::broadcast ? TransferDirection::cpu_to_dpu
                                                         : static_cast<TransferDirection>(rng() % 2);
        const unsigned n = 1 + rng() % 64;
        const std::uint64_t size = 8 * (1 + rng() % (1 << 22));
        std::vector<std::uint64_t> sizes(n, size);
        if (mode == TransferMode::serial)
            for (auto& s : sizes) s = 8 * (1 + rng() % (1 << 20));
        const TransferCost c = transfer_time({mode, dir, sizes}, h);
        EXPECT_LE(c.bandwidth_bps, h.rank_peak_bandwidth_bps * (1 + 1e-12));
        // Growing any buffer (all of them in the equal-size modes) never makes the transfer faster.
        auto bigger = sizes;
        if (mode == TransferMode::serial) {
            bigger[rng() % n] += 8;
        } else {
            for (auto& s : bigger) s += 8;
        }
        EXPECT_GE(transfer_time({mode, dir, bigger}, h).seconds, c.seconds);
    }
}
