#include <gtest/gtest.h>

#include <random>

#include "pim/runtime/scheduler.hpp"

using namespace pim;
using namespace pim::rt;

namespace {

Step compute(std::uint64_t n) { return {n, std::nullopt}; }
Step dma_read(std::uint32_t size, std::uint64_t before = 0) { return {before, DmaEvent{DmaDirection::mram_to_wram, size}}; }
Step dma_write(std::uint32_t size, std::uint64_t before = 0) { return {before, DmaEvent{DmaDirection::wram_to_mram, size}}; }
Step sync(SyncKind k, std::uint32_t object = 0, std::uint64_t before = 0) { return {before, SyncEvent{k, object}}; }

std::uint64_t closed_form(const std::vector<std::uint64_t>& n, const DpuConfig& cfg) {
    return pipeline_cycles(std::span<const std::uint64_t>(n), cfg).cycles;
}

}  // namespace

TEST(Scheduler, TrivialKernelIsDrainOnly) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces(4, TaskletTrace{compute(0)});
    EXPECT_EQ(deterministic_schedule(traces, cfg).total_cycles, cfg.pipeline_depth);
}

TEST(Scheduler, PureComputeMatchesClosedForm) {
    const DpuConfig cfg;
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const unsigned t = 1 + static_cast<unsigned>(rng() % cfg.max_tasklets);
        std::vector<std::uint64_t> n(t);
        std::vector<TaskletTrace> traces(t);
        for (unsigned i = 0; i < t; ++i) {
            n[i] = rng() % 5000;
            traces[i] = {compute(n[i])};
        }
        const auto tl = deterministic_schedule(traces, cfg);
        const auto expect = closed_form(n, cfg);
        EXPECT_LE(std::llabs(static_cast<long long>(tl.total_cycles) - static_cast<long long>(expect)),
                  static_cast<long long>(cfg.pipeline_depth))
            << "trial " << trial;
    }
}

TEST(Scheduler, UnbalancedManyTasklets) {
    const DpuConfig cfg;
    std::vector<std::uint64_t> n(24, 500);
    n[0] = 1000;
    std::vector<TaskletTrace> traces;
    for (auto x : n) traces.push_back({compute(x)});
    EXPECT_EQ(deterministic_schedule(traces, cfg).total_cycles, closed_form(n, cfg));
}

TEST(Scheduler, MultiBurstComputeMatchesClosedForm) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces(6);
    std::vector<std::uint64_t> n(6, 0);
    for (unsigned i = 0; i < 6; ++i)
        for (unsigned k = 0; k < 3; ++k) {
            traces[i].push_back(sync(SyncKind::mutex_lock, i, 10 * (i + 1)));
            traces[i].push_back(sync(SyncKind::mutex_unlock, i, 5));
            n[i] += 10 * (i + 1) + 5;
        }
    EXPECT_EQ(deterministic_schedule(traces, cfg).total_cycles, closed_form(n, cfg));
}

TEST(Scheduler, PureDmaSingleTaskletSumsLatencies) {
    const DpuConfig cfg;
    std::mt19937_64 rng(5);
    TaskletTrace trace;
    std::uint64_t sum = 0;
    for (int k = 0; k < 50; ++k) {
        const auto size = static_cast<std::uint32_t>(8 * (1 + rng() % 256));
        const bool read = rng() % 2;
        trace.push_back(read ? dma_read(size) : dma_write(size));
        sum += dma_latency({read ? DmaDirection::mram_to_wram : DmaDirection::wram_to_mram, size, 0}, cfg);
    }
    const auto tl = deterministic_schedule({trace}, cfg);
    EXPECT_EQ(tl.total_cycles, sum + cfg.pipeline_depth);
    EXPECT_EQ(tl.dma_busy_cycles, sum);
}

TEST(Scheduler, DmaEngineSerializesTasklets) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces(8, TaskletTrace{dma_read(1024), dma_write(1024)});
    const auto tl = deterministic_schedule(traces, cfg);
    const std::uint64_t busy = 8 * (589 + 573);
    EXPECT_EQ(tl.dma_busy_cycles, busy);
    EXPECT_EQ(tl.total_cycles, busy + cfg.pipeline_depth);
}

TEST(Scheduler, QueuedFineGrainedRequestsOverlap) {
    DpuConfig cfg;
    cfg.fine_dma_overlap = 0.5;
    std::vector<TaskletTrace> traces(2, TaskletTrace{dma_read(8)});
    // First request starts on an idle engine, the second waits behind it.
    EXPECT_EQ(deterministic_schedule(traces, cfg).dma_busy_cycles, 81u + 43u);
}

TEST(Scheduler, DominantLatency) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces(16);
    for (auto& t : traces)
        for (int k = 0; k < 20; ++k) {
            t.push_back(dma_read(1024, 40));
            t.push_back(dma_write(1024, 300));
        }
    const auto tl = deterministic_schedule(traces, cfg);
    const double dominant = static_cast<double>(std::max(tl.pipeline_busy_cycles, tl.dma_busy_cycles));
    EXPECT_GE(static_cast<double>(tl.total_cycles), dominant);
    EXPECT_LE((static_cast<double>(tl.total_cycles) - dominant) / static_cast<double>(tl.total_cycles), 0.10);
}

TEST(Scheduler, BarrierReleasesAfterLastArrival) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces = {{sync(SyncKind::barrier, 0, 100)}, {sync(SyncKind::barrier, 0, 1000)}};
    const auto tl = deterministic_schedule(traces, cfg);
    const double cost = cfg.sync.barrier_base_cycles + 2 * cfg.sync.barrier_per_tasklet_cycles;
    EXPECT_EQ(tl.total_cycles, static_cast<std::uint64_t>(11000 + cost) + cfg.pipeline_depth);
    EXPECT_EQ(tl.sync_stall_cycles, static_cast<std::uint64_t>((11000 - 1100) + 2 * cost));
}

TEST(Scheduler, HandshakeTokenIsBuffered) {
    const DpuConfig cfg;
    // Tasklet 0 notifies early; tasklet 1 waits later and resumes after the handshake delay.
    std::vector<TaskletTrace> traces = {{sync(SyncKind::handshake_notify, 0, 10)},
                                        {sync(SyncKind::handshake_wait, 0, 100), compute(1)}};
    const auto tl = deterministic_schedule(traces, cfg);
    EXPECT_EQ(tl.total_cycles,
              static_cast<std::uint64_t>(1100 + cfg.sync.handshake_cycles) + 11 + cfg.pipeline_depth);
}

TEST(Scheduler, HandshakeWaiterFirst) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces = {{sync(SyncKind::handshake_notify, 0, 100)},
                                        {sync(SyncKind::handshake_wait, 0, 10)}};
    const auto tl = deterministic_schedule(traces, cfg);
    EXPECT_EQ(tl.total_cycles, static_cast<std::uint64_t>(1100 + cfg.sync.handshake_cycles) + cfg.pipeline_depth);
}

TEST(Scheduler, SecondNotifyBlocksUntilConsumed) {
    DpuConfig cfg;
    cfg.sync.handshake_cycles = 0;
    std::vector<TaskletTrace> traces = {
        {sync(SyncKind::handshake_notify, 0, 1), sync(SyncKind::handshake_notify, 0, 1), compute(1)},
        {sync(SyncKind::handshake_wait, 0, 500), sync(SyncKind::handshake_wait, 0, 1)}};
    const auto tl = deterministic_schedule(traces, cfg);
    // Tasklet 0 cannot pass its second notify before tasklet 1's first wait at cycle 5500.
    EXPECT_GE(tl.total_cycles, 5500u + 11u);
}

TEST(Scheduler, MutexSerializesCriticalSections) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces(
        4, TaskletTrace{sync(SyncKind::mutex_lock, 0, 0), sync(SyncKind::mutex_unlock, 0, 100)});
    const auto tl = deterministic_schedule(traces, cfg);
    EXPECT_EQ(tl.total_cycles, 4u * 1100u + cfg.pipeline_depth);
    EXPECT_GT(tl.spin_instructions, 0u);
}

TEST(Scheduler, SemaphoreOrdersGiveAndTake) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces = {{sync(SyncKind::sem_take, 3, 0), compute(10)},
                                        {sync(SyncKind::sem_give, 3, 200)}};
    const auto tl = deterministic_schedule(traces, cfg);
    EXPECT_EQ(tl.total_cycles,
              static_cast<std::uint64_t>(2200 + cfg.sync.semaphore_cycles) + 110 + cfg.pipeline_depth);
    ScheduleOptions opt;
    opt.semaphore_initial = {0, 0, 0, 1};
    const auto fast = deterministic_schedule({{sync(SyncKind::sem_take, 3, 0), compute(10)}}, cfg, opt);
    EXPECT_EQ(fast.total_cycles, static_cast<std::uint64_t>(cfg.sync.semaphore_cycles) + 110 + cfg.pipeline_depth);
}

TEST(Scheduler, DeadlockOnDoubleLock) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces = {{sync(SyncKind::mutex_lock), sync(SyncKind::mutex_lock)}};
    EXPECT_THROW(deterministic_schedule(traces, cfg), DeadlockError);
}

TEST(Scheduler, DeadlockOnUnmatchedLock) {
    const DpuConfig cfg;
    EXPECT_THROW(deterministic_schedule({{sync(SyncKind::mutex_lock)}}, cfg), DeadlockError);
    std::vector<TaskletTrace> traces = {{sync(SyncKind::mutex_lock, 0, 1), compute(1000)},
                                        {sync(SyncKind::mutex_lock, 0, 5), sync(SyncKind::mutex_unlock)}};
    EXPECT_THROW(deterministic_schedule(traces, cfg), DeadlockError);
}

TEST(Scheduler, DeadlockOnIncompleteBarrier) {
    const DpuConfig cfg;
    std::vector<TaskletTrace> traces = {{sync(SyncKind::barrier)}, {compute(3)}};
    EXPECT_THROW(deterministic_schedule(traces, cfg), DeadlockError);
}

TEST(Scheduler, UnlockWithoutOwnership) {
    const DpuConfig cfg;
    EXPECT_THROW(deterministic_schedule({{sync(SyncKind::mutex_unlock)}}, cfg), SyncError);
}

TEST(Scheduler, Deterministic) {
    const DpuConfig cfg;
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const unsigned t = 1 + rng() % 16;
        std::vector<TaskletTrace> traces(t);
        for (auto& tr : traces)
            for (int k = 0; k < 10; ++k) {
                const auto size = static_cast<std::uint32_t>(8 * (1 + rng() % 128));
                tr.push_back(rng() % 2 ? dma_read(size, rng() % 200) : dma_write(size, rng() % 200));
            }
        for (auto& tr : traces) tr.push_back(sync(SyncKind::barrier, 0, rng() % 50));
        const auto a = deterministic_schedule(traces, cfg);
        const auto b = deterministic_schedule(traces, cfg);
        EXPECT_EQ(a, b);
        EXPECT_GE(a.total_cycles, std::max(a.pipeline_busy_cycles, a.dma_busy_cycles));
    }
}

TEST(Scheduler, TimingDisabledStillEnforcesSync) {
    const DpuConfig cfg;
    ScheduleOptions opt;
    opt.timing = false;
    std::vector<TaskletTrace> traces = {{sync(SyncKind::barrier)}, {compute(3)}};
    EXPECT_THROW(deterministic_schedule(traces, cfg, opt), DeadlockError);
}

TEST(Scheduler, TraceDump) {
    std::ostringstream os;
    dump_trace(os, 2, {dma_read(64, 5), sync(SyncKind::barrier, 1), compute(7)});
    EXPECT_EQ(os.str(), "2 compute 5\n2 dma read 64\n2 sync barrier 1\n2 compute 7\n2 end\n");
}
