#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "pim/runtime/host.hpp"
#include "pim/timing/microbench.hpp"

using namespace pim;
using namespace pim::rt;

namespace {

Task empty_kernel(Tasklet&) { co_return; }

struct CopyArgs {
    std::uint64_t bytes;
    std::uint32_t tile;
};

// COPY-DMA: tiles assigned cyclically, read then written back to a second array.
Task copy_dma(Tasklet& t) {
    const auto& a = t.args<CopyArgs>();
    auto buf = t.wram_alloc<std::byte>(a.tile);
    for (std::uint64_t off = t.id() * a.tile; off < a.bytes; off += t.count() * a.tile) {
        t.loop();
        co_await t.mram_read(off, buf.data(), a.tile);
        co_await t.mram_write(buf.data(), a.bytes + off, a.tile);
    }
}

Task add_one_helper(Tasklet& t, std::span<std::uint32_t> v) {
    for (auto& x : v) {
        t.wram_load();
        t.charge(OpClass::add, DataType::uint32);
        t.wram_store();
        ++x;
    }
    co_await t.barrier_wait();
}

Task nested(Tasklet& t) {
    auto buf = t.wram_alloc<std::uint32_t>(4);
    co_await t.mram_read(t.id() * 16, buf.data(), 16);
    co_await add_one_helper(t, buf);
    co_await t.mram_write(buf.data(), t.id() * 16, 16);
}

Dpu filled_dpu(const DpuConfig& cfg, std::uint64_t bytes) {
    Dpu d(cfg);
    std::vector<std::uint8_t> v(bytes);
    std::iota(v.begin(), v.end(), std::uint8_t{0});
    d.write<std::uint8_t>(0, v);
    return d;
}

}  // namespace

TEST(Runtime, TrivialKernelCostsDrainOnly) {
    DpuConfig cfg;
    Dpu d(cfg);
    const auto tl = d.launch(empty_kernel, 16);
    EXPECT_EQ(tl.total_cycles, cfg.pipeline_depth);
    EXPECT_EQ(tl.instructions, 0u);
}

TEST(Runtime, SingleReadCostsAffineLatency) {
    DpuConfig cfg;
    Dpu d(cfg);
    const auto tl = d.launch(
        [](Tasklet& t) -> Task {
            auto buf = t.wram_alloc<std::byte>(1024);
            co_await t.mram_read(0, buf.data(), 1024);
        },
        1);
    EXPECT_EQ(tl.dma_busy_cycles, 589u);
    EXPECT_EQ(tl.dma_requests, 1u);
    EXPECT_EQ(tl.total_cycles, 2 * cfg.dispatch_interval + 589 + cfg.pipeline_depth);
}

TEST(Runtime, CopyDmaSaturatesAtTwoTasklets) {
    DpuConfig cfg;
    const CopyArgs args{64 * 1024, 1024};
    std::uint64_t cycles[3];
    const unsigned ts[3] = {1, 2, 4};
    for (int i = 0; i < 3; ++i) {
        Dpu d = filled_dpu(cfg, args.bytes);
        d.set_args(args);
        cycles[i] = d.launch(copy_dma, ts[i]).total_cycles;
        EXPECT_EQ(d.read<std::uint8_t>(args.bytes, args.bytes), d.read<std::uint8_t>(0, args.bytes));
    }
    EXPECT_LT(cycles[1], cycles[0]);
    EXPECT_NEAR(static_cast<double>(cycles[2]) / cycles[1], 1.0, 0.03);
}

TEST(Runtime, DominantLatencyLaw) {
    DpuConfig cfg;
    const CopyArgs args{256 * 1024, 1024};
    for (unsigned t : {2u, 4u, 8u, 16u}) {
        Dpu d = filled_dpu(cfg, args.bytes);
        d.set_args(args);
        const auto tl = d.launch(copy_dma, t);
        const double dominant = static_cast<double>(std::max(tl.pipeline_busy_cycles, tl.dma_busy_cycles));
        EXPECT_LE(std::abs(tl.total_cycles - dominant) / tl.total_cycles, 0.10) << t;
        EXPECT_GE(tl.total_cycles, std::max(tl.pipeline_busy_cycles, tl.dma_busy_cycles));
    }
}

TEST(Runtime, NestedHelpersAndBarrier) {
    DpuConfig cfg;
    Dpu d(cfg);
    std::vector<std::uint32_t> v(32);
    std::iota(v.begin(), v.end(), 0u);
    d.write<std::uint32_t>(0, v);
    d.launch(nested, 8);
    const auto out = d.read<std::uint32_t>(0, 32);
    for (std::uint32_t i = 0; i < 32; ++i) EXPECT_EQ(out[i], i + 1);
}

TEST(Runtime, TimingSwitchDoesNotChangeOutputs) {
    DpuConfig cfg;
    std::vector<std::uint32_t> v(32, 7);
    Dpu a(cfg), b(cfg);
    a.write<std::uint32_t>(0, v);
    b.write<std::uint32_t>(0, v);
    const auto ta = a.launch(nested, 8, {.timing = true});
    const auto tb = b.launch(nested, 8, {.timing = false});
    EXPECT_EQ(a.read<std::uint32_t>(0, 32), b.read<std::uint32_t>(0, 32));
    EXPECT_GT(ta.total_cycles, tb.total_cycles);
    EXPECT_EQ(tb.total_cycles, tb.pipeline_busy_cycles);
}

TEST(Runtime, TraceReplayMatchesLaunch) {
    DpuConfig cfg;
    const CopyArgs args{32 * 1024, 512};
    Dpu d = filled_dpu(cfg, args.bytes);
    d.set_args(args);
    const auto tl = d.launch(copy_dma, 6, {.timing = true, .record_traces = true});
    EXPECT_EQ(deterministic_schedule(d.traces(), cfg), tl);
    std::ostringstream os;
    dump_trace(os, 0, d.traces()[0]);
    EXPECT_NE(os.str().find("0 dma read 512"), std::string::npos);
    EXPECT_NE(os.str().find("0 end"), std::string::npos);
}

TEST(Runtime, RepeatedLaunchesAreIdentical) {
    DpuConfig cfg;
    const CopyArgs args{32 * 1024, 256};
    Dpu d = filled_dpu(cfg, args.bytes);
    d.set_args(args);
    const auto first = d.launch(copy_dma, 11);
    EXPECT_EQ(d.launch(copy_dma, 11), first);
}

TEST(Runtime, CapacityAndAlignmentErrors) {
    DpuConfig cfg;
    Dpu d(cfg);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task {
                     t.wram_alloc<std::byte>(70000);
                     co_return;
                 }, 1),
                 CapacityError);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task {
                     auto b = t.wram_alloc<std::byte>(64);
                     co_await t.mram_read(4, b.data(), 16);
                 }, 1),
                 DmaError);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task {
                     auto b = t.wram_alloc<std::byte>(4096);
                     co_await t.mram_read(0, b.data(), 4096);
                 }, 1),
                 DmaError);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task {
                     auto b = t.wram_alloc<std::byte>(64);
                     co_await t.mram_write(b.data(), t.config().mram_bytes - 8, 16);
                 }, 1),
                 CapacityError);
    std::vector<std::byte> big(16);
    EXPECT_THROW(d.copy_to_mram(cfg.mram_bytes - 8, big), CapacityError);
    EXPECT_THROW(d.launch(empty_kernel, 25), CapacityError);
}

TEST(Runtime, UnmatchedLockDeadlocks) {
    DpuConfig cfg;
    Dpu d(cfg);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task { co_await t.mutex_lock(0); }, 2), DeadlockError);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task {
                     if (t.id() == 0) co_await t.barrier_wait();
                 }, 2),
                 DeadlockError);
}

TEST(Runtime, KernelExceptionsPropagate) {
    DpuConfig cfg;
    Dpu d(cfg);
    EXPECT_THROW(d.launch([](Tasklet& t) -> Task {
                     co_await t.barrier_wait();
                     if (t.id() == 3) throw std::runtime_error("boom");
                 }, 4),
                 std::runtime_error);
}

TEST(Runtime, SharedBuffersAreCommonToTasklets) {
    DpuConfig cfg;
    Dpu d(cfg);
    d.launch([](Tasklet& t) -> Task {
        auto s = t.shared<std::uint64_t>("acc", 16);
        s[t.id()] = t.id() + 1;
        co_await t.barrier_wait();
        if (t.id() == 0) {
            std::uint64_t sum = 0;
            for (unsigned i = 0; i < t.count(); ++i) sum += s[i];
            s[15] = sum;
            co_await t.mram_write(&s[8], 0, 64);
        }
    }, 8);
    EXPECT_EQ(d.read<std::uint64_t>(56, 1)[0], 36u);
}

TEST(Runtime, MutexSerializesCriticalSections) {
    DpuConfig cfg;
    Dpu d(cfg);
    d.launch([](Tasklet& t) -> Task {
        auto c = t.shared<std::uint64_t>("c", 1);
        for (int i = 0; i < 10; ++i) {
            co_await t.mutex_lock(1);
            const std::uint64_t v = c[0];
            t.charge(OpClass::add, DataType::int64);
            co_await t.barrier_wait(7);  // forces interleaving inside the section if the mutex failed
            c[0] = v + 1;
            co_await t.mutex_unlock(1);
        }
        co_await t.barrier_wait();
        if (t.id() == 0) co_await t.mram_write(c.data(), 0, 8);
    }, 1);
    EXPECT_EQ(d.read<std::uint64_t>(0, 1)[0], 10u);
}

TEST(Runtime, DpuSetPricesTransfersAndLaunches) {
    SystemConfig sys;
    DpuSet set(sys, 4);
    std::vector<std::vector<std::uint32_t>> in(4, std::vector<std::uint32_t>(1024, 3));
    set.push(Category::cpu_to_dpu, 0, in);
    EXPECT_GT(set.breakdown().cpu_to_dpu_seconds, 0.0);
    set.launch(empty_kernel, 4);
    EXPECT_EQ(set.breakdown().launches, 1u);
    EXPECT_EQ(set.breakdown().dpu_cycles, sys.dpu.pipeline_depth);
    const auto out = set.pull<std::uint32_t>(Category::dpu_to_cpu, 0, {1024, 1024, 1024, 1024});
    EXPECT_EQ(out, in);
    EXPECT_GT(set.breakdown().dpu_to_cpu_seconds, 0.0);
    set.host_compute(Category::inter_dpu, 1e9);
    EXPECT_DOUBLE_EQ(set.breakdown().inter_dpu_seconds, 1.0);
    const double before = set.breakdown().cpu_to_dpu_seconds;
    std::vector<std::uint32_t> b(512, 1);
    set.broadcast<std::uint32_t>(Category::cpu_to_dpu, 8192, b);
    EXPECT_GT(set.breakdown().cpu_to_dpu_seconds, before);
    EXPECT_EQ(set[3].read<std::uint32_t>(8192, 1)[0], 1u);
}

TEST(Runtime, DpuSetParallelLaunchIsDeterministic) {
    SystemConfig sys;
    const CopyArgs args{16 * 1024, 1024};
    auto run = [&](unsigned workers) {
        DpuSet set(sys, 8, workers);
        std::vector<std::vector<std::uint8_t>> in(8);
        for (int i = 0; i < 8; ++i) in[i].assign(args.bytes, static_cast<std::uint8_t>(i));
        set.push(Category::cpu_to_dpu, 0, in);
        for (unsigned i = 0; i < 8; ++i) set[i].set_args(args);
        set.launch(copy_dma, 1 + 0);
        return std::make_pair(set.last_launch(), set.pull<std::uint8_t>(Category::dpu_to_cpu, args.bytes,
                                                                          std::vector<std::size_t>(8, args.bytes)));
    };
    EXPECT_EQ(run(1), run(4));
}
