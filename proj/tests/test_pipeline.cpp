#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pim/timing/pipeline.hpp"

using namespace pim;

namespace {

// Cycle-by-cycle revolver pipeline: each cycle the next tasklet in round-robin order whose
// previous instruction was dispatched at least `interval` cycles ago issues one instruction.
// Returns the cycle after the last dispatch.
std::uint64_t round_robin_dispatch_cycles(std::vector<std::uint64_t> left, unsigned interval) {
    const std::size_t n = left.size();
    std::vector<std::int64_t> last(n, -static_cast<std::int64_t>(interval));
    std::uint64_t remaining = 0;
    for (auto x : left) remaining += x;
    std::int64_t cycle = 0, end = 0;
    std::size_t rr = 0;
    while (remaining > 0) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = (rr + k) % n;
            if (left[i] > 0 && cycle - last[i] >= static_cast<std::int64_t>(interval)) {
                --left[i];
                --remaining;
                last[i] = cycle;
                end = cycle + 1;
                rr = i + 1;
                break;
            }
        }
        ++cycle;
    }
    return static_cast<std::uint64_t>(end);
}

std::uint64_t closed(std::vector<std::uint64_t> n, const DpuConfig& cfg) {
    return pipeline_cycles(std::span<const std::uint64_t>(n), cfg).cycles;
}

}  // namespace

TEST(PipelineCycles, Examples) {
    const DpuConfig cfg;
    EXPECT_EQ(closed({100}, cfg), 1114u);
    EXPECT_EQ(closed(std::vector<std::uint64_t>(16, 100), cfg), 1614u);
    EXPECT_EQ(closed(std::vector<std::uint64_t>(11, 0), cfg), 14u);
}

TEST(PipelineCycles, RoundRobinOracleAgreesOnExamples) {
    const DpuConfig cfg;
    for (const auto& mix : {std::vector<std::uint64_t>{100}, std::vector<std::uint64_t>(16, 100),
                            std::vector<std::uint64_t>(11, 0)}) {
        const auto oracle = round_robin_dispatch_cycles(mix, cfg.dispatch_interval) + cfg.pipeline_depth;
        EXPECT_LE(std::llabs(static_cast<long long>(oracle) - static_cast<long long>(closed(mix, cfg))),
                  static_cast<long long>(cfg.pipeline_depth));
    }
}

// Round robin is optimal whenever the dispatch bound or perfect balance holds.
TEST(PipelineCycles, RoundRobinOracleProperty) {
    const DpuConfig cfg;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const unsigned t = 1 + static_cast<unsigned>(rng() % cfg.max_tasklets);
        std::vector<std::uint64_t> mix(t);
        const bool balanced = t > cfg.dispatch_interval;
        const std::uint64_t common = rng() % 300;
        for (auto& x : mix) x = balanced ? common : rng() % 300;
        const auto oracle = round_robin_dispatch_cycles(mix, cfg.dispatch_interval) + cfg.pipeline_depth;
        const auto c = closed(mix, cfg);
        EXPECT_LE(std::llabs(static_cast<long long>(oracle) - static_cast<long long>(c)),
                  static_cast<long long>(cfg.pipeline_depth))
            << "tasklets " << t;
    }
}

TEST(PipelineCycles, ReportFields) {
    const DpuConfig cfg;
    std::vector<std::uint64_t> one{100};
    auto r = pipeline_cycles(std::span<const std::uint64_t>(one), cfg);
    EXPECT_EQ(r.limiting_factor, LimitingFactor::per_tasklet_dispatch);
    EXPECT_NEAR(r.issue_utilization, 100.0 / 1114.0, 1e-12);
    std::vector<std::uint64_t> many(16, 100);
    r = pipeline_cycles(std::span<const std::uint64_t>(many), cfg);
    EXPECT_EQ(r.limiting_factor, LimitingFactor::aggregate_issue);
    EXPECT_GE(r.cycles, r.instructions);
    EXPECT_LE(r.issue_utilization, 1.0);
}

TEST(PipelineCycles, Errors) {
    const DpuConfig cfg;
    std::vector<std::uint64_t> none;
    EXPECT_THROW(pipeline_cycles(std::span<const std::uint64_t>(none), cfg), std::invalid_argument);
    std::vector<std::uint64_t> too_many(25, 1);
    EXPECT_THROW(pipeline_cycles(std::span<const std::uint64_t>(too_many), cfg), CapacityError);
}

TEST(PipelineCycles, MixOverload) {
    const DpuConfig cfg;
    std::vector<InstructionMix> mixes(2);
    mixes[0].add(OpClass::add, DataType::int64, 10);
    mixes[1].add(OpClass::mul, DataType::int32, 1);
    EXPECT_EQ(pipeline_cycles(std::span<const InstructionMix>(mixes), cfg).cycles, 11u * 27u + 14u);
}

TEST(PipelineCycles, EightToSixteenSpeedup) {
    const DpuConfig cfg;
    const std::uint64_t work = 16 * 8 * 1000;
    const double c8 = static_cast<double>(closed(std::vector<std::uint64_t>(8, work / 8), cfg));
    const double c16 = static_cast<double>(closed(std::vector<std::uint64_t>(16, work / 16), cfg));
    EXPECT_NEAR(c8 / c16, 11.0 / 8.0, 0.02 * 11.0 / 8.0);
}

TEST(ArithmeticThroughput, PublishedPredictions) {
    const DpuConfig cfg;
    EXPECT_NEAR(arithmetic_throughput(OpClass::add, DataType::int32, 16, cfg) / 1e6, 58.33, 0.005);
    EXPECT_NEAR(arithmetic_throughput(OpClass::add, DataType::int64, 16, cfg) / 1e6, 50.0, 1e-9);
    EXPECT_NEAR(arithmetic_throughput(OpClass::mul, DataType::int32, 16, cfg) / 1e6, 10.94, 0.005);
    EXPECT_NEAR(arithmetic_throughput(OpClass::add, DataType::int32, 1, cfg) / 1e6, 58.33 / 11, 0.005);
}

TEST(ArithmeticThroughput, SaturatesAtDispatchInterval) {
    const DpuConfig cfg;
    for (OpClass op : kAllOpClasses)
        for (DataType dt : kAllDataTypes) {
            double prev = 0;
            for (unsigned t = 1; t <= cfg.max_tasklets; ++t) {
                const double x = arithmetic_throughput(op, dt, t, cfg);
                EXPECT_GE(x, prev);
                if (t >= 11) {
                    EXPECT_DOUBLE_EQ(x, arithmetic_throughput(op, dt, 11, cfg));
                }
                prev = x;
            }
        }
    EXPECT_THROW(arithmetic_throughput(OpClass::add, DataType::int32, 0, cfg), std::invalid_argument);
}
