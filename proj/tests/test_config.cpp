#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pim/core/config.hpp"

using namespace pim;

TEST(Config, EmptySourceGivesDefaults) {
    const SystemConfig c = load_config("");
    EXPECT_DOUBLE_EQ(c.dpu.frequency_hz, 350e6);
    EXPECT_EQ(c.dpu.pipeline_depth, 14u);
    EXPECT_EQ(c.dpu.dispatch_interval, 11u);
    EXPECT_EQ(c.dpu.max_tasklets, 24u);
    EXPECT_EQ(c.dpu.wram_bytes, 65536u);
    EXPECT_EQ(c.dpu.iram_capacity, 4096u);
    EXPECT_EQ(c.dpu.mram_bytes, 67108864u);
    EXPECT_DOUBLE_EQ(c.dpu.dma_alpha_read, 77);
    EXPECT_DOUBLE_EQ(c.dpu.dma_alpha_write, 61);
    EXPECT_DOUBLE_EQ(c.dpu.dma_beta, 0.5);
    EXPECT_EQ(c.dpu.dma_min_bytes, 8u);
    EXPECT_EQ(c.dpu.dma_max_bytes, 2048u);
    EXPECT_EQ(c.dpus_per_rank, 64u);
    EXPECT_EQ(c, SystemConfig{});
}

TEST(Config, SmallSystemPreset) {
    const SystemConfig c = load_config("preset = upmem-640\n");
    EXPECT_DOUBLE_EQ(c.dpu.frequency_hz, 267e6);
    EXPECT_EQ(c.total_dpus(), 640u);
}

TEST(Config, PresetThenOverride) {
    const SystemConfig c = load_config("dispatch_interval = 12\npreset = upmem-640\n");
    EXPECT_DOUBLE_EQ(c.dpu.frequency_hz, 267e6);
    EXPECT_EQ(c.dpu.dispatch_interval, 12u);
}

TEST(Config, CommentsAndBlankLines) {
    const SystemConfig c = load_config("# header\n\n  frequency_hz = 4e8   # faster\n");
    EXPECT_DOUBLE_EQ(c.dpu.frequency_hz, 4e8);
}

static std::string error_key(const std::string& src) {
    try {
        load_config(src);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

TEST(Config, ErrorsNameTheKey) {
    EXPECT_EQ(error_key("dispatch_interval = 20\npipeline_depth = 14\n"), "dispatch_interval");
    EXPECT_EQ(error_key("no_such_key = 1\n"), "no_such_key");
    EXPECT_EQ(error_key("fine_dma_overlap = 1.5\n"), "fine_dma_overlap");
    EXPECT_EQ(error_key("dma_min_bytes = 12\n"), "dma_min_bytes");
    EXPECT_EQ(error_key("dma_max_bytes = 4\n"), "dma_max_bytes");
    EXPECT_EQ(error_key("dma_alpha_read_cycles = -1\n"), "dma_alpha_read_cycles");
    EXPECT_EQ(error_key("frequency_hz = fast\n"), "frequency_hz");
    EXPECT_EQ(error_key("max_tasklets = 2.5\n"), "max_tasklets");
    EXPECT_EQ(error_key("n_ranks = 0\n"), "n_ranks");
    EXPECT_EQ(error_key("host_cpu_dpu_parallel_speedup = 1, 2\n"), "host_cpu_dpu_parallel_speedup");
    EXPECT_EQ(error_key("host_dpu_cpu_max_bandwidth_bps = 1e12\n"), "host_dpu_cpu_max_bandwidth_bps");
    EXPECT_EQ(error_key("preset = bogus\n"), "preset");
}

TEST(Config, FixedCostEntriesAreNotKeys) {
    EXPECT_EQ(error_key("cost_add_int32 = 3\n"), "cost_add_int32");
    EXPECT_EQ(error_key("cost_wram_load_int64 = 3\n"), "cost_wram_load_int64");
    EXPECT_EQ(load_config("cost_mul_int64 = 100\n").dpu.costs(OpClass::mul, DataType::int64), 100u);
}

TEST(Config, RoundTripDefaults) {
    const SystemConfig c;
    EXPECT_EQ(load_config(serialize(c)), c);
}

TEST(Config, RoundTripRandomized) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        std::string src;
        src += "frequency_hz = " + detail::format_double(1e8 + u(rng) * 5e8) + "\n";
        src += "dma_alpha_read_cycles = " + detail::format_double(u(rng) * 200) + "\n";
        src += "dma_beta_cycles_per_byte = " + detail::format_double(u(rng)) + "\n";
        src += "fine_dma_overlap = " + detail::format_double(u(rng)) + "\n";
        src += "sync_handshake_cycles = " + detail::format_double(u(rng) * 1000) + "\n";
        src += "n_ranks = " + std::to_string(1 + rng() % 40) + "\n";
        src += "cost_div_float64 = " + std::to_string(1 + rng() % 5000) + "\n";
        src += "host_broadcast_speedup = 1, 2, 3, 4, 5, 6, " + detail::format_double(7 + u(rng)) + "\n";
        const SystemConfig c = load_config(src);
        EXPECT_EQ(load_config(serialize(c)), c) << src;
    }
}

TEST(CostTable, FixedEntries) {
    const InstructionCostTable t;
    EXPECT_EQ(t(OpClass::add, DataType::int32), 1u);
    EXPECT_EQ(t(OpClass::sub, DataType::int32), 1u);
    EXPECT_EQ(t(OpClass::add, DataType::int64), 2u);
    EXPECT_EQ(t(OpClass::sub, DataType::uint64), 2u);
    for (DataType dt : kAllDataTypes) {
        EXPECT_EQ(t(OpClass::wram_load, dt), 1u);
        EXPECT_EQ(t(OpClass::wram_store, dt), 1u);
    }
    for (OpClass op : kAllOpClasses)
        for (DataType dt : kAllDataTypes) EXPECT_GE(t(op, dt), 1u);
    EXPECT_EQ(t(OpClass::mul, DataType::int64), 123u);
    EXPECT_EQ(t(OpClass::div, DataType::int64), 191u);
    InstructionCostTable m;
    EXPECT_THROW(m.set(OpClass::add, DataType::int32, 4), ParseError);
}

TEST(CostTable, LoopInstructionCounts) {
    const InstructionCostTable t;
    EXPECT_EQ(loop_instruction_count(OpClass::add, DataType::int32, t), 6u);
    EXPECT_EQ(loop_instruction_count(OpClass::add, DataType::int64, t), 7u);
    EXPECT_EQ(loop_instruction_count(OpClass::mul, DataType::int64, t), 123u + 5u);
    EXPECT_EQ(loop_instruction_count(OpClass::mul, DataType::int32, t), 32u);
    EXPECT_EQ(loop_instruction_count(OpClass::add, DataType::float32, t), 71u);
}

struct Measured {
    OpClass op;
    DataType dt;
    double mops;
};

// Single-DPU throughput at 16 tasklets used to calibrate the emulated entries.
static const Measured kCalibration[] = {
    {OpClass::add, DataType::int32, 58.56},   {OpClass::add, DataType::int64, 50.16},
    {OpClass::mul, DataType::int32, 10.27},   {OpClass::div, DataType::int32, 11.27},
    {OpClass::mul, DataType::int64, 2.56},    {OpClass::add, DataType::float32, 4.91},
    {OpClass::sub, DataType::float32, 4.59},  {OpClass::mul, DataType::float32, 1.91},
    {OpClass::div, DataType::float32, 0.34},  {OpClass::add, DataType::float64, 3.32},
    {OpClass::sub, DataType::float64, 3.11},  {OpClass::mul, DataType::float64, 0.53},
    {OpClass::div, DataType::float64, 0.16},
};

TEST(CostTable, FloatDefaultsInvertMeasuredThroughput) {
    const InstructionCostTable t;
    for (const auto& m : kCalibration) {
        if (!is_float(m.dt)) continue;
        const auto expected = static_cast<std::uint32_t>(std::lround(350.0 / m.mops));
        EXPECT_EQ(loop_instruction_count(m.op, m.dt, t), expected) << name(m.op) << "/" << name(m.dt);
    }
}

TEST(CostTable, InversionWithinTenPercent) {
    const InstructionCostTable t;
    for (const auto& m : kCalibration) {
        const double predicted = 350.0 / loop_instruction_count(m.op, m.dt, t);
        EXPECT_LE(std::abs(predicted - m.mops) / m.mops, 0.10) << name(m.op) << "/" << name(m.dt);
    }
}

TEST(InstructionMix, TotalIsSumOfEntries) {
    const InstructionCostTable t;
    InstructionMix m;
    m.add(OpClass::wram_load, DataType::int32, 2).add(OpClass::add, DataType::int64, 3).loop_overhead(4);
    EXPECT_EQ(m.instructions(t), 2u + 3u * 2u + 4u * 3u);
    EXPECT_EQ(m.operations(), 2u + 3u + 12u);
}
