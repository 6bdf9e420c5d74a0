#include <gtest/gtest.h>

#include <cmath>

#include "pim/timing/memory.hpp"

using namespace pim;

TEST(DmaLatency, Examples) {
    const DpuConfig cfg;
    EXPECT_EQ(dma_latency({DmaDirection::mram_to_wram, 8, 0}, cfg), 81u);
    EXPECT_EQ(dma_latency({DmaDirection::mram_to_wram, 128, 0}, cfg), 141u);
    EXPECT_EQ(dma_latency({DmaDirection::wram_to_mram, 2048, 0}, cfg), 61u + 1024u);
    EXPECT_EQ(dma_latency({DmaDirection::mram_to_wram, 1024, 0}, cfg), 589u);
}

TEST(DmaLatency, RoundsUp) {
    DpuConfig cfg;
    cfg.dma_beta = 0.3;
    EXPECT_EQ(dma_latency({DmaDirection::mram_to_wram, 8, 0}, cfg), 80u);  // 77 + 2.4
}

TEST(DmaLatency, InvalidSizes) {
    const DpuConfig cfg;
    for (std::uint32_t s : {0u, 4u, 12u, 2056u, 4096u})
        EXPECT_THROW(dma_latency({DmaDirection::mram_to_wram, s, 0}, cfg), DmaError) << s;
}

TEST(DmaLatency, QueuedFineGrainedHidesPartOfAlpha) {
    DpuConfig cfg;
    cfg.fine_dma_overlap = 0.5;
    EXPECT_EQ(dma_latency_queued({DmaDirection::mram_to_wram, 8, 0}, cfg), 43u);  // 38.5 + 4
    EXPECT_EQ(dma_latency_queued({DmaDirection::wram_to_mram, 8, 0}, cfg), 35u);  // 30.5 + 4
    EXPECT_EQ(dma_latency_queued({DmaDirection::mram_to_wram, 16, 0}, cfg), 85u);
    cfg.fine_dma_overlap = 0;
    EXPECT_EQ(dma_latency_queued({DmaDirection::mram_to_wram, 8, 0}, cfg), 81u);
}

TEST(DmaBandwidth, Examples) {
    const DpuConfig cfg;
    EXPECT_NEAR(dma_bandwidth(2048, DmaDirection::mram_to_wram, cfg) / 1e6, 651.0, 0.05);
    EXPECT_NEAR(dma_bandwidth(8, DmaDirection::mram_to_wram, cfg) / 1e6, 8 * 350.0 / 81, 1e-9);
    DpuConfig big = cfg;
    big.dma_max_bytes = 1 << 24;
    EXPECT_NEAR(dma_bandwidth(1 << 24, DmaDirection::mram_to_wram, big) / 1e6, 700.0, 0.01);
}

TEST(DmaBandwidth, StrictlyIncreasing) {
    const DpuConfig cfg;
    for (DmaDirection d : {DmaDirection::mram_to_wram, DmaDirection::wram_to_mram})
        for (std::uint32_t s = 16; s <= 2048; s += 8)
            EXPECT_GT(dma_bandwidth(s, d, cfg), dma_bandwidth(s - 8, d, cfg)) << s;
}

// Read and write differ only in alpha; the gap is within 6% from 416 B upwards.
TEST(DmaBandwidth, ReadWriteSymmetryForLargeTransfers) {
    const DpuConfig cfg;
    for (std::uint32_t s = 416; s <= 2048; s += 8) {
        const double r = dma_bandwidth(s, DmaDirection::mram_to_wram, cfg);
        const double w = dma_bandwidth(s, DmaDirection::wram_to_mram, cfg);
        EXPECT_LE(std::abs(r - w) / r, 0.06) << s;
    }
    const double r = dma_bandwidth(8, DmaDirection::mram_to_wram, cfg);
    const double w = dma_bandwidth(8, DmaDirection::wram_to_mram, cfg);
    EXPECT_GT(std::abs(r - w) / r, 0.06);
}

TEST(WramStream, BandwidthFormula) {
    const DpuConfig cfg;
    EXPECT_DOUBLE_EQ(wram_stream_bandwidth(WramStream::copy, 16, cfg).bandwidth, 2800e6);
    EXPECT_DOUBLE_EQ(wram_stream_bandwidth(WramStream::add, 11, cfg).bandwidth, 1680e6);
    EXPECT_NEAR(wram_stream_bandwidth(WramStream::scale, 16, cfg).bandwidth / 1e6, 44.8, 1e-9);
    EXPECT_NEAR(wram_stream_bandwidth(WramStream::triad, 16, cfg).bandwidth / 1e6, 24 * 350.0 / 128, 1e-9);
    EXPECT_NEAR(wram_stream_bandwidth(WramStream::copy, 1, cfg).bandwidth, 2800e6 / 11, 1e-3);
}

TEST(WramStream, ReportInvariant) {
    const DpuConfig cfg;
    for (auto v : {WramStream::copy, WramStream::add, WramStream::scale, WramStream::triad})
        for (unsigned t = 1; t <= 24; ++t) {
            const auto r = wram_stream_bandwidth(v, t, cfg);
            EXPECT_NEAR(r.bandwidth, r.bytes_moved * cfg.frequency_hz / r.cycles, 1e-6 * r.bandwidth);
        }
}
