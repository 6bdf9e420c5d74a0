#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "pim/core/config.hpp"
#include "pim/timing/pipeline.hpp"

namespace pim {

enum class DmaDirection : std::uint8_t { mram_to_wram, wram_to_mram };

inline constexpr std::string_view name(DmaDirection d) {
    return d == DmaDirection::mram_to_wram ? "read" : "write";
}

struct DmaRequest {
    DmaDirection direction = DmaDirection::mram_to_wram;
    std::uint32_t size = 8;
    std::uint32_t issuing_tasklet = 0;
};

class DmaError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline void check_dma_size(std::uint64_t size, const DpuConfig& cfg) {
    if (size < cfg.dma_min_bytes || size > cfg.dma_max_bytes)
        throw DmaError("DMA size " + std::to_string(size) + " outside [" + std::to_string(cfg.dma_min_bytes) +
                       ", " + std::to_string(cfg.dma_max_bytes) + "]");
    if (size % cfg.dma_granularity != 0)
        throw DmaError("DMA size " + std::to_string(size) + " not a multiple of " +
                       std::to_string(cfg.dma_granularity));
}

inline double dma_alpha(DmaDirection d, const DpuConfig& cfg) {
    return d == DmaDirection::mram_to_wram ? cfg.dma_alpha_read : cfg.dma_alpha_write;
}

// alpha + beta * size, rounded up.
inline std::uint64_t dma_latency(const DmaRequest& req, const DpuConfig& cfg) {
    check_dma_size(req.size, cfg);
    return static_cast<std::uint64_t>(std::ceil(dma_alpha(req.direction, cfg) + cfg.dma_beta * req.size));
}

// Latency of a request that waited behind another one in the engine queue.
inline std::uint64_t dma_latency_queued(const DmaRequest& req, const DpuConfig& cfg) {
    check_dma_size(req.size, cfg);
    if (req.size > cfg.fine_dma_max_bytes) return dma_latency(req, cfg);
    const double alpha = dma_alpha(req.direction, cfg) * (1.0 - cfg.fine_dma_overlap);
    return static_cast<std::uint64_t>(std::ceil(alpha + cfg.dma_beta * req.size - 1e-9));
}

inline double dma_bandwidth(std::uint32_t size, DmaDirection direction, const DpuConfig& cfg) {
    return static_cast<double>(size) * cfg.frequency_hz /
           static_cast<double>(dma_latency({direction, size, 0}, cfg));
}

struct BandwidthReport {
    double bytes_moved = 0;
    double cycles = 0;
    double bandwidth = 0;
};

inline BandwidthReport make_report(double bytes, double cycles, const DpuConfig& cfg) {
    return {bytes, cycles, cycles > 0 ? bytes * cfg.frequency_hz / cycles : 0.0};
}

enum class WramStream { copy, add, scale, triad };

inline constexpr std::string_view name(WramStream v) {
    switch (v) {
        case WramStream::copy: return "COPY";
        case WramStream::add: return "ADD";
        case WramStream::scale: return "SCALE";
        case WramStream::triad: return "TRIAD";
    }
    return "?";
}

// Instructions and WRAM bytes per unrolled element of each variant (64-bit elements).
struct StreamShape {
    std::uint64_t instructions;
    std::uint64_t bytes;
};

inline StreamShape wram_stream_shape(WramStream v, const InstructionCostTable& t) {
    const auto ld = t(OpClass::wram_load, DataType::int64);
    const auto st = t(OpClass::wram_store, DataType::int64);
    const auto add = t(OpClass::add, DataType::int64);
    const auto mul = t(OpClass::mul, DataType::int64);
    switch (v) {
        case WramStream::copy: return {ld + st, 16};
        case WramStream::add: return {2 * ld + add + st, 24};
        case WramStream::scale: return {ld + mul + st, 16};
        case WramStream::triad: return {2 * ld + mul + add + st, 24};
    }
    return {1, 0};
}

// b * f / n scaled by min(T, dispatch_interval) / dispatch_interval, over a fixed element count.
inline BandwidthReport wram_stream_bandwidth(WramStream v, unsigned tasklets, const DpuConfig& cfg) {
    if (tasklets == 0) throw std::invalid_argument("at least one tasklet is required");
    constexpr double elements = 1 << 20;
    const StreamShape s = wram_stream_shape(v, cfg.costs);
    const double cycles = elements * static_cast<double>(s.instructions) / tasklet_scaling(tasklets, cfg);
    return make_report(elements * static_cast<double>(s.bytes), cycles, cfg);
}

}  // namespace pim
