#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pim/runtime/scheduler.hpp"
#include "pim/timing/memory.hpp"
#include "pim/timing/pipeline.hpp"

namespace pim {

enum class MramStream { copy_dma, copy, add, scale, triad };

inline constexpr std::string_view name(MramStream v) {
    switch (v) {
        case MramStream::copy_dma: return "COPY-DMA";
        case MramStream::copy: return "COPY";
        case MramStream::add: return "ADD";
        case MramStream::scale: return "SCALE";
        case MramStream::triad: return "TRIAD";
    }
    return "?";
}

inline constexpr std::uint64_t kStreamFootprintBytes = 1 << 20;

namespace detail {

inline rt::Step with_compute(std::uint64_t instructions, rt::Action a) { return {instructions, a}; }

inline rt::DmaEvent rd(std::uint32_t size) { return {DmaDirection::mram_to_wram, size}; }
inline rt::DmaEvent wr(std::uint32_t size) { return {DmaDirection::wram_to_mram, size}; }

}  // namespace detail

// Tiles of `transfer_size` bytes assigned cyclically to tasklets; COPY-DMA moves tiles without
// touching them, the others run the unrolled WRAM loop of the matching WRAM stream on each tile.
inline std::vector<rt::TaskletTrace> mram_stream_traces(MramStream v, unsigned tasklets, std::uint32_t transfer_size,
                                                        const DpuConfig& cfg,
                                                        std::uint64_t footprint = kStreamFootprintBytes) {
    check_tasklet_count(tasklets, cfg);
    check_dma_size(transfer_size, cfg);
    const unsigned inputs = (v == MramStream::add || v == MramStream::triad) ? 2 : 1;
    const std::uint64_t wram_needed =
        tasklets * (cfg.wram_stack_bytes + static_cast<std::uint64_t>(inputs + (v == MramStream::copy_dma ? 0 : 1)) *
                                               transfer_size);
    if (v == MramStream::copy_dma ? tasklets * (cfg.wram_stack_bytes + transfer_size) > cfg.wram_bytes
                                  : wram_needed > cfg.wram_bytes)
        throw CapacityError("WRAM overflow: stream buffers need " + std::to_string(wram_needed) + " bytes");
    const std::uint64_t tiles = footprint / transfer_size;
    const std::uint64_t elements = transfer_size / 8;
    const std::uint64_t issue = cfg.dma_issue_instructions;
    const std::uint64_t loop = 3;
    std::uint64_t per_tile = 0;
    switch (v) {
        case MramStream::copy_dma: per_tile = 0; break;
        case MramStream::copy: per_tile = elements * wram_stream_shape(WramStream::copy, cfg.costs).instructions; break;
        case MramStream::add: per_tile = elements * wram_stream_shape(WramStream::add, cfg.costs).instructions; break;
        case MramStream::scale: per_tile = elements * wram_stream_shape(WramStream::scale, cfg.costs).instructions; break;
        case MramStream::triad: per_tile = elements * wram_stream_shape(WramStream::triad, cfg.costs).instructions; break;
    }
    std::vector<rt::TaskletTrace> traces(tasklets);
    for (std::uint64_t tile = 0; tile < tiles; ++tile) {
        auto& tr = traces[tile % tasklets];
        tr.push_back(detail::with_compute(loop + issue, detail::rd(transfer_size)));
        if (inputs == 2) tr.push_back(detail::with_compute(issue, detail::rd(transfer_size)));
        tr.push_back(detail::with_compute(per_tile + issue, detail::wr(transfer_size)));
    }
    return traces;
}

inline double stream_bytes(MramStream v, std::uint64_t footprint, std::uint32_t transfer_size) {
    const std::uint64_t tiles = footprint / transfer_size;
    const unsigned arrays = (v == MramStream::add || v == MramStream::triad) ? 3 : 2;
    return static_cast<double>(tiles * transfer_size * arrays);
}

inline BandwidthReport mram_stream_bandwidth(MramStream v, unsigned tasklets, std::uint32_t transfer_size,
                                             const DpuConfig& cfg, std::uint64_t footprint = kStreamFootprintBytes) {
    const auto tl = rt::deterministic_schedule(mram_stream_traces(v, tasklets, transfer_size, cfg, footprint), cfg);
    return make_report(stream_bytes(v, footprint, transfer_size), static_cast<double>(tl.total_cycles), cfg);
}

inline constexpr double kSaturationFraction = 0.97;

// Smallest tasklet count reaching kSaturationFraction of the best bandwidth over 1..max_tasklets.
inline unsigned saturation_tasklets(const std::vector<double>& bandwidth_by_tasklets) {
    double best = 0;
    for (double b : bandwidth_by_tasklets) best = std::max(best, b);
    for (std::size_t i = 0; i < bandwidth_by_tasklets.size(); ++i)
        if (bandwidth_by_tasklets[i] >= kSaturationFraction * best) return static_cast<unsigned>(i + 1);
    return static_cast<unsigned>(bandwidth_by_tasklets.size());
}

inline unsigned mram_stream_saturation(MramStream v, std::uint32_t transfer_size, const DpuConfig& cfg,
                                       unsigned max_tasklets = 16) {
    std::vector<double> bw;
    for (unsigned t = 1; t <= max_tasklets; ++t) bw.push_back(mram_stream_bandwidth(v, t, transfer_size, cfg).bandwidth);
    return saturation_tasklets(bw);
}

enum class StrideMode { coarse, fine };

inline constexpr std::string_view name(StrideMode m) { return m == StrideMode::coarse ? "coarse" : "fine"; }

inline constexpr std::uint32_t kStrideSegmentBytes = 1024;
inline constexpr std::uint64_t kStrideFootprintBytes = 1 << 20;

// Per used element: load, add, store.
inline constexpr std::uint64_t kUpdateInstructions = 3;

// Coarse: each tasklet moves whole 1024-B segments and updates every stride-th element.
// Fine: one 8-B read and one 8-B write per used element. Bandwidth counts used bytes only.
inline BandwidthReport strided_bandwidth(StrideMode mode, std::uint32_t stride, unsigned tasklets,
                                         const DpuConfig& cfg) {
    if (stride == 0) throw std::invalid_argument("stride must be at least 1");
    check_tasklet_count(tasklets, cfg);
    const std::uint64_t issue = cfg.dma_issue_instructions;
    std::vector<rt::TaskletTrace> traces(tasklets);
    double used_bytes = 0;
    if (mode == StrideMode::coarse) {
        const std::uint64_t segments = kStrideFootprintBytes / kStrideSegmentBytes;
        const double per_segment = static_cast<double>(kStrideSegmentBytes / 8) / stride;
        const auto touched = static_cast<std::uint64_t>(std::ceil(per_segment));
        for (std::uint64_t s = 0; s < segments; ++s) {
            auto& tr = traces[s % tasklets];
            tr.push_back(detail::with_compute(3 + issue, detail::rd(kStrideSegmentBytes)));
            tr.push_back(detail::with_compute(touched * (kUpdateInstructions + 3) + issue, detail::wr(kStrideSegmentBytes)));
        }
        used_bytes = 16.0 * per_segment * static_cast<double>(segments);
    } else {
        const std::uint64_t updates = kStrideFootprintBytes / 8 / 16;
        for (std::uint64_t u = 0; u < updates; ++u) {
            auto& tr = traces[u % tasklets];
            tr.push_back(detail::with_compute(3 + issue, detail::rd(8)));
            tr.push_back(detail::with_compute(kUpdateInstructions + issue, detail::wr(8)));
        }
        used_bytes = 16.0 * static_cast<double>(updates);
    }
    const auto tl = rt::deterministic_schedule(traces, cfg);
    return make_report(used_bytes, static_cast<double>(tl.total_cycles), cfg);
}

// Largest power-of-two stride at which coarse access still beats fine access.
inline std::uint32_t stride_crossover(unsigned tasklets, const DpuConfig& cfg, std::uint32_t max_stride = 4096) {
    const double fine = strided_bandwidth(StrideMode::fine, 1, tasklets, cfg).bandwidth;
    std::uint32_t last = 0;
    for (std::uint32_t s = 1; s <= max_stride; s *= 2)
        if (strided_bandwidth(StrideMode::coarse, s, tasklets, cfg).bandwidth > fine) last = s;
    return last;
}

// GUPS-style read-modify-write of 8-B words at random positions.
// Per update: index generation (xorshift + mask, 5 instructions), address calc, DMA issues, update.
inline BandwidthReport random_access_bandwidth(unsigned tasklets, const DpuConfig& cfg,
                                               std::uint64_t updates = 1 << 14) {
    check_tasklet_count(tasklets, cfg);
    const std::uint64_t issue = cfg.dma_issue_instructions;
    std::vector<rt::TaskletTrace> traces(tasklets);
    for (std::uint64_t u = 0; u < updates; ++u) {
        auto& tr = traces[u % tasklets];
        tr.push_back(detail::with_compute(5 + 3 + issue, detail::rd(8)));
        tr.push_back(detail::with_compute(kUpdateInstructions + issue, detail::wr(8)));
    }
    const auto tl = rt::deterministic_schedule(traces, cfg);
    return make_report(16.0 * static_cast<double>(updates), static_cast<double>(tl.total_cycles), cfg);
}

// Overlap factor on a 0.005 grid whose GUPS bandwidth at `tasklets` lands closest to `target_bps`.
inline double calibrate_fine_dma_overlap(double target_bps, unsigned tasklets, DpuConfig cfg) {
    double best = 0, best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i) {
        cfg.fine_dma_overlap = i * 0.005;
        const double err = std::abs(random_access_bandwidth(tasklets, cfg).bandwidth - target_bps);
        if (err < best_err - 1e-9) {
            best_err = err;
            best = cfg.fine_dma_overlap;
        }
    }
    return best;
}

// Memory-bound ceiling: operational intensity times the COPY-DMA stream bandwidth at `tasklets`.
struct Roofline {
    double compute_ops;
    double memory_bps;

    double throughput(double operational_intensity) const {
        if (!(operational_intensity > 0)) throw std::invalid_argument("operational intensity must be positive");
        return std::min(compute_ops, operational_intensity * memory_bps);
    }
    double knee() const { return compute_ops / memory_bps; }
};

inline Roofline roofline(OpClass op, DataType dt, unsigned tasklets, const DpuConfig& cfg) {
    return {arithmetic_throughput(op, dt, tasklets, cfg),
            mram_stream_bandwidth(MramStream::copy_dma, tasklets, 1024, cfg).bandwidth};
}

inline double roofline_throughput(OpClass op, DataType dt, unsigned tasklets, double operational_intensity,
                                  const DpuConfig& cfg) {
    return roofline(op, dt, tasklets, cfg).throughput(operational_intensity);
}

// 1/2048, 1/1024, ..., 4, 8 OP/B.
inline std::vector<double> default_oi_grid() {
    std::vector<double> g;
    for (int e = -11; e <= 3; ++e) g.push_back(std::ldexp(1.0, e));
    return g;
}

// First grid point at which the compute ceiling is reached.
inline double saturation_intensity(const Roofline& r, const std::vector<double>& grid) {
    for (double oi : grid)
        if (r.throughput(oi) >= r.compute_ops) return oi;
    return grid.back();
}

}  // namespace pim
