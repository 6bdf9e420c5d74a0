#pragma once

#include <bit>

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Histogram of a 12-bit image. HST-S keeps one histogram per tasklet and merges after a barrier;
// HST-L keeps a single histogram per DPU updated under a mutex. The host merges per-DPU histograms.
namespace pim::prim::hst {

enum class Variant : std::uint8_t { s, l };

inline Variant parse_variant(const std::string& v) {
    if (v.empty() || v == "S" || v == "s") return Variant::s;
    if (v == "L" || v == "l") return Variant::l;
    throw std::invalid_argument("unknown HST variant '" + v + "' (S, L)");
}
inline std::string_view name(Variant v) { return v == Variant::s ? "S" : "L"; }

inline constexpr std::uint32_t kDepthBits = 12;
inline constexpr std::uint32_t kStackBytes = 1024;
inline constexpr std::uint32_t kRuntimeBytes = 1024;

inline std::vector<std::uint32_t> generate(std::uint64_t pixels, std::uint64_t seed) {
    const std::uint64_t width = 1536;
    const std::uint64_t rows = ceil_div(pixels, width);
    auto img = image12(width, rows, seed);
    img.resize(pixels);
    return img;
}

inline std::uint32_t shift_for(std::uint32_t bins) {
    if (!std::has_single_bit(bins) || bins > (1u << kDepthBits))
        throw std::invalid_argument("HST bins must be a power of two up to 4096");
    return kDepthBits - static_cast<std::uint32_t>(std::countr_zero(bins));
}

inline std::vector<std::uint32_t> oracle(const std::vector<std::uint32_t>& img, std::uint32_t bins) {
    const std::uint32_t sh = shift_for(bins);
    std::vector<std::uint32_t> h(bins, 0);
    for (auto px : img) ++h[px >> sh];
    return h;
}

// Largest power-of-two tasklet count, at most `requested`, whose private histograms, tile buffers
// and stacks fit in WRAM.
inline unsigned s_tasklets(std::uint32_t bins, std::uint32_t tile_bytes, unsigned requested, std::uint64_t wram) {
    const std::uint64_t per = tile_bytes + kStackBytes + 4ull * bins;
    const std::uint64_t fit = wram > kRuntimeBytes ? (wram - kRuntimeBytes) / per : 0;
    const auto cap = static_cast<unsigned>(std::min<std::uint64_t>(requested, fit));
    if (cap == 0) throw CapacityError("HST-S histogram of " + std::to_string(bins) + " bins does not fit in WRAM");
    return std::bit_floor(cap);
}

struct Args {
    std::uint64_t n, in, out;
    std::uint32_t bins, tile;
    Variant variant;
};

inline Task write_bins(Tasklet& t, std::span<const std::uint32_t> hist, std::uint64_t out) {
    const Range r = block_partition(hist.size(), t.count(), 2)[t.id()];
    for (std::uint64_t b = r.begin; b < r.end; b += 512) {
        const auto n = static_cast<std::uint32_t>(std::min<std::uint64_t>(512, r.end - b));
        t.loop();
        co_await t.mram_write(hist.data() + b, out + b * 4, dma_bytes(n * 4ull));
    }
}

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t sh = shift_for(a.bins);
    const std::uint32_t te = a.tile / 4;
    auto px = t.wram_alloc<std::uint32_t>(te);
    const bool s = a.variant == Variant::s;
    auto all = t.shared<std::uint32_t>("hist", s ? std::uint64_t{a.bins} * t.count() : a.bins);
    auto mine = s ? all.subspan(std::uint64_t{a.bins} * t.id(), a.bins) : all;
    if (s) {
        std::fill(mine.begin(), mine.end(), 0u);
        t.wram_store(a.bins);
        t.loop(a.bins);
    } else {
        const Range r = even_partition(a.bins, t.count())[t.id()];
        std::fill(all.begin() + r.begin, all.begin() + r.end, 0u);
        t.wram_store(r.size());
        t.loop(r.size());
        co_await t.barrier_wait();
    }

    for (std::uint64_t first = std::uint64_t{t.id()} * te; first < a.n; first += std::uint64_t{t.count()} * te) {
        const std::uint64_t len = std::min<std::uint64_t>(te, a.n - first);
        t.loop();
        co_await t.mram_read(a.in + first * 4, px.data(), dma_bytes(len * 4));
        if (s) {
            for (std::uint64_t i = 0; i < len; ++i) ++mine[px[i] >> sh];
            t.wram_load(2 * len);
            t.charge(OpClass::bitwise, DataType::uint32, len);
            t.charge(OpClass::address_calc, DataType::int32, len);
            t.charge(OpClass::add, DataType::uint32, len);
            t.wram_store(len);
            t.loop(len);
        } else {
            for (std::uint64_t i = 0; i < len; ++i) {
                t.wram_load();
                t.charge(OpClass::bitwise, DataType::uint32);
                t.charge(OpClass::address_calc, DataType::int32);
                co_await t.mutex_lock();
                ++all[px[i] >> sh];
                t.wram_load();
                t.charge(OpClass::add, DataType::uint32);
                t.wram_store();
                co_await t.mutex_unlock();
                t.loop();
            }
        }
    }

    co_await t.barrier_wait();
    if (s) {
        const Range r = block_partition(a.bins, t.count(), 2)[t.id()];
        for (std::uint64_t b = r.begin; b < r.end; ++b) {
            std::uint32_t acc = all[b];
            for (unsigned k = 1; k < t.count(); ++k) acc += all[std::uint64_t{k} * a.bins + b];
            all[b] = acc;
        }
        t.wram_load(r.size() * t.count());
        t.charge(OpClass::add, DataType::uint32, r.size() * (t.count() - 1));
        t.charge(OpClass::address_calc, DataType::int32, r.size() * t.count());
        t.wram_store(r.size());
        t.loop(r.size() * t.count());
        co_await write_bins(t, all.first(a.bins), a.out);
    } else {
        co_await write_bins(t, all, a.out);
    }
}

struct Result {
    std::vector<std::uint32_t> hist;
    RunStats stats;
    unsigned tasklets = 0;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const std::vector<std::uint32_t>& img,
                  std::uint32_t bins) {
    const Variant v = parse_variant(p.variant);
    shift_for(bins);
    const unsigned tasklets = v == Variant::s ? s_tasklets(bins, p.tile_bytes, p.tasklets, sys.dpu.wram_bytes) : p.tasklets;
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(img.size(), p.dpus, 2);
    const std::uint64_t cap = align_up(parts[0].size() * 4, 8);
    set.push(Category::cpu_to_dpu, 0, slices<std::uint32_t>(img, parts, 2));
    for (std::uint32_t d = 0; d < p.dpus; ++d) set[d].set_args(Args{parts[d].size(), 0, cap, bins, p.tile_bytes, v});
    auto opts = launch_options(p);
    set.launch(kernel, tasklets, opts);
    const auto hists = set.pull<std::uint32_t>(Category::inter_dpu, cap, std::vector<std::size_t>(p.dpus, bins));
    Result r;
    r.tasklets = tasklets;
    r.hist.assign(bins, 0);
    for (const auto& h : hists)
        for (std::uint32_t b = 0; b < bins; ++b) r.hist[b] += h[b];
    set.host_compute(Category::inter_dpu, std::uint64_t{bins} * p.dpus);
    r.stats.absorb(set);
    r.stats.detail["tasklets"] = tasklets;
    r.stats.detail["bins"] = bins;
    return r;
}

}  // namespace pim::prim::hst
