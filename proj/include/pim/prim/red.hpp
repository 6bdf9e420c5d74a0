#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Sum reduction over int64. Step 1: each tasklet accumulates its tiles. Step 2 combines the partial
// sums with one of three variants.
namespace pim::prim::red {

enum class Variant : std::uint8_t { single, barrier, hands };

inline Variant parse_variant(const std::string& s) {
    if (s.empty() || s == "SINGLE" || s == "single") return Variant::single;
    if (s == "BARRIER" || s == "barrier") return Variant::barrier;
    if (s == "HANDS" || s == "hands") return Variant::hands;
    throw std::invalid_argument("unknown RED variant '" + s + "' (SINGLE, BARRIER, HANDS)");
}

inline std::string_view name(Variant v) {
    return v == Variant::single ? "SINGLE" : v == Variant::barrier ? "BARRIER" : "HANDS";
}

inline std::vector<std::int64_t> generate(std::uint64_t n, std::uint64_t seed) {
    return random_values<std::int64_t>(n, -(std::int64_t{1} << 40), std::int64_t{1} << 40, seed);
}

inline std::int64_t oracle(const std::vector<std::int64_t>& v) {
    std::int64_t s = 0;
    for (auto x : v) s += x;
    return s;
}

struct Args {
    std::uint64_t n;
    std::uint64_t out;
    std::uint32_t tile;
    Variant variant;
};

// Accumulates the tasklet's cyclic tiles of [base, base + 8n).
inline Task accumulate(Tasklet& t, std::uint64_t base, std::uint64_t n, std::uint32_t tile, std::int64_t& sum) {
    const std::uint32_t te = tile / 8;
    auto buf = t.wram_alloc<std::int64_t>(te);
    for (std::uint64_t first = t.id() * te; first < n; first += std::uint64_t{t.count()} * te) {
        const std::uint64_t len = std::min<std::uint64_t>(te, n - first);
        t.loop();
        co_await t.mram_read(base + first * 8, buf.data(), dma_bytes(len * 8));
        for (std::uint64_t i = 0; i < len; ++i) sum += buf[i];
        t.wram_load(len);
        t.charge(OpClass::add, DataType::int64, len);
        t.loop(len);
    }
}

// Combines per-tasklet partials into partial[0] of tasklet 0.
inline Task combine(Tasklet& t, std::span<std::int64_t> partial, Variant v) {
    const unsigned id = t.id(), n = t.count();
    switch (v) {
        case Variant::single:
            co_await t.barrier_wait();
            if (id == 0) {
                for (unsigned i = 1; i < n; ++i) partial[0] += partial[i];
                t.wram_load(n - 1);
                t.charge(OpClass::add, DataType::int64, n - 1);
                t.loop(n - 1);
            }
            break;
        case Variant::barrier:
            for (unsigned s = 1; s < n; s *= 2) {
                co_await t.barrier_wait();
                if (id % (2 * s) == 0 && id + s < n) {
                    partial[id] += partial[id + s];
                    t.wram_load(2);
                    t.charge(OpClass::add, DataType::int64);
                    t.wram_store();
                }
                t.loop();
            }
            break;
        case Variant::hands:
            for (unsigned s = 1; s < n; s *= 2) {
                t.loop();
                if (id % (2 * s) != 0) {
                    co_await t.handshake_notify();
                    break;
                }
                if (id + s < n) {
                    co_await t.handshake_wait_for(id + s);
                    partial[id] += partial[id + s];
                    t.wram_load(2);
                    t.charge(OpClass::add, DataType::int64);
                    t.wram_store();
                }
            }
            break;
    }
}

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    auto partial = t.shared<std::int64_t>("partial", t.count());
    std::int64_t sum = 0;
    co_await accumulate(t, 0, a.n, a.tile, sum);
    partial[t.id()] = sum;
    t.wram_store();
    co_await combine(t, partial, a.variant);
    if (t.id() == 0) co_await t.mram_write(partial.data(), a.out, 8);
}

struct Result {
    std::int64_t sum = 0;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const std::vector<std::int64_t>& in) {
    const Variant v = parse_variant(p.variant);
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(in.size(), p.dpus);
    const std::uint64_t out_at = align_up(parts[0].size() * 8, 8);
    set.push(Category::cpu_to_dpu, 0, slices<std::int64_t>(in, parts));
    for (std::uint32_t d = 0; d < p.dpus; ++d) set[d].set_args(Args{parts[d].size(), out_at, p.tile_bytes, v});
    set.launch(kernel, p.tasklets, launch_options(p));
    const auto partials = set.pull<std::int64_t>(Category::dpu_to_cpu, out_at, std::vector<std::size_t>(p.dpus, 1));
    Result r;
    for (const auto& x : partials) r.sum += x[0];
    set.host_compute(Category::inter_dpu, p.dpus);
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::red
