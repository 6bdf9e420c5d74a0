#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"
#include "pim/prim/red.hpp"

// Exclusive prefix sum over int64 in two flavors: scan-scan-add (SSA) and reduce-scan-scan (RSS).
namespace pim::prim::scan {

enum class Variant : std::uint8_t { ssa, rss };

inline Variant parse_variant(const std::string& s) {
    if (s.empty() || s == "SSA" || s == "ssa") return Variant::ssa;
    if (s == "RSS" || s == "rss") return Variant::rss;
    throw std::invalid_argument("unknown SCAN variant '" + s + "' (SSA, RSS)");
}

inline std::vector<std::int64_t> generate(std::uint64_t n, std::uint64_t seed) {
    return random_values<std::int64_t>(n, -(1 << 20), 1 << 20, seed);
}

inline std::vector<std::int64_t> oracle(const std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> out(v.size());
    std::int64_t s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = s;
        s += v[i];
    }
    return out;
}

struct ScanArgs {
    std::uint64_t n;
    std::uint64_t in, out, total;
    std::int64_t base;
    std::uint32_t tile;
};

// Rounds of T consecutive tiles; tasklets pass the running sum along a handshake ring.
inline Task scan_kernel(Tasklet& t) {
    const ScanArgs& a = t.args<ScanArgs>();
    const std::uint32_t te = a.tile / 8;
    const unsigned id = t.id(), T = t.count();
    auto buf = t.wram_alloc<std::int64_t>(te);
    auto carry = t.shared<std::int64_t>("carry", 1);
    const std::uint64_t per_round = std::uint64_t{te} * T;
    const std::uint64_t rounds = ceil_div(a.n, per_round);
    for (std::uint64_t r = 0; r < rounds; ++r) {
        const std::uint64_t first = r * per_round + std::uint64_t{id} * te;
        const std::uint64_t len = first < a.n ? std::min<std::uint64_t>(te, a.n - first) : 0;
        std::int64_t local = 0;
        t.loop();
        if (len > 0) {
            co_await t.mram_read(a.in + first * 8, buf.data(), dma_bytes(len * 8));
            for (std::uint64_t i = 0; i < len; ++i) {
                const std::int64_t v = buf[i];
                buf[i] = local;
                local += v;
            }
            t.wram_load(len);
            t.wram_store(len);
            t.charge(OpClass::add, DataType::int64, len);
            t.loop(len);
        }
        std::int64_t base = 0;
        if (id == 0 && r == 0) {
            base = a.base;
        } else {
            co_await t.handshake_wait_for(id == 0 ? T - 1 : id - 1);
            base = carry[0];
            t.wram_load();
        }
        carry[0] = base + local;
        t.charge(OpClass::add, DataType::int64);
        t.wram_store();
        if (T > 1) co_await t.handshake_notify();
        if (len > 0) {
            for (std::uint64_t i = 0; i < len; ++i) buf[i] += base;
            t.wram_load(len);
            t.charge(OpClass::add, DataType::int64, len);
            t.wram_store(len);
            t.loop(len);
            co_await t.mram_write(buf.data(), a.out + first * 8, dma_bytes(len * 8));
        }
    }
    const bool writer = rounds == 0 ? id == 0 : id == T - 1;
    if (writer) {
        if (rounds == 0) carry[0] = a.base;
        co_await t.mram_write(carry.data(), a.total, 8);
    }
}

struct AddArgs {
    std::uint64_t n;
    std::uint64_t data;
    std::int64_t offset;
    std::uint32_t tile;
};

inline Task add_kernel(Tasklet& t) {
    const AddArgs& a = t.args<AddArgs>();
    const std::uint32_t te = a.tile / 8;
    auto buf = t.wram_alloc<std::int64_t>(te);
    for (std::uint64_t first = t.id() * te; first < a.n; first += std::uint64_t{t.count()} * te) {
        const std::uint64_t len = std::min<std::uint64_t>(te, a.n - first);
        const std::uint32_t bytes = dma_bytes(len * 8);
        t.loop();
        co_await t.mram_read(a.data + first * 8, buf.data(), bytes);
        for (std::uint64_t i = 0; i < len; ++i) buf[i] += a.offset;
        t.wram_load(len);
        t.charge(OpClass::add, DataType::int64, len);
        t.wram_store(len);
        t.loop(len);
        co_await t.mram_write(buf.data(), a.data + first * 8, bytes);
    }
}

struct Result {
    std::vector<std::int64_t> out;
    RunStats stats;
    // DPU cycles of the first and second kernel, summed over launches of each.
    std::uint64_t first_kernel_cycles = 0;
    std::uint64_t second_kernel_cycles = 0;
};

inline std::vector<std::int64_t> host_exclusive_scan(const std::vector<std::vector<std::int64_t>>& totals) {
    std::vector<std::int64_t> offsets(totals.size());
    std::int64_t s = 0;
    for (std::size_t d = 0; d < totals.size(); ++d) {
        offsets[d] = s;
        s += totals[d][0];
    }
    return offsets;
}

inline Result run(const SystemConfig& sys, const BenchParams& p, const std::vector<std::int64_t>& in) {
    const Variant v = parse_variant(p.variant);
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(in.size(), p.dpus);
    const std::uint64_t cap = align_up(parts[0].size() * 8, 8);
    const std::uint64_t out_at = cap, total_at = 2 * cap;
    set.push(Category::cpu_to_dpu, 0, slices<std::int64_t>(in, parts));
    const std::vector<std::size_t> ones(p.dpus, 1);
    Result r;
    std::vector<std::vector<std::int64_t>> offsets(p.dpus, std::vector<std::int64_t>(1));
    if (v == Variant::ssa) {
        for (std::uint32_t d = 0; d < p.dpus; ++d)
            set[d].set_args(ScanArgs{parts[d].size(), 0, out_at, total_at, 0, p.tile_bytes});
        set.launch(scan_kernel, p.tasklets, launch_options(p));
        const auto totals = set.pull<std::int64_t>(Category::inter_dpu, total_at, ones);
        const auto o = host_exclusive_scan(totals);
        set.host_compute(Category::inter_dpu, p.dpus);
        for (std::uint32_t d = 0; d < p.dpus; ++d) offsets[d][0] = o[d];
        set.push(Category::inter_dpu, total_at, offsets);
        for (std::uint32_t d = 0; d < p.dpus; ++d) set[d].set_args(AddArgs{parts[d].size(), out_at, o[d], p.tile_bytes});
        set.launch(add_kernel, p.tasklets, launch_options(p));
    } else {
        for (std::uint32_t d = 0; d < p.dpus; ++d)
            set[d].set_args(red::Args{parts[d].size(), total_at, p.tile_bytes, red::Variant::single});
        set.launch(red::kernel, p.tasklets, launch_options(p));
        const auto totals = set.pull<std::int64_t>(Category::inter_dpu, total_at, ones);
        const auto o = host_exclusive_scan(totals);
        set.host_compute(Category::inter_dpu, p.dpus);
        for (std::uint32_t d = 0; d < p.dpus; ++d) offsets[d][0] = o[d];
        set.push(Category::inter_dpu, total_at, offsets);
        for (std::uint32_t d = 0; d < p.dpus; ++d)
            set[d].set_args(ScanArgs{parts[d].size(), 0, out_at, total_at, o[d], p.tile_bytes});
        set.launch(scan_kernel, p.tasklets, launch_options(p));
    }
    std::vector<std::size_t> counts(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) counts[d] = parts[d].size();
    const auto out = set.pull<std::int64_t>(Category::dpu_to_cpu, out_at, counts);
    for (const auto& o : out) r.out.insert(r.out.end(), o.begin(), o.end());
    r.stats.absorb(set);
    r.first_kernel_cycles = r.stats.launch_cycles.at(0);
    r.second_kernel_cycles = r.stats.launch_cycles.at(1);
    return r;
}

}  // namespace pim::prim::scan
