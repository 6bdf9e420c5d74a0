#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// SEL keeps the int64 elements that fail the predicate (odd values survive); UNI keeps the first
// element of every run of equal values. Both pass running output offsets along a handshake ring and
// the host merges per-DPU results with serial transfers.
namespace pim::prim::sel {

inline bool predicate(std::int64_t v) { return v % 2 == 0; }

inline std::vector<std::int64_t> generate(std::uint64_t n, std::uint64_t seed) {
    return random_values<std::int64_t>(n, -(std::int64_t{1} << 40), std::int64_t{1} << 40, seed);
}

inline std::vector<std::int64_t> oracle_select(const std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> out;
    for (auto x : v)
        if (!predicate(x)) out.push_back(x);
    return out;
}

inline std::vector<std::int64_t> oracle_unique(const std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i == 0 || v[i] != v[i - 1]) out.push_back(v[i]);
    return out;
}

enum class Op : std::uint8_t { select, unique };

struct Args {
    std::uint64_t n;
    std::uint64_t in, out, count;
    std::uint32_t tile;
    Op op;
    // Optional record of the output offset each (round, tasklet) block received.
    std::vector<std::uint64_t>* offsets = nullptr;
};

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t te = a.tile / 8;
    const unsigned id = t.id(), T = t.count();
    auto buf = t.wram_alloc<std::int64_t>(te);
    // carry = {output count so far, last input value, last value valid}
    auto carry = t.shared<std::int64_t>("carry", 3);
    const std::uint64_t per_round = std::uint64_t{te} * T;
    const std::uint64_t rounds = ceil_div(a.n, per_round);
    for (std::uint64_t r = 0; r < rounds; ++r) {
        const std::uint64_t first = r * per_round + std::uint64_t{id} * te;
        const std::uint64_t len = first < a.n ? std::min<std::uint64_t>(te, a.n - first) : 0;
        std::uint64_t kept = 0;
        t.loop();
        if (len > 0) {
            co_await t.mram_read(a.in + first * 8, buf.data(), dma_bytes(len * 8));
            std::int64_t last = buf[0];
            if (a.op == Op::select) {
                for (std::uint64_t i = 0; i < len; ++i)
                    if (!predicate(buf[i])) buf[kept++] = buf[i];
                t.charge(OpClass::bitwise, DataType::int64, len);
            } else {
                kept = 1;
                for (std::uint64_t i = 1; i < len; ++i) {
                    if (buf[i] != last) buf[kept++] = buf[i];
                    last = buf[i];
                }
                t.wram_load(len);  // the extra read of the previous value
            }
            t.wram_load(len);
            t.charge(OpClass::compare, DataType::int64, len);
            t.charge(OpClass::branch, DataType::int32, len);
            t.wram_store(kept);
            t.loop(len);
        }
        if (!(id == 0 && r == 0)) {
            co_await t.handshake_wait_for(id == 0 ? T - 1 : id - 1);
            t.wram_load(3);
        } else {
            carry[0] = 0;
            carry[2] = 0;
        }
        const std::uint64_t base = static_cast<std::uint64_t>(carry[0]);
        std::uint64_t skip = 0;
        if (a.op == Op::unique && len > 0 && carry[2] && buf[0] == carry[1]) {
            skip = 1;
            t.charge(OpClass::compare, DataType::int64);
        }
        if (a.offsets) a.offsets->push_back(base);
        carry[0] = static_cast<std::int64_t>(base + kept - skip);
        if (len > 0) {
            carry[1] = a.op == Op::unique ? buf[kept - 1] : 0;
            carry[2] = 1;
        }
        t.charge(OpClass::add, DataType::int64);
        t.wram_store(3);
        if (T > 1) co_await t.handshake_notify();
        if (kept > skip) co_await t.mram_write(buf.data() + skip, a.out + base * 8, static_cast<std::uint32_t>((kept - skip) * 8));
    }
    if (rounds == 0 ? id == 0 : id == T - 1) {
        if (rounds == 0) carry[0] = 0;
        co_await t.mram_write(carry.data(), a.count, 8);
    }
}

struct Result {
    std::vector<std::int64_t> out;
    RunStats stats;
    // Per DPU: the offset every (round, tasklet) block received, in that order.
    std::vector<std::vector<std::uint64_t>> offsets;
};

inline Result run(Op op, const SystemConfig& sys, const BenchParams& p, const std::vector<std::int64_t>& in,
                  bool record_offsets = false) {
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(in.size(), p.dpus);
    const std::uint64_t cap = align_up(parts[0].size() * 8, 8);
    set.push(Category::cpu_to_dpu, 0, slices<std::int64_t>(in, parts));
    Result r;
    r.offsets.resize(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d)
        set[d].set_args(Args{parts[d].size(), 0, cap, 2 * cap, p.tile_bytes, op, record_offsets ? &r.offsets[d] : nullptr});
    set.launch(kernel, p.tasklets, launch_options(p));
    const auto counts = set.pull<std::int64_t>(Category::dpu_to_cpu, 2 * cap, std::vector<std::size_t>(p.dpus, 1));
    std::vector<std::size_t> n(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) n[d] = static_cast<std::size_t>(counts[d][0]);
    const auto outs = set.pull<std::int64_t>(Category::dpu_to_cpu, cap, n, TransferMode::serial);
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        auto b = outs[d].begin();
        if (op == Op::unique && b != outs[d].end() && !r.out.empty() && *b == r.out.back()) ++b;
        r.out.insert(r.out.end(), b, outs[d].end());
    }
    set.host_compute(Category::dpu_to_cpu, p.dpus);
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::sel

namespace pim::prim::uni {

inline std::vector<std::int64_t> generate(std::uint64_t n, std::uint64_t seed) { return runs(n, seed); }
inline std::vector<std::int64_t> oracle(const std::vector<std::int64_t>& v) { return sel::oracle_unique(v); }
inline sel::Result run(const SystemConfig& sys, const BenchParams& p, const std::vector<std::int64_t>& in,
                       bool record_offsets = false) {
    return sel::run(sel::Op::unique, sys, p, in, record_offsets);
}

}  // namespace pim::prim::uni
