#pragma once

#include <unordered_map>

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Binary search: the sorted int64 array is replicated on every DPU, queries are partitioned.
// Every probe is an 8-byte DMA read. Missing queries report -1.
namespace pim::prim::bs {

struct Input {
    std::vector<std::int64_t> array;    // strictly increasing
    std::vector<std::int64_t> queries;
};

inline Input generate(std::uint64_t array_len, std::uint64_t queries, std::uint64_t seed) {
    Input in{sorted_distinct(array_len, seed), {}};
    Rng r(seed + 77);
    in.queries.resize(queries);
    for (auto& q : in.queries) {
        if (!in.array.empty() && r.uniform(0, 9) != 0) {
            q = in.array[static_cast<std::size_t>(r.uniform(0, static_cast<std::int64_t>(in.array.size()) - 1))];
        } else {
            q = r.uniform(-2000, in.array.empty() ? 2000 : in.array.back() + 2000);
        }
    }
    return in;
}

// Reference: one linear scan of the array into a value -> position index.
inline std::vector<std::int64_t> oracle(const Input& in) {
    std::unordered_map<std::int64_t, std::int64_t> index;
    index.reserve(in.array.size());
    for (std::size_t j = 0; j < in.array.size(); ++j) index.emplace(in.array[j], static_cast<std::int64_t>(j));
    std::vector<std::int64_t> out(in.queries.size(), -1);
    for (std::size_t i = 0; i < in.queries.size(); ++i)
        if (auto it = index.find(in.queries[i]); it != index.end()) out[i] = it->second;
    return out;
}

struct Args {
    std::uint64_t array_len, queries;
    std::uint64_t array, query, out;
    std::uint32_t tile;
};

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t te = a.tile / 8;
    auto q = t.wram_alloc<std::int64_t>(te);
    auto probe = t.wram_alloc<std::int64_t>(1);
    for (std::uint64_t first = t.id() * te; first < a.queries; first += std::uint64_t{t.count()} * te) {
        const std::uint64_t len = std::min<std::uint64_t>(te, a.queries - first);
        const std::uint32_t bytes = dma_bytes(len * 8);
        t.loop();
        co_await t.mram_read(a.query + first * 8, q.data(), bytes);
        for (std::uint64_t i = 0; i < len; ++i) {
            const std::int64_t key = q[i];
            t.wram_load();
            std::int64_t lo = 0, hi = static_cast<std::int64_t>(a.array_len) - 1, pos = -1;
            while (lo <= hi) {
                const std::int64_t mid = lo + (hi - lo) / 2;
                t.charge(OpClass::sub, DataType::int64);
                t.charge(OpClass::bitwise, DataType::int64);
                t.charge(OpClass::add, DataType::int64);
                co_await t.mram_read(a.array + static_cast<std::uint64_t>(mid) * 8, probe.data(), 8);
                t.wram_load();
                t.charge(OpClass::compare, DataType::int64, 2);
                t.charge(OpClass::branch, DataType::int32, 2);
                if (probe[0] == key) {
                    pos = mid;
                    break;
                }
                if (probe[0] < key) lo = mid + 1;
                else hi = mid - 1;
                t.charge(OpClass::move, DataType::int64);
            }
            q[i] = pos;
            t.wram_store();
            t.loop();
        }
        co_await t.mram_write(q.data(), a.out + first * 8, bytes);
    }
}

struct Result {
    std::vector<std::int64_t> positions;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(in.queries.size(), p.dpus);
    const std::uint64_t array_bytes = align_up(in.array.size() * 8, 8);
    const std::uint64_t qcap = align_up(parts[0].size() * 8, 8);
    set.broadcast<std::int64_t>(Category::cpu_to_dpu, 0, in.array);
    set.push(Category::cpu_to_dpu, array_bytes, slices<std::int64_t>(in.queries, parts));
    for (std::uint32_t d = 0; d < p.dpus; ++d)
        set[d].set_args(Args{in.array.size(), parts[d].size(), 0, array_bytes, array_bytes + qcap, p.tile_bytes});
    set.launch(kernel, p.tasklets, launch_options(p));
    std::vector<std::size_t> counts(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) counts[d] = parts[d].size();
    const auto out = set.pull<std::int64_t>(Category::dpu_to_cpu, array_bytes + qcap, counts);
    Result r;
    for (const auto& o : out) r.positions.insert(r.positions.end(), o.begin(), o.end());
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::bs
