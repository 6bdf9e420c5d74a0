#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Vector addition over int32, tiles assigned cyclically to tasklets.
namespace pim::prim::va {

struct Input {
    std::vector<std::int32_t> a, b;
};

inline Input generate(std::uint64_t n, std::uint64_t seed) {
    return {random_values<std::int32_t>(n, INT32_MIN, INT32_MAX, seed),
            random_values<std::int32_t>(n, INT32_MIN, INT32_MAX, seed + 0x5A5A)};
}

inline std::int32_t wrap_add(std::int32_t x, std::int32_t y) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(x) + static_cast<std::uint32_t>(y));
}

inline std::vector<std::int32_t> oracle(const Input& in) {
    std::vector<std::int32_t> c(in.a.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = wrap_add(in.a[i], in.b[i]);
    return c;
}

struct Args {
    std::uint64_t n;
    std::uint64_t a, b, c;
    std::uint32_t tile;
};

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t te = a.tile / 4;
    auto x = t.wram_alloc<std::int32_t>(te);
    auto y = t.wram_alloc<std::int32_t>(te);
    for (std::uint64_t first = t.id() * te; first < a.n; first += std::uint64_t{t.count()} * te) {
        const std::uint64_t len = std::min<std::uint64_t>(te, a.n - first);
        const std::uint32_t bytes = dma_bytes(len * 4);
        t.loop();
        co_await t.mram_read(a.a + first * 4, x.data(), bytes);
        co_await t.mram_read(a.b + first * 4, y.data(), bytes);
        for (std::uint64_t i = 0; i < len; ++i) x[i] = wrap_add(x[i], y[i]);
        t.wram_load(2 * len);
        t.charge(OpClass::add, DataType::int32, len);
        t.wram_store(len);
        t.loop(len);
        co_await t.mram_write(x.data(), a.c + first * 4, bytes);
    }
}

struct Result {
    std::vector<std::int32_t> c;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(in.a.size(), p.dpus, 2);
    const std::uint64_t cap = align_up(parts[0].size() * 4, 8);
    set.push(Category::cpu_to_dpu, 0, slices<std::int32_t>(in.a, parts, 2));
    set.push(Category::cpu_to_dpu, cap, slices<std::int32_t>(in.b, parts, 2));
    for (std::uint32_t d = 0; d < p.dpus; ++d) set[d].set_args(Args{parts[d].size(), 0, cap, 2 * cap, p.tile_bytes});
    set.launch(kernel, p.tasklets, launch_options(p));
    std::vector<std::size_t> counts(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) counts[d] = align_up(parts[d].size(), 2);
    const auto out = set.pull<std::int32_t>(Category::dpu_to_cpu, 2 * cap, counts);
    Result r;
    for (std::uint32_t d = 0; d < p.dpus; ++d) r.c.insert(r.c.end(), out[d].begin(), out[d].begin() + parts[d].size());
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::va
