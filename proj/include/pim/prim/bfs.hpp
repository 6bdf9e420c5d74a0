#pragma once

#include <limits>

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Top-down breadth-first search. Vertices are split into contiguous ranges, one per DPU. Each DPU keeps
// its own visited bit-vector; the host ORs the per-DPU next frontiers and broadcasts the union.
namespace pim::prim::bfs {

using Graph = Csr<std::uint8_t>;

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

inline Graph generate(std::uint32_t vertices, std::uint64_t seed) { return rmat(vertices, seed); }

inline Graph from_edges(std::uint32_t vertices, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    Graph g;
    g.rows = g.cols = vertices;
    g.row_ptr.assign(vertices + 1, 0);
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    for (auto [u, v] : sorted) ++g.row_ptr[u + 1];
    for (std::uint32_t i = 0; i < vertices; ++i) g.row_ptr[i + 1] += g.row_ptr[i];
    for (auto [u, v] : sorted) g.col_idx.push_back(v);
    return g;
}

// Queue-based reference.
inline std::vector<std::uint32_t> oracle(const Graph& g, std::uint32_t source) {
    std::vector<std::uint32_t> dist(g.rows, kUnreached);
    if (source >= g.rows) return dist;
    std::vector<std::uint32_t> queue{source};
    dist[source] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        const std::uint32_t u = queue[h];
        for (std::uint32_t e = g.row_ptr[u]; e < g.row_ptr[u + 1]; ++e)
            if (dist[g.col_idx[e]] == kUnreached) {
                dist[g.col_idx[e]] = dist[u] + 1;
                queue.push_back(g.col_idx[e]);
            }
    }
    return dist;
}

struct Args {
    std::uint32_t first_vertex, owned;
    std::uint32_t words;  // 64-bit words of a full bit-vector
    std::uint64_t ranges, cols, frontier, visited, next;
};

// Tasklet share of `words` words, in chunks of at most 2048 bytes.
inline Task copy_words(Tasklet& t, std::uint64_t mram, std::span<std::uint64_t> wram, bool to_wram) {
    const auto parts = even_partition(wram.size(), t.count());
    const Range r = parts[t.id()];
    for (std::uint64_t w = r.begin; w < r.end; w += 256) {
        const auto n = static_cast<std::uint32_t>(std::min<std::uint64_t>(256, r.end - w) * 8);
        t.loop();
        if (to_wram) co_await t.mram_read(mram + w * 8, wram.data() + w, n);
        else co_await t.mram_write(wram.data() + w, mram + w * 8, n);
    }
}

inline constexpr std::uint32_t kStreamWords = 32;

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t w_first = a.first_vertex / 64;
    const std::uint32_t w_last = static_cast<std::uint32_t>(ceil_div(std::uint64_t{a.first_vertex} + a.owned, 64));
    auto frontier = t.shared<std::uint64_t>("frontier", w_last - w_first);
    auto visited = t.shared<std::uint64_t>("visited", a.words);
    auto next = t.shared<std::uint64_t>("next", a.words);
    auto buf = t.wram_alloc<std::uint64_t>(kStreamWords);
    auto range = t.wram_alloc<std::uint32_t>(2);
    auto pair = t.wram_alloc<std::uint32_t>(2);
    co_await copy_words(t, a.frontier + std::uint64_t{w_first} * 8, frontier, true);
    co_await copy_words(t, a.visited, visited, true);
    {
        const Range r = even_partition(a.words, t.count())[t.id()];
        for (std::uint64_t w0 = r.begin; w0 < r.end; w0 += kStreamWords) {
            const std::uint64_t n = std::min<std::uint64_t>(kStreamWords, r.end - w0);
            t.loop();
            co_await t.mram_read(a.frontier + w0 * 8, buf.data(), static_cast<std::uint32_t>(n * 8));
            for (std::uint64_t i = 0; i < n; ++i) {
                visited[w0 + i] |= buf[i];
                next[w0 + i] = 0;
            }
        }
        t.wram_load(2 * r.size());
        t.charge(OpClass::bitwise, DataType::uint64, r.size());
        t.wram_store(2 * r.size());
        t.loop(r.size());
    }
    co_await t.barrier_wait();
    co_await copy_words(t, a.visited, visited, false);

    for (std::uint32_t w = w_first + t.id(); w < w_last; w += t.count()) {
        std::uint64_t bits = frontier[w - w_first];
        t.wram_load();
        t.loop();
        while (bits) {
            const auto b = static_cast<std::uint32_t>(std::countr_zero(bits));
            bits &= bits - 1;
            t.charge(OpClass::bitwise, DataType::uint64, 3);
            const std::uint32_t u = w * 64 + b;
            if (u < a.first_vertex || u >= a.first_vertex + a.owned) continue;
            co_await t.mram_read(a.ranges + std::uint64_t{u - a.first_vertex} * 8, range.data(), 8);
            const std::uint32_t begin = range[0], end = range[1];
            t.wram_load(2);
            for (std::uint32_t e = begin & ~1u; e < end; e += 2) {
                co_await t.mram_read(a.cols + std::uint64_t{e} * 4, pair.data(), 8);
                for (std::uint32_t k = 0; k < 2; ++k) {
                    if (e + k < begin || e + k >= end) continue;
                    const std::uint32_t v = pair[k];
                    t.wram_load(2);
                    t.charge(OpClass::bitwise, DataType::uint64, 2);
                    t.charge(OpClass::compare, DataType::int32);
                    t.charge(OpClass::branch, DataType::int32);
                    if (visited[v / 64] >> (v % 64) & 1) continue;
                    co_await t.mutex_lock();
                    next[v / 64] |= std::uint64_t{1} << (v % 64);
                    t.wram_load();
                    t.charge(OpClass::bitwise, DataType::uint64);
                    t.wram_store();
                    co_await t.mutex_unlock();
                }
                t.loop();
            }
        }
    }
    co_await t.barrier_wait();
    co_await copy_words(t, a.next, next, false);
}

struct Result {
    std::vector<std::uint32_t> dist;
    RunStats stats;
    std::uint32_t levels = 0;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Graph& g, std::uint32_t source = 0) {
    DpuSet set(sys, p.dpus, p.workers);
    const std::uint32_t V = g.rows;
    const auto words = static_cast<std::uint32_t>(ceil_div(V, 64));
    const auto parts = even_partition(V, p.dpus);
    std::uint64_t max_edges = 0;
    for (const auto& r : parts) max_edges = std::max<std::uint64_t>(max_edges, g.row_ptr[r.end] - g.row_ptr[r.begin]);
    const std::uint64_t ranges_at = 0;
    const std::uint64_t cols_at = align_up(parts[0].size() * 8, 8);
    const std::uint64_t frontier_at = cols_at + align_up(max_edges * 4 + 8, 8);
    const std::uint64_t visited_at = frontier_at + words * 8ull;
    const std::uint64_t next_at = visited_at + words * 8ull;

    std::vector<std::vector<std::uint32_t>> ranges(p.dpus), cols(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        const std::uint32_t base = g.row_ptr[parts[d].begin];
        for (std::uint64_t u = parts[d].begin; u < parts[d].end; ++u) {
            ranges[d].push_back(g.row_ptr[u] - base);
            ranges[d].push_back(g.row_ptr[u + 1] - base);
        }
        cols[d].assign(g.col_idx.begin() + base, g.col_idx.begin() + g.row_ptr[parts[d].end]);
        cols[d].resize(align_up(cols[d].size(), 2));
    }
    set.push(Category::cpu_to_dpu, ranges_at, ranges);
    set.push(Category::cpu_to_dpu, cols_at, cols, TransferMode::serial);
    const std::vector<std::uint64_t> zeros(words, 0);
    set.broadcast<std::uint64_t>(Category::cpu_to_dpu, visited_at, zeros);
    for (std::uint32_t d = 0; d < p.dpus; ++d)
        set[d].set_args(Args{static_cast<std::uint32_t>(parts[d].begin), static_cast<std::uint32_t>(parts[d].size()), words,
                             ranges_at, cols_at, frontier_at, visited_at, next_at});

    Result r;
    r.dist.assign(V, kUnreached);
    if (source >= V) {
        r.stats.absorb(set);
        return r;
    }
    std::vector<std::uint64_t> frontier(words, 0), visited(words, 0);
    frontier[source / 64] |= std::uint64_t{1} << (source % 64);
    r.dist[source] = 0;
    for (std::uint32_t level = 1;; ++level) {
        set.broadcast<std::uint64_t>(level == 1 ? Category::cpu_to_dpu : Category::inter_dpu, frontier_at, frontier);
        set.launch(kernel, p.tasklets, launch_options(p));
        ++r.levels;
        const auto nexts = set.pull<std::uint64_t>(Category::inter_dpu, next_at, std::vector<std::size_t>(p.dpus, words));
        bool any = false;
        for (std::uint32_t w = 0; w < words; ++w) {
            visited[w] |= frontier[w];
            std::uint64_t u = 0;
            for (const auto& n : nexts) u |= n[w];
            frontier[w] = u & ~visited[w];
            for (std::uint64_t bits = frontier[w]; bits; bits &= bits - 1)
                r.dist[w * 64 + std::countr_zero(bits)] = level;
            any = any || frontier[w] != 0;
        }
        set.host_compute(Category::inter_dpu, static_cast<double>(words) * (p.dpus + 2));
        if (!any) break;
    }
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::bfs
