#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// In-place transposition of an M x N int64 matrix factored as M' x m x N' x n. Step 1 scatters
// n-element tiles from the host, step 2 transposes m x n tiles per tasklet, step 3 follows the
// permutation cycles of the M' x n array of m-element tiles under a mutex-guarded flag array.
namespace pim::prim::trns {

struct Shape {
    std::uint32_t mp, m, np, n;  // M', m, N', n
    std::uint64_t rows() const { return std::uint64_t{mp} * m; }
    std::uint64_t cols() const { return std::uint64_t{np} * n; }
};

struct Input {
    Shape shape;
    std::vector<std::int64_t> a;  // rows() x cols(), row-major
};

inline Input generate(Shape s, std::uint64_t seed) {
    return {s, random_values<std::int64_t>(s.rows() * s.cols(), INT64_MIN, INT64_MAX, seed)};
}

inline std::vector<std::int64_t> oracle(const Input& in) {
    const std::uint64_t r = in.shape.rows(), c = in.shape.cols();
    std::vector<std::int64_t> t(in.a.size());
    for (std::uint64_t i = 0; i < r; ++i)
        for (std::uint64_t j = 0; j < c; ++j) t[j * r + i] = in.a[i * c + j];
    return t;
}

struct Args {
    Shape shape;
    std::uint32_t slices;  // local column groups, each M x n at slice * M * n
};

inline std::uint64_t slice_bytes(const Shape& s) { return s.rows() * s.n * 8; }

// Step 2: M' tiles of m x n per slice become n x m.
inline Task tile_kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const Shape& s = a.shape;
    const std::uint64_t te = std::uint64_t{s.m} * s.n;
    auto src = t.wram_alloc<std::int64_t>(te);
    auto dst = t.wram_alloc<std::int64_t>(te);
    const std::uint64_t tiles = std::uint64_t{a.slices} * s.mp;
    for (std::uint64_t k = t.id(); k < tiles; k += t.count()) {
        const std::uint64_t addr = k * te * 8;
        t.loop();
        for (std::uint64_t off = 0; off < te * 8; off += 2048)
            co_await t.mram_read(addr + off, src.data() + off / 8, static_cast<std::uint32_t>(std::min<std::uint64_t>(2048, te * 8 - off)));
        for (std::uint32_t i = 0; i < s.m; ++i)
            for (std::uint32_t j = 0; j < s.n; ++j) dst[std::uint64_t{j} * s.m + i] = src[std::uint64_t{i} * s.n + j];
        t.wram_load(te);
        t.charge(OpClass::address_calc, DataType::int32, 2 * te);
        t.wram_store(te);
        t.loop(te + s.m);
        for (std::uint64_t off = 0; off < te * 8; off += 2048)
            co_await t.mram_write(dst.data() + off / 8, addr + off, static_cast<std::uint32_t>(std::min<std::uint64_t>(2048, te * 8 - off)));
    }
}

// Claims position p; the original tile is read while the claim is held so no writer can overtake it.
inline Task claim(Tasklet& t, std::span<std::uint8_t> done, std::uint64_t p, std::uint64_t addr,
                  std::span<std::int64_t> into, bool& fresh) {
    co_await t.mutex_lock();
    fresh = !done[p];
    t.wram_load();
    t.charge(OpClass::branch, DataType::int32);
    if (fresh) {
        done[p] = 1;
        t.wram_store();
        co_await t.mram_read(addr, into.data(), static_cast<std::uint32_t>(into.size_bytes()));
    }
    co_await t.mutex_unlock();
}

// Step 3: per slice, the M' x n array of m-element tiles becomes n x M'.
inline Task cycle_kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const Shape& s = a.shape;
    const std::uint64_t count = std::uint64_t{s.mp} * s.n, tile = std::uint64_t{s.m} * 8;
    auto done = t.shared<std::uint8_t>("done", align_up(count, 8));
    auto cur = t.wram_alloc<std::int64_t>(s.m);
    auto next = t.wram_alloc<std::int64_t>(s.m);
    for (std::uint32_t q = 0; q < a.slices; ++q) {
        const std::uint64_t base = q * slice_bytes(s);
        const Range mine = even_partition(count, t.count())[t.id()];
        std::fill(done.begin() + mine.begin, done.begin() + mine.end, std::uint8_t{0});
        t.wram_store(mine.size());
        t.loop(mine.size());
        co_await t.barrier_wait();
        for (std::uint64_t start = t.id(); start < count; start += t.count()) {
            t.loop();
            bool fresh = false;
            co_await claim(t, done, start, base + start * tile, cur, fresh);
            if (!fresh) continue;
            std::uint64_t p = start;
            while (true) {
                const std::uint64_t to = (p % s.n) * s.mp + p / s.n;
                t.charge(OpClass::div, DataType::uint32, 2);
                t.charge(OpClass::mul, DataType::uint32);
                t.charge(OpClass::add, DataType::uint32);
                t.loop();
                if (to == start) {
                    co_await t.mram_write(cur.data(), base + to * tile, static_cast<std::uint32_t>(tile));
                    break;
                }
                co_await claim(t, done, to, base + to * tile, next, fresh);
                co_await t.mram_write(cur.data(), base + to * tile, static_cast<std::uint32_t>(tile));
                if (!fresh) break;
                std::swap_ranges(cur.begin(), cur.end(), next.begin());
                t.wram_load(s.m);
                t.wram_store(s.m);
                p = to;
            }
        }
        co_await t.barrier_wait();
    }
}

struct Result {
    std::vector<std::int64_t> t;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    const Shape& s = in.shape;
    if (s.m == 0 || s.n == 0 || (s.m * 8ull) % 8 != 0) throw std::invalid_argument("TRNS tile sizes must be nonzero");
    if (std::uint64_t{s.m} * s.n * 8 > 2048 * 4) throw CapacityError("TRNS m x n tile exceeds 8 KB of WRAM");
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = block_partition(s.np, p.dpus);
    const std::uint64_t rows = s.rows(), cols = s.cols(), sb = slice_bytes(s);
    std::uint64_t max_local = 0;
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        max_local = std::max(max_local, parts[d].size());
        std::vector<std::int64_t> buf(rows * s.n);
        for (std::uint64_t q = 0; q < parts[d].size(); ++q) {
            const std::uint64_t jp = parts[d].begin + q;
            for (std::uint64_t i = 0; i < rows; ++i)
                std::copy_n(in.a.begin() + i * cols + jp * s.n, s.n, buf.begin() + i * s.n);
            set[d].write<std::int64_t>(q * sb, buf);
        }
        set[d].set_args(Args{s, static_cast<std::uint32_t>(parts[d].size())});
    }
    // Step 1: one parallel n-element transfer per (row, local column group).
    for (std::uint64_t q = 0; q < max_local; ++q) {
        std::vector<std::uint64_t> sizes(p.dpus, 0);
        for (std::uint32_t d = 0; d < p.dpus; ++d)
            if (q < parts[d].size()) sizes[d] = s.n * 8ull;
        set.charge_transfer(Category::cpu_to_dpu, TransferMode::parallel, TransferDirection::cpu_to_dpu, sizes, rows);
    }
    set.launch(tile_kernel, p.tasklets, launch_options(p));
    set.launch(cycle_kernel, p.tasklets, launch_options(p));

    std::vector<std::size_t> counts(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) counts[d] = parts[d].size() * rows * s.n;
    const auto out = set.pull<std::int64_t>(Category::dpu_to_cpu, 0, counts);
    Result r;
    r.t.reserve(in.a.size());
    for (const auto& o : out) r.t.insert(r.t.end(), o.begin(), o.end());
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::trns
