#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Sparse matrix-vector product on CSR float32. Rows are split evenly across DPUs and tasklets; the
// input vector is replicated and read one 8-byte DMA per nonzero.
namespace pim::prim::spmv {

struct Input {
    Csr<float> matrix;
    std::vector<float> x;
};

inline constexpr double kDensity = 0.00244;

inline Input generate(std::uint32_t n, std::uint64_t seed, double density = kDensity) {
    Input in{banded_sparse(n, density, seed), {}};
    Rng r(seed + 5);
    in.x.resize(n);
    for (auto& v : in.x) v = static_cast<float>(r.uniform(-512, 512)) / 64.0f;
    return in;
}

// Dense expansion, accumulated in column order.
inline std::vector<float> oracle(const Input& in) {
    const auto& m = in.matrix;
    std::vector<float> y(m.rows, 0.0f), dense(m.cols);
    for (std::uint32_t r = 0; r < m.rows; ++r) {
        std::fill(dense.begin(), dense.end(), 0.0f);
        for (std::uint32_t e = m.row_ptr[r]; e < m.row_ptr[r + 1]; ++e) dense[m.col_idx[e]] = m.values[e];
        float acc = 0.0f;
        for (std::uint32_t c = 0; c < m.cols; ++c)
            if (dense[c] != 0.0f) acc += dense[c] * in.x[c];
        y[r] = acc;
    }
    return y;
}

struct Entry {
    std::uint32_t col;
    float value;
};

struct Args {
    std::uint32_t rows;
    std::uint64_t ranges, entries, x, out;
    std::uint32_t chunk;  // bytes per nonzero read
};

inline std::uint32_t rows_per_tasklet(std::uint32_t rows, unsigned tasklets) {
    return static_cast<std::uint32_t>(ceil_div(rows, tasklets));
}
inline std::uint64_t slot_bytes(std::uint32_t rows, unsigned tasklets) {
    return align_up(std::uint64_t{rows_per_tasklet(rows, tasklets)} * 4, 8);
}

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t rpt = rows_per_tasklet(a.rows, t.count());
    const std::uint32_t first = std::min(a.rows, t.id() * rpt), last = std::min(a.rows, first + rpt);
    const std::uint32_t per_read = std::max<std::uint32_t>(1, a.chunk / 8);
    auto range = t.wram_alloc<std::uint32_t>(2);
    auto ent = t.wram_alloc<Entry>(per_read);
    auto xv = t.wram_alloc<float>(2);
    const std::uint64_t slot = slot_bytes(a.rows, t.count());
    auto out = t.wram_alloc<float>(std::min<std::uint64_t>(slot, 1024) / 4);
    std::uint32_t flushed = first;
    for (std::uint32_t r = first; r < last; ++r) {
        co_await t.mram_read(a.ranges + std::uint64_t{r} * 8, range.data(), 8);
        t.wram_load(2);
        float acc = 0.0f;
        for (std::uint32_t e = range[0]; e < range[1]; e += per_read) {
            const std::uint32_t n = std::min(per_read, range[1] - e);
            t.loop();
            co_await t.mram_read(a.entries + std::uint64_t{e} * 8, ent.data(), n * 8);
            for (std::uint32_t k = 0; k < n; ++k) {
                const std::uint32_t c = ent[k].col;
                co_await t.mram_read(a.x + align_down(std::uint64_t{c} * 4, 8), xv.data(), 8);
                acc += ent[k].value * xv[c % 2];
                t.wram_load(3);
                t.charge(OpClass::address_calc, DataType::int32);
                t.charge(OpClass::mul, DataType::float32);
                t.charge(OpClass::add, DataType::float32);
                t.loop();
            }
        }
        out[r - flushed] = acc;
        t.wram_store();
        t.loop();
        if (r + 1 - flushed == out.size() || r + 1 == last) {
            co_await t.mram_write(out.data(), a.out + t.id() * slot + (flushed - first) * 4ull, dma_bytes((r + 1 - flushed) * 4ull));
            flushed = r + 1;
        }
    }
}

struct Result {
    std::vector<float> y;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    const auto& m = in.matrix;
    DpuSet set(sys, p.dpus, p.workers);
    const auto parts = even_partition(m.rows, p.dpus);
    std::uint64_t max_nnz = 0;
    for (const auto& r : parts) max_nnz = std::max<std::uint64_t>(max_nnz, m.row_ptr[r.end] - m.row_ptr[r.begin]);
    const std::uint64_t ranges_at = 0;
    const std::uint64_t entries_at = align_up(parts[0].size() * 8, 8);
    const std::uint64_t x_at = entries_at + max_nnz * 8;
    const std::uint64_t out_at = x_at + align_up(m.cols * 4ull, 8);

    std::vector<std::vector<std::uint32_t>> ranges(p.dpus);
    std::vector<std::vector<Entry>> entries(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        const std::uint32_t base = m.row_ptr[parts[d].begin];
        for (std::uint64_t r = parts[d].begin; r < parts[d].end; ++r) {
            ranges[d].push_back(m.row_ptr[r] - base);
            ranges[d].push_back(m.row_ptr[r + 1] - base);
        }
        for (std::uint32_t e = base; e < m.row_ptr[parts[d].end]; ++e) entries[d].push_back({m.col_idx[e], m.values[e]});
    }
    set.push(Category::cpu_to_dpu, ranges_at, ranges);
    set.push(Category::cpu_to_dpu, entries_at, entries, TransferMode::serial);
    std::vector<float> x = in.x;
    x.resize(align_up(x.size(), 2), 0.0f);
    set.broadcast<float>(Category::cpu_to_dpu, x_at, x);
    for (std::uint32_t d = 0; d < p.dpus; ++d)
        set[d].set_args(Args{static_cast<std::uint32_t>(parts[d].size()), ranges_at, entries_at, x_at, out_at, 64});
    set.launch(kernel, p.tasklets, launch_options(p));

    std::vector<std::size_t> counts(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d)
        counts[d] = parts[d].size() ? p.tasklets * slot_bytes(static_cast<std::uint32_t>(parts[d].size()), p.tasklets) / 4 : 0;
    const auto raw = set.pull<float>(Category::dpu_to_cpu, out_at, counts, TransferMode::serial);
    Result r;
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        const auto n = static_cast<std::uint32_t>(parts[d].size());
        const std::uint32_t rpt = rows_per_tasklet(n, p.tasklets);
        const std::uint64_t slot = slot_bytes(n, p.tasklets);
        for (std::uint32_t i = 0; i < n; ++i) r.y.push_back(raw[d][(i / rpt) * slot / 4 + i % rpt]);
    }
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::spmv
