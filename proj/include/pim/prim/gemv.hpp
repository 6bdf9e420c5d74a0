#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Matrix-vector product over uint32 with wraparound. Each DPU owns consecutive rows; inside a DPU each
// tasklet owns a contiguous group of rows and writes its results to its own 8-byte aligned slot.
namespace pim::prim::gemv {

struct Input {
    std::uint32_t rows = 0, cols = 0;
    std::vector<std::uint32_t> matrix;  // row-major
    std::vector<std::uint32_t> x;
};

inline Input generate(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed) {
    return {rows, cols, random_values<std::uint32_t>(std::size_t{rows} * cols, 0, 0xFFFFFFFF, seed),
            random_values<std::uint32_t>(cols, 0, 0xFFFFFFFF, seed + 17)};
}

inline std::vector<std::uint32_t> oracle(const Input& in) {
    std::vector<std::uint32_t> y(in.rows, 0);
    for (std::uint32_t r = 0; r < in.rows; ++r)
        for (std::uint32_t c = 0; c < in.cols; ++c) y[r] += in.matrix[std::size_t{r} * in.cols + c] * in.x[c];
    return y;
}

inline std::uint32_t relu(std::uint32_t v) { return static_cast<std::int32_t>(v) < 0 ? 0 : v; }

struct Args {
    std::uint32_t rows;      // rows on this DPU
    std::uint32_t cols;      // padded to even
    std::uint64_t matrix, x, out;
    std::uint32_t tile;
    bool relu;
};

inline constexpr std::uint64_t kOutChunkBytes = 1024;

// Rows per tasklet and the byte size of each tasklet's output slot.
inline std::uint32_t rows_per_tasklet(std::uint32_t rows, unsigned tasklets) {
    return static_cast<std::uint32_t>(ceil_div(rows, tasklets));
}
inline std::uint64_t slot_bytes(std::uint32_t rows, unsigned tasklets) {
    return align_up(std::uint64_t{rows_per_tasklet(rows, tasklets)} * 4, 8);
}

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t rpt = rows_per_tasklet(a.rows, t.count());
    const std::uint32_t first = std::min(a.rows, t.id() * rpt);
    const std::uint32_t last = std::min(a.rows, first + rpt);
    const std::uint32_t te = std::min<std::uint32_t>(a.tile / 4, a.cols);
    auto mt = t.wram_alloc<std::uint32_t>(te);
    auto xt = t.wram_alloc<std::uint32_t>(te);
    const std::uint64_t slot = slot_bytes(a.rows, t.count());
    auto out = t.wram_alloc<std::uint32_t>(std::min<std::uint64_t>(slot, kOutChunkBytes) / 4);
    std::uint32_t flushed = first;
    for (std::uint32_t r = first; r < last; ++r) {
        std::uint32_t acc = 0;
        for (std::uint32_t c = 0; c < a.cols; c += te) {
            const std::uint32_t len = std::min(te, a.cols - c);
            const std::uint32_t bytes = dma_bytes(len * 4ull);
            t.loop();
            co_await t.mram_read(a.matrix + (std::uint64_t{r} * a.cols + c) * 4, mt.data(), bytes);
            co_await t.mram_read(a.x + std::uint64_t{c} * 4, xt.data(), bytes);
            for (std::uint32_t i = 0; i < len; ++i) acc += mt[i] * xt[i];
            t.wram_load(2ull * len);
            t.charge(OpClass::mul, DataType::uint32, len);
            t.charge(OpClass::add, DataType::uint32, len);
            t.loop(len);
        }
        if (a.relu) {
            acc = relu(acc);
            t.charge(OpClass::compare, DataType::int32);
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

// One distributed matrix-vector product on an existing DPU set; used by GEMV and by every MLP layer.
// The matrix has `rows` rows of `cols` entries; x has `cols` entries.
inline std::vector<std::uint32_t> distributed_layer(DpuSet& set, const BenchParams& p, std::span<const std::uint32_t> matrix,
                                                    std::uint32_t rows, std::uint32_t cols, std::span<const std::uint32_t> x,
                                                    bool relu_out, Category weights_cat, Category input_cat,
                                                    Category output_cat) {
    const std::uint32_t d_count = set.size();
    const std::uint32_t cols_p = static_cast<std::uint32_t>(align_up(cols, 2));
    const auto parts = block_partition(rows, d_count);
    const auto rows_d = static_cast<std::uint32_t>(parts[0].size());
    const std::uint64_t matrix_bytes = align_up(std::uint64_t{rows_d} * cols_p * 4, 8);
    const std::uint64_t x_at = matrix_bytes;
    const std::uint64_t out_at = x_at + std::uint64_t{cols_p} * 4;

    std::vector<std::vector<std::uint32_t>> blocks(d_count);
    for (std::uint32_t d = 0; d < d_count; ++d) {
        auto& b = blocks[d];
        b.assign(parts[d].size() * cols_p, 0);
        for (std::uint64_t r = parts[d].begin; r < parts[d].end; ++r)
            std::copy_n(matrix.begin() + r * cols, cols, b.begin() + (r - parts[d].begin) * cols_p);
    }
    set.push(weights_cat, 0, blocks);
    std::vector<std::uint32_t> xp(x.begin(), x.end());
    xp.resize(cols_p, 0);
    set.broadcast<std::uint32_t>(input_cat, x_at, xp);
    for (std::uint32_t d = 0; d < d_count; ++d)
        set[d].set_args(Args{static_cast<std::uint32_t>(parts[d].size()), cols_p, 0, x_at, out_at, p.tile_bytes, relu_out});
    set.launch(kernel, p.tasklets, launch_options(p));

    const std::uint64_t slot = slot_bytes(rows_d, p.tasklets);
    std::vector<std::size_t> counts(d_count, p.tasklets * slot / 4);
    for (std::uint32_t d = 0; d < d_count; ++d)
        if (parts[d].size() == 0) counts[d] = 0;
    const auto raw = set.pull<std::uint32_t>(output_cat, out_at, counts);
    std::vector<std::uint32_t> y;
    y.reserve(rows);
    for (std::uint32_t d = 0; d < d_count; ++d) {
        const auto n = static_cast<std::uint32_t>(parts[d].size());
        const std::uint32_t rpt = rows_per_tasklet(n, p.tasklets);
        const std::uint64_t dslot = slot_bytes(n, p.tasklets);
        for (std::uint32_t r = 0; r < n; ++r) y.push_back(raw[d][(r / rpt) * dslot / 4 + r % rpt]);
    }
    return y;
}

struct Result {
    std::vector<std::uint32_t> y;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    DpuSet set(sys, p.dpus, p.workers);
    Result r;
    r.y = distributed_layer(set, p, in.matrix, in.rows, in.cols, in.x, false, Category::cpu_to_dpu, Category::cpu_to_dpu,
                            Category::dpu_to_cpu);
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::gemv
