#pragma once

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Needleman-Wunsch global alignment score matrix. Large blocks on the same anti-diagonal run in
// parallel across DPUs; inside a block, tasklets sweep sub-block anti-diagonals separated by barriers.
// The host exchanges block boundaries between diagonals.
namespace pim::prim::nw {

struct Penalties {
    std::int32_t match = 0;
    std::int32_t mismatch = -1;
    std::int32_t gap = -1;
};

struct Input {
    std::vector<std::uint8_t> a, b;
    Penalties pen;
};

inline Input generate(std::uint64_t len, std::uint64_t seed) { return {dna(len, seed), dna(len, seed + 17), {}}; }

// Row-major (|a|+1) x (|b|+1).
struct Matrix {
    std::uint32_t rows = 0, cols = 0;
    std::vector<std::int32_t> cells;
    std::int32_t at(std::uint32_t i, std::uint32_t j) const { return cells[std::uint64_t{i} * cols + j]; }
    std::int32_t& at(std::uint32_t i, std::uint32_t j) { return cells[std::uint64_t{i} * cols + j]; }
    std::int32_t score() const { return cells.back(); }
    friend bool operator==(const Matrix&, const Matrix&) = default;
};

inline std::int32_t cell(std::int32_t diag, std::int32_t up, std::int32_t left, bool same, const Penalties& p) {
    return std::max({diag + (same ? p.match : p.mismatch), up + p.gap, left + p.gap});
}

inline Matrix oracle(const Input& in) {
    Matrix m{static_cast<std::uint32_t>(in.a.size() + 1), static_cast<std::uint32_t>(in.b.size() + 1), {}};
    m.cells.assign(std::uint64_t{m.rows} * m.cols, 0);
    for (std::uint32_t i = 0; i < m.rows; ++i) m.at(i, 0) = static_cast<std::int32_t>(i) * in.pen.gap;
    for (std::uint32_t j = 0; j < m.cols; ++j) m.at(0, j) = static_cast<std::int32_t>(j) * in.pen.gap;
    for (std::uint32_t i = 1; i < m.rows; ++i)
        for (std::uint32_t j = 1; j < m.cols; ++j)
            m.at(i, j) = cell(m.at(i - 1, j - 1), m.at(i - 1, j), m.at(i, j - 1), in.a[i - 1] == in.b[j - 1], in.pen);
    return m;
}

inline constexpr std::uint32_t kSub = 8;

// One large block: rows (row0, row0 + rows] and columns (col0, col0 + cols] of the score matrix.
// Block-local matrix rows store column j at word j + 1 so that sub-block rows start 8-byte aligned;
// edge column k (cells at local column k * kSub) stores row i at word i + 1.
struct Block {
    std::uint32_t row0, col0, rows, cols;
    std::uint64_t base;  // MRAM slot
};

struct Layout {
    std::uint32_t block;
    std::uint64_t pitch, edge_pitch, edges_at, slot_bytes;

    explicit Layout(std::uint32_t b) : block(b) {
        pitch = align_up((b + 3ull) * 4, 8);
        edge_pitch = pitch;
        edges_at = (b + 1ull) * pitch;
        slot_bytes = edges_at + (ceil_div(b, kSub) + 1) * edge_pitch;
    }
    std::uint64_t cell(const Block& k, std::uint32_t i, std::uint32_t j) const { return k.base + i * pitch + (j + 1ull) * 4; }
    std::uint64_t edge(const Block& k, std::uint32_t c, std::uint32_t i) const {
        return k.base + edges_at + c * edge_pitch + (i + 1ull) * 4;
    }
};

struct Args {
    std::uint64_t a, b;
    std::uint32_t block;
    Penalties pen;
    std::vector<Block> blocks;
};

inline Task read_words(Tasklet& t, std::uint64_t addr, std::span<std::int32_t> buf, std::uint32_t n,
                       std::int32_t* out) {
    const std::uint64_t lo = align_down(addr, 8);
    const auto bytes = static_cast<std::uint32_t>(align_up(addr + n * 4ull, 8) - lo);
    co_await t.mram_read(lo, buf.data(), bytes);
    const auto skip = static_cast<std::uint32_t>((addr - lo) / 4);
    std::copy_n(buf.begin() + skip, n, out);
}

inline Task sub_block(Tasklet& t, const Args& a, const Layout& lay, const Block& k, std::uint32_t r, std::uint32_t c,
                      std::span<std::int32_t> buf, std::span<std::int32_t> tile, std::span<std::uint8_t> seq) {
    const std::uint32_t i0 = r * kSub, j0 = c * kSub;
    const std::uint32_t h = std::min(kSub, k.rows - i0), w = std::min(kSub, k.cols - j0);
    const std::uint32_t stride = kSub + 1;
    // tile[0][*] is the row above, tile[*][0] the column to the left.
    co_await read_words(t, lay.cell(k, i0, j0 + 1), buf, w, &tile[1]);
    if (r == 0) co_await read_words(t, lay.cell(k, 0, j0), buf, 1, &tile[0]);
    else co_await read_words(t, lay.edge(k, c, i0), buf, 1, &tile[0]);
    co_await read_words(t, lay.edge(k, c, i0 + 1), buf, h, buf.data() + 2 * kSub);
    for (std::uint32_t i = 0; i < h; ++i) tile[(i + 1) * stride] = buf[2 * kSub + i];

    const std::uint64_t ra = align_down(k.row0 + i0, 8), rb = align_down(k.col0 + j0, 8);
    co_await t.mram_read(a.a + ra, seq.data(), static_cast<std::uint32_t>(align_up(k.row0 + i0 + h - ra, 8)));
    co_await t.mram_read(a.b + rb, seq.data() + 24, static_cast<std::uint32_t>(align_up(k.col0 + j0 + w - rb, 8)));
    const std::uint8_t* sa = seq.data() + (k.row0 + i0 - ra);
    const std::uint8_t* sb = seq.data() + 24 + (k.col0 + j0 - rb);
    for (std::uint32_t i = 1; i <= h; ++i)
        for (std::uint32_t j = 1; j <= w; ++j)
            tile[i * stride + j] = cell(tile[(i - 1) * stride + j - 1], tile[(i - 1) * stride + j], tile[i * stride + j - 1],
                                        sa[i - 1] == sb[j - 1], a.pen);
    const std::uint64_t cells = std::uint64_t{h} * w;
    t.wram_load(5 * cells);
    t.charge(OpClass::compare, DataType::int32, 3 * cells);
    t.charge(OpClass::add, DataType::int32, 3 * cells);
    t.charge(OpClass::address_calc, DataType::int32, cells);
    t.wram_store(cells);
    t.loop(cells + h);

    for (std::uint32_t i = 1; i <= h; ++i) {
        std::copy_n(&tile[i * stride + 1], w, buf.data());
        co_await t.mram_write(buf.data(), lay.cell(k, i0 + i, j0 + 1), dma_bytes(w * 4ull));
    }
    for (std::uint32_t i = 1; i <= h; ++i) buf[i - 1] = tile[i * stride + w];
    t.wram_load(h);
    t.wram_store(h);
    co_await t.mram_write(buf.data(), lay.edge(k, c + 1, i0 + 1), dma_bytes(h * 4ull));
}

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const Layout lay(a.block);
    auto buf = t.wram_alloc<std::int32_t>(4 * kSub);
    auto tile = t.wram_alloc<std::int32_t>((kSub + 1) * (kSub + 1) + 1);
    auto seq = t.wram_alloc<std::uint8_t>(48);
    for (const Block& k : a.blocks) {
        const auto nr = static_cast<std::uint32_t>(ceil_div(k.rows, kSub));
        const auto nc = static_cast<std::uint32_t>(ceil_div(k.cols, kSub));
        for (std::uint32_t d = 0; d + 1 < nr + nc; ++d) {
            const std::uint32_t r_lo = d + 1 > nc ? d + 1 - nc : 0, r_hi = std::min(d, nr - 1);
            for (std::uint32_t r = r_lo + t.id(); r <= r_hi; r += t.count()) {
                t.loop();
                co_await sub_block(t, a, lay, k, r, d - r, buf, tile, seq);
            }
            co_await t.barrier_wait();
        }
    }
}

struct Result {
    Matrix matrix;
    RunStats stats;
    std::uint32_t diagonals = 0;
};

// `block` of 0 splits each sequence into as many blocks as there are DPUs.
inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in, std::uint32_t block = 0) {
    const auto la = static_cast<std::uint32_t>(in.a.size()), lb = static_cast<std::uint32_t>(in.b.size());
    Result r;
    r.matrix.rows = la + 1;
    r.matrix.cols = lb + 1;
    r.matrix.cells.assign(std::uint64_t{r.matrix.rows} * r.matrix.cols, 0);
    auto& m = r.matrix;
    for (std::uint32_t i = 0; i <= la; ++i) m.at(i, 0) = static_cast<std::int32_t>(i) * in.pen.gap;
    for (std::uint32_t j = 0; j <= lb; ++j) m.at(0, j) = static_cast<std::int32_t>(j) * in.pen.gap;
    DpuSet set(sys, p.dpus, p.workers);
    if (la == 0 || lb == 0) {
        r.stats.absorb(set);
        return r;
    }
    if (block == 0) block = static_cast<std::uint32_t>(std::max<std::uint64_t>(kSub, ceil_div(std::max(la, lb), p.dpus)));
    block = static_cast<std::uint32_t>(align_up(block, 2));
    const Layout lay(block);
    const auto nbr = static_cast<std::uint32_t>(ceil_div(la, block)), nbc = static_cast<std::uint32_t>(ceil_div(lb, block));
    const std::uint64_t seq_a = 0, seq_b = align_up(la, 8), slots_at = seq_b + align_up(lb, 8);

    std::vector<std::uint8_t> pa = in.a, pb = in.b;
    set.broadcast<std::uint8_t>(Category::cpu_to_dpu, seq_a, pa);
    set.broadcast<std::uint8_t>(Category::cpu_to_dpu, seq_b, pb);

    const std::uint32_t diagonals = nbr + nbc - 1;
    std::uint64_t longest = 0, longest_blocks = 0;
    for (std::uint32_t k = 0; k < diagonals; ++k) {
        const std::uint32_t bi_lo = k + 1 > nbc ? k + 1 - nbc : 0, bi_hi = std::min(k, nbr - 1);
        const std::uint32_t count = bi_hi - bi_lo + 1;
        const auto parts = block_partition(count, p.dpus);
        std::vector<std::vector<Block>> assigned(p.dpus);
        std::vector<std::uint64_t> in_bytes(p.dpus, 0), out_bytes(p.dpus, 0);
        for (std::uint32_t d = 0; d < p.dpus; ++d) {
            for (std::uint64_t q = parts[d].begin; q < parts[d].end; ++q) {
                const auto bi = static_cast<std::uint32_t>(bi_lo + q), bj = k - bi;
                Block b{bi * block, bj * block, std::min(block, la - bi * block), std::min(block, lb - bj * block),
                        slots_at + (q - parts[d].begin) * lay.slot_bytes};
                // Top boundary row (with corner) and left boundary column (with corner).
                std::vector<std::int32_t> top(b.cols + 2, 0), left(b.rows + 2, 0);
                for (std::uint32_t j = 0; j <= b.cols; ++j) top[j + 1] = m.at(b.row0, b.col0 + j);
                for (std::uint32_t i = 0; i <= b.rows; ++i) left[i + 1] = m.at(b.row0 + i, b.col0);
                top.resize(align_up(top.size(), 2));
                left.resize(align_up(left.size(), 2));
                set[d].copy_to_mram(b.base, std::as_bytes(std::span(top)));
                set[d].copy_to_mram(b.base + lay.edges_at, std::as_bytes(std::span(left)));
                in_bytes[d] += (top.size() + left.size()) * 4;
                out_bytes[d] += (b.rows + 1ull) * lay.pitch;
                assigned[d].push_back(b);
            }
            set[d].set_args(Args{seq_a, seq_b, block, in.pen, assigned[d]});
        }
        set.charge_transfer(Category::inter_dpu, TransferMode::parallel, TransferDirection::cpu_to_dpu, in_bytes);
        set.launch(kernel, p.tasklets, launch_options(p));
        if (count > longest_blocks) {
            longest_blocks = count;
            longest = set.launch_cycles().back();
        }
        for (std::uint32_t d = 0; d < p.dpus; ++d)
            for (const Block& b : assigned[d]) {
                std::vector<std::int32_t> rows((b.rows + 1ull) * lay.pitch / 4);
                set[d].copy_from_mram(b.base, std::as_writable_bytes(std::span(rows)));
                for (std::uint32_t i = 1; i <= b.rows; ++i)
                    for (std::uint32_t j = 1; j <= b.cols; ++j)
                        m.at(b.row0 + i, b.col0 + j) = rows[i * lay.pitch / 4 + j + 1];
            }
        const Category back = k + 1 == diagonals ? Category::dpu_to_cpu : Category::inter_dpu;
        set.charge_transfer(back, TransferMode::parallel, TransferDirection::dpu_to_cpu, out_bytes);
        std::uint64_t edge_cells = 0;
        for (const auto& bl : assigned)
            for (const Block& b : bl) edge_cells += b.rows + b.cols;
        set.host_compute(back, edge_cells);
    }
    r.diagonals = diagonals;
    r.stats.absorb(set);
    r.stats.detail["block"] = block;
    r.stats.detail["diagonals"] = diagonals;
    r.stats.detail["longest_diagonal_cycles"] = static_cast<double>(longest);
    return r;
}

}  // namespace pim::prim::nw
