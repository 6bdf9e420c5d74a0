#pragma once

#include <limits>

#include "pim/prim/common.hpp"
#include "pim/prim/datasets.hpp"

// Time series similarity: minimum z-normalized Euclidean distance between a query and every window of
// an int32 series. Dot products and window sums are exact integers; the distance is computed in double.
namespace pim::prim::ts {

struct Input {
    std::vector<std::int32_t> series;
    std::vector<std::int32_t> query;
};

struct Match {
    double distance = std::numeric_limits<double>::infinity();
    std::int64_t index = -1;
    friend bool operator==(const Match&, const Match&) = default;
};

inline Input generate(std::uint64_t n, std::uint32_t m, std::uint64_t seed) {
    Input in;
    Rng r(seed);
    in.series.resize(n);
    std::int32_t level = 0;
    for (auto& x : in.series) {
        level = std::clamp<std::int32_t>(level + static_cast<std::int32_t>(r.uniform(-4, 4)), -400, 400);
        x = level + static_cast<std::int32_t>(r.uniform(-20, 20));
    }
    in.query = random_values<std::int32_t>(m, -200, 200, seed + 3);
    return in;
}

struct Stats {
    std::int64_t sum = 0;
    std::int64_t sumsq = 0;
};

// Shared by kernel and oracle so both evaluate the identical expression.
inline double z_distance(std::int64_t dot, Stats w, Stats q, std::uint32_t m) {
    const double md = m;
    const double mu_w = static_cast<double>(w.sum) / md, mu_q = static_cast<double>(q.sum) / md;
    const double var_w = static_cast<double>(w.sumsq) / md - mu_w * mu_w;
    const double var_q = static_cast<double>(q.sumsq) / md - mu_q * mu_q;
    if (var_w <= 0 || var_q <= 0) return 2 * std::sqrt(md);
    const double corr = (static_cast<double>(dot) - md * mu_w * mu_q) / (md * std::sqrt(var_w) * std::sqrt(var_q));
    return std::sqrt(std::max(0.0, 2 * md * (1 - corr)));
}

inline Stats stats_of(std::span<const std::int32_t> v) {
    Stats s;
    for (auto x : v) {
        s.sum += x;
        s.sumsq += std::int64_t{x} * x;
    }
    return s;
}

inline bool better(double d, std::int64_t i, const Match& m) { return d < m.distance || (d == m.distance && i < m.index); }

// Brute force over all windows.
inline Match oracle(const Input& in) {
    Match best;
    const auto m = static_cast<std::uint32_t>(in.query.size());
    if (m == 0 || in.series.size() < m) return best;
    const Stats q = stats_of(in.query);
    for (std::size_t i = 0; i + m <= in.series.size(); ++i) {
        std::span<const std::int32_t> w(in.series.data() + i, m);
        std::int64_t dot = 0;
        for (std::uint32_t k = 0; k < m; ++k) dot += std::int64_t{w[k]} * in.query[k];
        const double d = z_distance(dot, stats_of(w), q, m);
        if (better(d, static_cast<std::int64_t>(i), best)) best = {d, static_cast<std::int64_t>(i)};
    }
    return best;
}

struct Args {
    std::uint64_t windows;       // windows owned by this DPU
    std::uint64_t first_window;  // global index of window 0
    std::uint32_t m;
    std::uint64_t series, query, out;
    Stats q;
    std::uint32_t tile;
};

// Reads `count` int32 values starting at element `first` into dst, which must hold count + 2 values.
// Returns the offset of element `first` inside dst.
inline Task read_span(Tasklet& t, std::uint64_t base, std::uint64_t first, std::uint64_t count,
                      std::span<std::int32_t> dst, std::uint32_t& shift) {
    const std::uint64_t start = align_down(base + first * 4, 8);
    shift = static_cast<std::uint32_t>((base + first * 4 - start) / 4);
    const std::uint64_t bytes = align_up((shift + count) * 4, 8);
    for (std::uint64_t off = 0; off < bytes; off += 2048) {
        const auto n = static_cast<std::uint32_t>(std::min<std::uint64_t>(2048, bytes - off));
        co_await t.mram_read(start + off, reinterpret_cast<std::byte*>(dst.data()) + off, n);
    }
}

inline Task kernel(Tasklet& t) {
    const Args& a = t.args<Args>();
    const std::uint32_t m = a.m;
    const std::uint32_t chunk = std::max<std::uint32_t>(1, a.tile / 4);
    auto query = t.wram_alloc<std::int32_t>(m + 2);
    auto win = t.wram_alloc<std::int32_t>(chunk + m + 2);
    auto best_d = t.shared<double>("best_d", t.count());
    auto best_i = t.shared<std::int64_t>("best_i", t.count());
    std::uint32_t qshift = 0;
    co_await read_span(t, a.query, 0, m, query, qshift);
    const auto parts = even_partition(a.windows, t.count());
    const Range mine = parts[t.id()];
    Match best;
    for (std::uint64_t w0 = mine.begin; w0 < mine.end; w0 += chunk) {
        const std::uint64_t nw = std::min<std::uint64_t>(chunk, mine.end - w0);
        std::uint32_t shift = 0;
        t.loop();
        co_await read_span(t, a.series, w0, nw + m - 1, win, shift);
        const std::int32_t* s = win.data() + shift;
        Stats ws = stats_of({s, m});
        t.wram_load(m);
        t.charge(OpClass::add, DataType::int64, 2ull * m);
        t.charge(OpClass::mul, DataType::int32, m);
        for (std::uint64_t k = 0; k < nw; ++k) {
            if (k > 0) {
                const std::int64_t out = s[k - 1], in = s[k + m - 1];
                ws.sum += in - out;
                ws.sumsq += in * in - out * out;
                t.wram_load(2);
                t.charge(OpClass::mul, DataType::int32, 2);
                t.charge(OpClass::add, DataType::int64, 2);
                t.charge(OpClass::sub, DataType::int64, 2);
            }
            std::int64_t dot = 0;
            for (std::uint32_t j = 0; j < m; ++j) dot += std::int64_t{s[k + j]} * query[qshift + j];
            t.wram_load(2ull * m);
            t.charge(OpClass::mul, DataType::int32, m);
            t.charge(OpClass::add, DataType::int64, m);
            t.loop(m);
            const double d = z_distance(dot, ws, a.q, m);
            // Priced as the int32 fixed-point form of the same expression.
            t.charge(OpClass::div, DataType::int32, 3);
            t.charge(OpClass::mul, DataType::int32, 4);
            t.charge(OpClass::sub, DataType::int32, 4);
            t.charge(OpClass::compare, DataType::int32, 3);
            const auto gi = static_cast<std::int64_t>(a.first_window + w0 + k);
            if (better(d, gi, best)) best = {d, gi};
            t.loop();
        }
    }
    best_d[t.id()] = best.distance;
    best_i[t.id()] = best.index;
    t.wram_store(2);
    co_await t.barrier_wait();
    if (t.id() == 0) {
        for (unsigned i = 1; i < t.count(); ++i)
            if (best_i[i] >= 0 && better(best_d[i], best_i[i], {best_d[0], best_i[0] < 0 ? INT64_MAX : best_i[0]})) {
                best_d[0] = best_d[i];
                best_i[0] = best_i[i];
            }
        t.wram_load(2ull * t.count());
        t.charge(OpClass::compare, DataType::float64, t.count());
        co_await t.mram_write(best_d.data(), a.out, 8);
        co_await t.mram_write(best_i.data(), a.out + 8, 8);
    }
}

struct Result {
    Match best;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    const auto m = static_cast<std::uint32_t>(in.query.size());
    if (m == 0 || in.series.size() < m) throw std::invalid_argument("TS needs a query no longer than the series");
    DpuSet set(sys, p.dpus, p.workers);
    const std::uint64_t windows = in.series.size() - m + 1;
    const auto parts = block_partition(windows, p.dpus);
    std::vector<std::vector<std::int32_t>> slice(p.dpus);
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        if (parts[d].size() == 0) continue;
        slice[d].assign(in.series.begin() + parts[d].begin, in.series.begin() + parts[d].end + m - 1);
        slice[d].resize(align_up(slice[d].size(), 2));
    }
    const std::uint64_t series_cap = align_up((parts[0].size() + m) * 4, 8);
    const std::uint64_t query_at = series_cap, out_at = query_at + align_up(m * 4ull, 8);
    set.push(Category::cpu_to_dpu, 0, slice);
    std::vector<std::int32_t> q = in.query;
    q.resize(align_up(q.size(), 2));
    set.broadcast<std::int32_t>(Category::cpu_to_dpu, query_at, q);
    const Stats qs = stats_of(in.query);
    for (std::uint32_t d = 0; d < p.dpus; ++d)
        set[d].set_args(Args{parts[d].size(), parts[d].begin, m, 0, query_at, out_at, qs, p.tile_bytes});
    set.launch(kernel, p.tasklets, launch_options(p));
    Result r;
    for (std::uint32_t d = 0; d < p.dpus; ++d) {
        if (parts[d].size() == 0) continue;
        const double dist = set[d].read<double>(out_at, 1)[0];
        const std::int64_t idx = set[d].read<std::int64_t>(out_at + 8, 1)[0];
        if (idx >= 0 && better(dist, idx, r.best.index < 0 ? Match{r.best.distance, INT64_MAX} : r.best)) r.best = {dist, idx};
    }
    set.charge_transfer(Category::dpu_to_cpu, TransferMode::parallel, TransferDirection::dpu_to_cpu,
                        std::vector<std::uint64_t>(p.dpus, 16));
    set.host_compute(Category::dpu_to_cpu, p.dpus);
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::ts
