#pragma once

#include <cmath>
#include <functional>
#include <string_view>

#include "pim/prim/bfs.hpp"
#include "pim/prim/bs.hpp"
#include "pim/prim/gemv.hpp"
#include "pim/prim/hst.hpp"
#include "pim/prim/mlp.hpp"
#include "pim/prim/nw.hpp"
#include "pim/prim/red.hpp"
#include "pim/prim/scan.hpp"
#include "pim/prim/sel.hpp"
#include "pim/prim/spmv.hpp"
#include "pim/prim/trns.hpp"
#include "pim/prim/ts.hpp"
#include "pim/prim/va.hpp"

namespace pim::prim {

// Problem sizes are in each benchmark's primary unit (see `unit`). Desk sizes run in well under a
// second on one DPU; weak sizes keep per-DPU work constant.
struct Benchmark {
    std::string name;
    std::string unit;
    bool balanced = false;
    std::uint64_t desk = 0;
    std::uint64_t strong = 0;
    std::function<std::uint64_t(std::uint32_t dpus)> weak;
    std::function<ExperimentRecord(const SystemConfig&, BenchParams)> run;
};

namespace detail {

inline ExperimentRecord record(std::string name, const BenchParams& p, std::uint64_t size, std::string dataset,
                               const RunStats& stats, std::string mismatch, unsigned tasklets = 0) {
    ExperimentRecord r;
    r.benchmark = std::move(name);
    r.variant = p.variant;
    r.dpus = p.dpus;
    r.tasklets = tasklets ? tasklets : p.tasklets;
    r.seed = p.seed;
    r.size = size;
    r.dataset = std::move(dataset);
    r.time = stats.time;
    r.correct = mismatch.empty();
    r.mismatch = std::move(mismatch);
    r.launch_cycles = stats.launch_cycles;
    r.detail = stats.detail;
    return r;
}

inline std::uint64_t size_or(const BenchParams& p, std::uint64_t desk) { return p.size ? p.size : desk; }

inline std::uint64_t per_dpu(std::uint64_t desk, std::uint32_t dpus) { return desk * dpus; }

inline constexpr std::uint32_t kGemvCols = 256;
inline constexpr std::uint32_t kMlpLayers = 3;
inline constexpr std::uint64_t kBsArray = 32768;
inline constexpr std::uint32_t kTsQuery = 64;
inline constexpr trns::Shape kTrns{192, 16, 0, 8};

inline std::vector<Benchmark> make_registry() {
    std::vector<Benchmark> r;
    const auto linear = [](std::uint64_t desk) { return [desk](std::uint32_t d) { return per_dpu(desk, d); }; };

    r.push_back({"VA", "elements", true, 39062, 1 << 20, linear(39062), [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 39062);
                     const auto in = va::generate(n, p.seed);
                     const auto res = va::run(sys, p, in);
                     return record("VA", p, n, "uniform int32", res.stats, compare_exact(res.c, va::oracle(in)));
                 }});
    r.push_back({"GEMV", "rows (256 columns)", true, 128, 8192, linear(128), [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 128);
                     const auto in = gemv::generate(static_cast<std::uint32_t>(n), kGemvCols, p.seed);
                     const auto res = gemv::run(sys, p, in);
                     return record("GEMV", p, n, "uniform uint32 matrix", res.stats, compare_exact(res.y, gemv::oracle(in)));
                 }});
    r.push_back({"SpMV", "rows", false, 3616, 14464,
                 [](std::uint32_t d) { return static_cast<std::uint64_t>(std::llround(3616 * std::sqrt(double(d)))); }, [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 3616);
                     const auto in = spmv::generate(static_cast<std::uint32_t>(n), p.seed);
                     const auto res = spmv::run(sys, p, in);
                     return record("SpMV", p, n, "banded float32 CSR, 0.244% dense", res.stats,
                                   compare_relative(res.y, spmv::oracle(in), 1e-6));
                 }});
    r.push_back({"SEL", "elements", true, 59375, 1 << 20, linear(59375), [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 59375);
                     const auto in = sel::generate(n, p.seed);
                     const auto res = sel::run(sel::Op::select, sys, p, in);
                     return record("SEL", p, n, "uniform int64, even values removed", res.stats,
                                   compare_exact(res.out, sel::oracle_select(in)));
                 }});
    r.push_back({"UNI", "elements", true, 59375, 1 << 20, linear(59375), [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 59375);
                     const auto in = uni::generate(n, p.seed);
                     const auto res = uni::run(sys, p, in);
                     return record("UNI", p, n, "int64 runs of 1-4", res.stats, compare_exact(res.out, uni::oracle(in)));
                 }});
    r.push_back({"BS", "queries (32768-element array)", true, 4096, 65536, linear(4096),
                 [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 4096);
                     const auto in = bs::generate(kBsArray, n, p.seed);
                     const auto res = bs::run(sys, p, in);
                     return record("BS", p, n, "sorted int64, 90% hits", res.stats, compare_exact(res.positions, bs::oracle(in)));
                 }});
    r.push_back({"TS", "series elements (64-element query)", true, 8192, 65536, linear(8192),
                 [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 8192);
                     const auto in = ts::generate(n, kTsQuery, p.seed);
                     const auto res = ts::run(sys, p, in);
                     const auto want = ts::oracle(in);
                     std::string mismatch;
                     if (res.best.index != want.index || !relative_equal(res.best.distance, want.distance, 1e-9))
                         mismatch = "best " + std::to_string(res.best.index) + " vs " + std::to_string(want.index);
                     auto rec = record("TS", p, n, "int32 random walk", res.stats, mismatch);
                     rec.detail["best_index"] = static_cast<double>(res.best.index);
                     return rec;
                 }});
    r.push_back({"BFS", "vertices", false, 2048, 32768, linear(2048), [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 2048);
                     const auto g = bfs::generate(static_cast<std::uint32_t>(n), p.seed);
                     const auto res = bfs::run(sys, p, g);
                     auto rec = record("BFS", p, n, "rMat graph, 12 edges per vertex", res.stats,
                                       compare_exact(res.dist, bfs::oracle(g, 0)));
                     rec.detail["levels"] = res.levels;
                     rec.detail["edges"] = static_cast<double>(g.col_idx.size());
                     return rec;
                 }});
    r.push_back({"MLP", "layer width (3 layers)", true, 128, 1024,
                 [](std::uint32_t d) { return static_cast<std::uint64_t>(std::llround(128 * std::sqrt(double(d)))); },
                 [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 128);
                     const auto in = mlp::generate(static_cast<std::uint32_t>(n), kMlpLayers, p.seed);
                     const auto res = mlp::run(sys, p, in);
                     return record("MLP", p, n, "uint32 weights, ReLU", res.stats, compare_exact(res.y, mlp::oracle(in)));
                 }});
    r.push_back({"NW", "base pairs per sequence", false, 256, 2048, [](std::uint32_t d) { return 64ull * d; },
                 [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 256);
                     const auto in = nw::generate(n, p.seed);
                     const auto res = nw::run(sys, p, in);
                     const auto want = nw::oracle(in);
                     auto rec = record("NW", p, n, "random DNA pair", res.stats,
                                       res.matrix == want ? std::string{} : compare_exact(res.matrix.cells, want.cells));
                     rec.detail["score"] = res.matrix.score();
                     return rec;
                 }});
    for (const char* v : {"S", "L"}) {
        const std::string name = std::string("HST-") + v;
        r.push_back({name, "pixels", true, 24576, 1572864, linear(24576), [name, v](const SystemConfig& sys, BenchParams p) {
                         p.variant = v;
                         const auto n = size_or(p, 24576);
                         const auto img = hst::generate(n, p.seed);
                         const auto res = hst::run(sys, p, img, p.bins);
                         p.variant = std::to_string(p.bins) + " bins";
                         return record(name, p, n, "12-bit image", res.stats, compare_exact(res.hist, hst::oracle(img, p.bins)),
                                       res.tasklets);
                     }});
    }
    r.push_back({"RED", "elements", true, 98304, 1 << 21, linear(98304), [](const SystemConfig& sys, BenchParams p) {
                     p.variant = std::string(red::name(red::parse_variant(p.variant)));
                     const auto n = size_or(p, 98304);
                     const auto in = red::generate(n, p.seed);
                     const auto res = red::run(sys, p, in);
                     const auto want = red::oracle(in);
                     return record("RED", p, n, "int64 in +-2^40", res.stats,
                                   res.sum == want ? std::string{} : "sum " + std::to_string(res.sum) + " vs " + std::to_string(want));
                 }});
    for (const char* v : {"SSA", "RSS"}) {
        const std::string name = std::string("SCAN-") + v;
        r.push_back({name, "elements", true, 59375, 1 << 20, linear(59375), [name, v](const SystemConfig& sys, BenchParams p) {
                         p.variant = v;
                         const auto n = size_or(p, 59375);
                         const auto in = scan::generate(n, p.seed);
                         const auto res = scan::run(sys, p, in);
                         auto rec = record(name, p, n, "int64 in +-2^40", res.stats, compare_exact(res.out, scan::oracle(in)));
                         rec.detail["first_kernel_cycles"] = static_cast<double>(res.first_kernel_cycles);
                         rec.detail["second_kernel_cycles"] = static_cast<double>(res.second_kernel_cycles);
                         return rec;
                     }});
    }
    r.push_back({"TRNS", "column groups N' (M'=192, m=16, n=8)", true, 2, 64, [](std::uint32_t d) { return std::uint64_t{d}; },
                 [](const SystemConfig& sys, BenchParams p) {
                     const auto n = size_or(p, 2);
                     trns::Shape s = kTrns;
                     s.np = static_cast<std::uint32_t>(n);
                     const auto in = trns::generate(s, p.seed);
                     const auto res = trns::run(sys, p, in);
                     return record("TRNS", p, n, "int64 3072 x 8N'", res.stats, compare_exact(res.t, trns::oracle(in)));
                 }});
    return r;
}

}  // namespace detail

inline const std::vector<Benchmark>& benchmarks() {
    static const std::vector<Benchmark> r = detail::make_registry();
    return r;
}

inline const Benchmark& find_benchmark(std::string_view name) {
    for (const auto& b : benchmarks()) {
        if (b.name.size() != name.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < name.size(); ++i)
            same = same && std::toupper(static_cast<unsigned char>(b.name[i])) == std::toupper(static_cast<unsigned char>(name[i]));
        if (same) return b;
    }
    throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

}  // namespace pim::prim
