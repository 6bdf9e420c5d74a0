#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pim/core/parallel.hpp"
#include "pim/experiment/table.hpp"
#include "pim/prim/registry.hpp"
#include "pim/runtime/scheduler.hpp"
#include "pim/timing/host_link.hpp"
#include "pim/timing/microbench.hpp"

namespace pim::exp {

// error <= limit passes. `unit` says how error and limit are expressed.
struct Check {
    std::string name;
    double value = 0;
    double target = 0;
    double error = 0;
    double limit = 0;
    std::string unit;
    bool pass = false;

    // Share of the allowance left; one-sided checks use the relative slack. Negative when failing.
    double headroom() const {
        if (unit == "shortfall") return value / target - 1;
        if (unit == "excess") return 1 - value / target;
        if (limit > 0) return 1 - error / limit;
        return pass ? 0.0 : -std::max(error, 1e-300);
    }
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Check> checks;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
    const Check& tightest() const {
        return *std::min_element(checks.begin(), checks.end(),
                                 [](const Check& a, const Check& b) { return a.headroom() < b.headroom(); });
    }
    double margin() const { return checks.empty() ? 0.0 : tightest().headroom(); }
};

struct AcceptOptions {
    unsigned workers = 0;
    std::uint32_t seeds = 100;
    std::uint64_t first_seed = 1;
};

namespace accept {

inline constexpr double kExactTol = 1e-12;

inline Check relative(std::string name, double value, double target, double tol) {
    const double err = std::abs(value - target) / std::abs(target);
    return {std::move(name), value, target, err, tol, "relative", err <= tol};
}

inline Check absolute(std::string name, double value, double target, double tol) {
    const double err = std::abs(value - target);
    return {std::move(name), value, target, err, tol, "absolute", err <= tol + 1e-12};
}

inline Check in_range(std::string name, double value, double lo, double hi, double tol) {
    const double err = value < lo ? (lo - value) / lo : value > hi ? (value - hi) / hi : 0.0;
    return {std::move(name), value, (lo + hi) / 2, err, tol, "relative to range", err <= tol};
}

// value must be at least target.
inline Check at_least(std::string name, double value, double target) {
    const double err = std::max(0.0, (target - value) / target);
    return {std::move(name), value, target, err, 0, "shortfall", value >= target};
}

inline Check at_most(std::string name, double value, double target) {
    const double err = std::max(0.0, (value - target) / target);
    return {std::move(name), value, target, err, 0, "excess", value <= target};
}

inline double mbps(const BandwidthReport& r) { return r.bandwidth / 1e6; }

inline Criterion arithmetic(const DpuConfig& cfg) {
    Criterion c{1, "arithmetic throughput at T >= 11", {}};
    struct Case {
        OpClass op;
        DataType dt;
        double loop, printed, digits;
        const char* label;
    };
    // Loop instruction counts: load + op + store + address + index add + branch.
    const Case cases[] = {{OpClass::add, DataType::int32, 6, 58.33, 0.005, "int32 add"},
                          {OpClass::add, DataType::int64, 7, 50.0, 0.05, "int64 add"},
                          {OpClass::mul, DataType::int32, 32, 10.94, 0.005, "int32 mul"}};
    for (const auto& k : cases) {
        const double formula = cfg.frequency_hz / k.loop / 1e6;
        double worst = 0, at11 = 0;
        for (unsigned t = 11; t <= cfg.max_tasklets; ++t) {
            const double v = arithmetic_throughput(k.op, k.dt, t, cfg) / 1e6;
            if (t == 11) at11 = v;
            worst = std::max(worst, std::abs(v - formula) / formula);
        }
        c.checks.push_back({std::string(k.label) + " MOPS equals f/" + format_value(k.loop) + " for T = 11.." +
                                std::to_string(cfg.max_tasklets),
                            at11, formula, worst, kExactTol, "relative", worst <= kExactTol});
        c.checks.push_back(absolute(std::string(k.label) + " MOPS as printed", at11, k.printed, k.digits));
    }
    const double a32 = arithmetic_throughput(OpClass::add, DataType::int32, 16, cfg) / 1e6;
    const double a64 = arithmetic_throughput(OpClass::add, DataType::int64, 16, cfg) / 1e6;
    const double m32 = arithmetic_throughput(OpClass::mul, DataType::int32, 16, cfg) / 1e6;
    c.checks.push_back(relative("int32 add vs measured 58.56", a32, 58.56, 0.05));
    c.checks.push_back(relative("int64 add vs measured 50.16", a64, 50.16, 0.05));
    c.checks.push_back(in_range("int32 mul vs measured 10.27-11.27", m32, 10.27, 11.27, 0.05));
    return c;
}

inline Criterion wram(const DpuConfig& cfg) {
    Criterion c{2, "WRAM streaming bandwidth", {}};
    for (unsigned t : {11u, 16u}) {
        const std::string at = " at T=" + std::to_string(t);
        c.checks.push_back(relative("COPY MB/s" + at, mbps(wram_stream_bandwidth(WramStream::copy, t, cfg)), 2800, kExactTol));
        c.checks.push_back(relative("ADD MB/s" + at, mbps(wram_stream_bandwidth(WramStream::add, t, cfg)), 1680, kExactTol));
    }
    c.checks.push_back(relative("SCALE MB/s vs measured 42.03", mbps(wram_stream_bandwidth(WramStream::scale, 16, cfg)), 42.03, 0.10));
    c.checks.push_back(relative("TRIAD MB/s vs measured 61.66", mbps(wram_stream_bandwidth(WramStream::triad, 16, cfg)), 61.66, 0.10));
    return c;
}

inline Criterion mram(const DpuConfig& cfg) {
    Criterion c{3, "MRAM DMA latency and bandwidth", {}};
    const auto lat = [&](std::uint32_t size) {
        return static_cast<double>(dma_latency({DmaDirection::mram_to_wram, size, 0}, cfg));
    };
    c.checks.push_back(absolute("read 8 B cycles", lat(8), 81, 0));
    c.checks.push_back(absolute("read 128 B cycles", lat(128), 141, 0));
    c.checks.push_back(relative("2048 B read MB/s vs measured 628.23",
                                dma_bandwidth(2048, DmaDirection::mram_to_wram, cfg) / 1e6, 628.23, 0.05));
    c.checks.push_back(relative("2048 B write MB/s vs measured 633.22",
                                dma_bandwidth(2048, DmaDirection::wram_to_mram, cfg) / 1e6, 633.22, 0.05));
    return c;
}

inline Criterion saturation(const DpuConfig& cfg, unsigned workers) {
    Criterion c{4, "MRAM stream saturation tasklet counts", {}};
    struct Case {
        MramStream v;
        double want, tol;
    };
    const std::vector<Case> cases = {{MramStream::copy_dma, 2, 0},
                                     {MramStream::copy, 4, 1},
                                     {MramStream::add, 6, 1},
                                     {MramStream::scale, 11, 0},
                                     {MramStream::triad, 11, 0}};
    std::vector<double> got(cases.size());
    parallel_for(cases.size(), workers, [&](std::size_t i) {
        got[i] = mram_stream_saturation(cases[i].v, 1024, cfg);
    });
    for (std::size_t i = 0; i < cases.size(); ++i)
        c.checks.push_back(absolute(std::string(name(cases[i].v)) + " saturation tasklets", got[i], cases[i].want, cases[i].tol));
    c.checks.push_back(relative("COPY-DMA sustained MB/s vs measured 624.02",
                                mbps(mram_stream_bandwidth(MramStream::copy_dma, 16, 1024, cfg)), 624.02, 0.05));
    return c;
}

inline Criterion strided(const DpuConfig& cfg) {
    Criterion c{5, "strided and random access", {}};
    c.checks.push_back(relative("coarse stride 1 MB/s vs measured 622.36", mbps(strided_bandwidth(StrideMode::coarse, 1, 16, cfg)),
                                622.36, 0.05));
    c.checks.push_back(relative("coarse stride 16 MB/s vs measured 38.95", mbps(strided_bandwidth(StrideMode::coarse, 16, 16, cfg)),
                                38.95, 0.05));
    c.checks.push_back(relative("GUPS T=16 MB/s vs measured 72.58", mbps(random_access_bandwidth(16, cfg)), 72.58, 0.10));
    return c;
}

inline Criterion roofline_knees(const DpuConfig& cfg) {
    Criterion c{6, "roofline saturation intensity", {}};
    struct Case {
        OpClass op;
        DataType dt;
        double want;
        const char* label;
    };
    const Case cases[] = {{OpClass::add, DataType::int32, 1.0 / 4, "int32 add"},
                          {OpClass::mul, DataType::int32, 1.0 / 32, "int32 mul"},
                          {OpClass::add, DataType::float32, 1.0 / 64, "float32 add"},
                          {OpClass::mul, DataType::float32, 1.0 / 128, "float32 mul"}};
    const auto grid = default_oi_grid();
    for (const auto& k : cases) {
        const double got = saturation_intensity(roofline(k.op, k.dt, 16, cfg), grid);
        const double steps = std::abs(std::log2(got) - std::log2(k.want));
        c.checks.push_back({std::string(k.label) + " saturation OI (grid steps from " + format_value(k.want) + ")", got,
                            k.want, steps, 1, "grid steps", steps <= 1 + 1e-9});
    }
    double worst = 0;
    for (double oi : grid) {
        const double ref = roofline_throughput(OpClass::add, DataType::int32, 11, oi, cfg);
        for (unsigned t = 12; t <= cfg.max_tasklets; ++t)
            worst = std::max(worst, std::abs(roofline_throughput(OpClass::add, DataType::int32, t, oi, cfg) - ref) / ref);
    }
    c.checks.push_back({"int32 add roofline flat for T >= 11", worst, 0, worst, 0.01, "relative", worst <= 0.01});
    return c;
}

inline Criterion host_link(const SystemConfig& sys) {
    Criterion c{7, "host link bandwidth", {}};
    constexpr std::uint64_t k32MiB = 32ull << 20;
    const auto gbps = [&](TransferMode m, TransferDirection d, std::uint32_t n) {
        return system_transfer_time({m, d, std::vector<std::uint64_t>(n, k32MiB)}, sys).bandwidth_bps / 1e9;
    };
    using M = TransferMode;
    using D = TransferDirection;
    c.checks.push_back(relative("1 DPU CPU-DPU GB/s", gbps(M::parallel, D::cpu_to_dpu, 1), 0.33, 0.02));
    c.checks.push_back(relative("1 DPU DPU-CPU GB/s", gbps(M::parallel, D::dpu_to_cpu, 1), 0.12, 0.02));
    c.checks.push_back(relative("64 DPU parallel CPU-DPU GB/s", gbps(M::parallel, D::cpu_to_dpu, 64), 6.68, 0.02));
    c.checks.push_back(relative("64 DPU parallel DPU-CPU GB/s", gbps(M::parallel, D::dpu_to_cpu, 64), 4.74, 0.02));
    c.checks.push_back(relative("64 DPU broadcast GB/s", gbps(M::broadcast, D::cpu_to_dpu, 64), 16.88, 0.02));
    for (auto d : {D::cpu_to_dpu, D::dpu_to_cpu}) {
        const double one = gbps(M::serial, d, 1);
        double worst = 0;
        for (std::uint32_t n = 2; n <= 64; n *= 2) worst = std::max(worst, std::abs(gbps(M::serial, d, n) - one) / one);
        c.checks.push_back({"serial " + std::string(name(d)) + " flat over 1-64 DPUs", one, one, worst, 0.02, "relative",
                            worst <= 0.02});
    }
    return c;
}

inline Criterion correctness(const SystemConfig& sys, const AcceptOptions& o) {
    Criterion c{8, "functional correctness over seeded desk-scale datasets", {}};
    const auto& all = prim::benchmarks();
    const std::size_t n = all.size() * o.seeds;
    std::vector<char> ok(n, 0);
    std::vector<std::string> first_error(all.size());
    std::vector<std::string> errors(n);
    parallel_for(n, o.workers, [&](std::size_t i) {
        const auto& b = all[i / o.seeds];
        const std::uint64_t seed = o.first_seed + i % o.seeds;
        prim::BenchParams p;
        p.seed = seed;
        p.dpus = 1u << (seed % 4);
        if (b.name == "RED") p.variant = std::string(prim::red::name(static_cast<prim::red::Variant>(seed % 3)));
        if (b.name.starts_with("HST-")) p.bins = 64u << (2 * (seed % 4));
        try {
            const auto r = b.run(sys, p);
            ok[i] = r.correct;
            if (!r.correct) errors[i] = "seed " + std::to_string(seed) + ": " + r.mismatch;
        } catch (const std::exception& e) {
            errors[i] = "seed " + std::to_string(seed) + ": " + e.what();
        }
    });
    for (std::size_t b = 0; b < all.size(); ++b) {
        double failed = 0;
        std::string first;
        for (std::size_t k = 0; k < o.seeds; ++k) {
            failed += !ok[b * o.seeds + k];
            if (first.empty()) first = errors[b * o.seeds + k];
        }
        c.checks.push_back({all[b].name + " datasets matching the oracle" + (first.empty() ? "" : " (" + first + ")"),
                            static_cast<double>(o.seeds) - failed, static_cast<double>(o.seeds), failed, 0, "failures",
                            failed == 0});
    }
    return c;
}

inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
}

inline Criterion scaling(const SystemConfig& sys, unsigned workers) {
    Criterion c{9, "strong and weak scaling shapes", {}};
    const std::vector<std::uint32_t> dpus = {1, 4, 16, 64};
    const std::vector<std::uint32_t> bfs_dpus = {1, 2, 4, 8, 16, 32, 64};
    struct Job {
        const prim::Benchmark* b;
        bool strong;
        std::uint32_t d;
    };
    std::vector<Job> jobs;
    std::vector<const prim::Benchmark*> balanced;
    for (const auto& b : prim::benchmarks())
        if (b.balanced) {
            balanced.push_back(&b);
            for (auto d : dpus) jobs.push_back({&b, true, d});
            for (auto d : dpus) jobs.push_back({&b, false, d});
        }
    const auto& bfs = prim::find_benchmark("BFS");
    const auto& nw = prim::find_benchmark("NW");
    for (auto d : bfs_dpus) jobs.push_back({&bfs, false, d});
    for (auto d : dpus) jobs.push_back({&nw, false, d});
    std::vector<prim::ExperimentRecord> rec(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        prim::BenchParams p;
        p.dpus = jobs[i].d;
        p.size = jobs[i].strong ? jobs[i].b->strong : jobs[i].b->weak(jobs[i].d);
        rec[i] = jobs[i].b->run(sys, p);
    });
    const auto cycles = [&](std::size_t i) { return static_cast<double>(rec[i].time.dpu_cycles); };
    std::size_t at = 0;
    for (const auto* b : balanced) {
        double worst = std::numeric_limits<double>::infinity();
        bool correct = true;
        for (std::size_t k = 0; k < dpus.size(); ++k) correct = correct && rec[at + k].correct;
        for (std::size_t k = 1; k < dpus.size(); ++k) worst = std::min(worst, cycles(at + k - 1) / cycles(at + k));
        auto strong = at_least(b->name + " strong speedup per 4x DPUs (min over 1-64)", worst, 3.1);
        strong.pass = strong.pass && correct;
        c.checks.push_back(strong);
        at += dpus.size();
        double dev = 0;
        correct = true;
        for (std::size_t k = 0; k < dpus.size(); ++k) {
            dev = std::max(dev, std::abs(cycles(at + k) / cycles(at) - 1));
            correct = correct && rec[at + k].correct;
        }
        auto weak = Check{b->name + " weak DPU cycles vs 1 DPU (max deviation)", dev, 0, dev, 0.05, "relative", dev <= 0.05};
        weak.pass = weak.pass && correct;
        c.checks.push_back(weak);
        at += dpus.size();
    }
    std::vector<double> x, y;
    for (std::size_t k = 0; k < bfs_dpus.size(); ++k, ++at) {
        x.push_back(bfs_dpus[k]);
        y.push_back(rec[at].time.inter_dpu_seconds);
    }
    const double r2 = r_squared(x, y);
    c.checks.push_back(at_least("BFS weak inter-DPU time linear in DPUs (R^2)", r2, 0.95));
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    bool grows = true;
    for (std::size_t k = 0; k < dpus.size(); ++k, ++at) {
        const double d = rec[at].detail.at("longest_diagonal_cycles");
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        if (k > 0) grows = grows && rec[at].time.total_seconds() > rec[at - 1].time.total_seconds();
    }
    c.checks.push_back({"NW weak longest diagonal spread (max/min - 1)", hi / lo - 1, 0, hi / lo - 1, 0.10, "relative",
                        hi / lo - 1 <= 0.10});
    c.checks.push_back({"NW weak full-problem time grows with DPUs", grows ? 1.0 : 0.0, 1, grows ? 0.0 : 1.0, 0, "flag", grows});
    return c;
}

inline Criterion crossovers(const SystemConfig& sys, unsigned workers) {
    Criterion c{10, "variant crossovers", {}};
    constexpr std::uint64_t kPixels = 24576;
    const std::vector<std::uint32_t> bins = {64, 128, 256, 512, 1024, 2048, 4096};
    const unsigned max_t = 16;
    // HST-S at its WRAM-limited tasklet count against HST-L at its best count.
    std::vector<double> s_cycles(bins.size());
    std::vector<double> l_cycles(bins.size() * max_t);
    const auto img = prim::hst::generate(kPixels, 1);
    parallel_for(bins.size() * (max_t + 1), workers, [&](std::size_t i) {
        const std::size_t b = i / (max_t + 1), k = i % (max_t + 1);
        prim::BenchParams p;
        p.variant = k == 0 ? "S" : "L";
        p.tasklets = k == 0 ? 16 : static_cast<unsigned>(k);
        const double cyc = static_cast<double>(prim::hst::run(sys, p, img, bins[b]).stats.time.dpu_cycles);
        if (k == 0) s_cycles[b] = cyc;
        else l_cycles[b * max_t + k - 1] = cyc;
    });
    for (std::size_t b = 0; b < bins.size(); ++b) {
        if (bins[b] == 2048) continue;
        const double best_l = *std::min_element(l_cycles.begin() + b * max_t, l_cycles.begin() + (b + 1) * max_t);
        const double ratio = s_cycles[b] / best_l;
        const std::string label = "HST-S / best HST-L cycles at " + std::to_string(bins[b]) + " bins";
        c.checks.push_back(bins[b] <= 1024 ? at_most(label + " (S wins)", ratio, 1.0) : at_least(label + " (S loses)", ratio, 1.0));
    }

    const std::vector<std::uint64_t> sizes = {2048, 4096, 8192, 16384, 32768, 65536};
    std::vector<double> scan_time(sizes.size() * 2);
    parallel_for(scan_time.size(), workers, [&](std::size_t i) {
        prim::BenchParams p;
        p.variant = i % 2 == 0 ? "SSA" : "RSS";
        const auto in = prim::scan::generate(sizes[i / 2], 1);
        const auto t = prim::scan::run(sys, p, in).stats.time;
        scan_time[i] = t.dpu_seconds + t.inter_dpu_seconds;
    });
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const double ratio = scan_time[2 * k] / scan_time[2 * k + 1];
        const std::string label = "SCAN-SSA / SCAN-RSS time at " + std::to_string(sizes[k]) + " elements";
        c.checks.push_back(sizes[k] <= 8192 ? at_most(label + " (SSA wins)", ratio, 1.0)
                                            : at_least(label + " (SSA loses)", ratio, 1.0));
    }

    for (std::uint64_t n : {std::uint64_t{2048}, std::uint64_t{98304}}) {
        double cyc[3] = {};
        const auto in = prim::red::generate(n, 1);
        for (int v = 0; v < 3; ++v) {
            prim::BenchParams p;
            p.variant = std::string(prim::red::name(static_cast<prim::red::Variant>(v)));
            cyc[v] = static_cast<double>(prim::red::run(sys, p, in).stats.time.dpu_cycles);
        }
        const double single = cyc[0], barrier = cyc[1], hands = cyc[2];
        const std::string at = " at " + std::to_string(n) + " elements";
        c.checks.push_back(at_most("RED SINGLE / HANDS" + at, single / hands, 1.0));
        auto lt = at_least("RED BARRIER / HANDS" + at + " (must exceed 1)", barrier / hands, 1.0);
        lt.pass = barrier > hands;
        c.checks.push_back(lt);
        c.checks.push_back(relative("RED SINGLE vs HANDS" + at, single, hands, 0.10));
    }
    return c;
}

inline Criterion consistency(const DpuConfig& cfg, std::uint64_t seed = 2024) {
    Criterion c{11, "closed form vs event engine on pure-compute mixes", {}};
    std::mt19937_64 rng(seed);
    double worst = 0;
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const unsigned t = 1 + static_cast<unsigned>(rng() % cfg.max_tasklets);
        std::vector<InstructionMix> mixes(t);
        std::vector<rt::TaskletTrace> traces(t);
        for (unsigned i = 0; i < t; ++i) {
            const unsigned kinds = static_cast<unsigned>(rng() % 5);
            for (unsigned k = 0; k < kinds; ++k)
                mixes[i].add(kAllOpClasses[rng() % kOpClassCount], kAllDataTypes[rng() % kDataTypeCount], rng() % 300);
            mixes[i].loop_overhead(rng() % 300);
            traces[i] = {rt::Step{mixes[i].instructions(cfg.costs), std::nullopt}};
        }
        const double closed = static_cast<double>(pipeline_cycles(std::span<const InstructionMix>(mixes), cfg).cycles);
        const double engine = static_cast<double>(rt::deterministic_schedule(traces, cfg).total_cycles);
        const double d = std::abs(closed - engine);
        worst = std::max(worst, d);
        failures += d > cfg.pipeline_depth;
    }
    c.checks.push_back({"largest |closed form - event engine| cycles over 1000 mixes", worst, 0, worst,
                        static_cast<double>(cfg.pipeline_depth), "cycles", failures == 0});
    return c;
}

}  // namespace accept

inline std::vector<Criterion> run_acceptance(const SystemConfig& sys, AcceptOptions o = {}) {
    if (o.workers == 0) o.workers = default_workers();
    std::vector<Criterion> r;
    r.push_back(accept::arithmetic(sys.dpu));
    r.push_back(accept::wram(sys.dpu));
    r.push_back(accept::mram(sys.dpu));
    r.push_back(accept::saturation(sys.dpu, o.workers));
    r.push_back(accept::strided(sys.dpu));
    r.push_back(accept::roofline_knees(sys.dpu));
    r.push_back(accept::host_link(sys));
    r.push_back(accept::correctness(sys, o));
    r.push_back(accept::scaling(sys, o.workers));
    r.push_back(accept::crossovers(sys, o.workers));
    r.push_back(accept::consistency(sys.dpu));
    return r;
}

inline bool all_pass(const std::vector<Criterion>& r) {
    return std::all_of(r.begin(), r.end(), [](const Criterion& c) { return c.pass(); });
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// One PASS/FAIL line per criterion, then one indented line per check.
inline std::string format_report(const std::vector<Criterion>& r, bool details = true) {
    std::string out;
    for (const auto& c : r) {
        out += std::string(c.pass() ? "PASS" : "FAIL") + "  criterion " + std::to_string(c.id) + ": " + c.title +
               "  (margin " + format_number(c.margin()) + " at: " + c.tightest().name + ")\n";
        if (!details) continue;
        for (const auto& k : c.checks)
            out += std::string("      ") + (k.pass ? "ok   " : "FAIL ") + k.name + ": " + format_number(k.value) +
                   " (target " + format_number(k.target) + ", " + k.unit + " error " + format_number(k.error) +
                   ", limit " + format_number(k.limit) + ")\n";
    }
    std::size_t passed = 0;
    for (const auto& c : r) passed += c.pass();
    out += std::to_string(passed) + "/" + std::to_string(r.size()) + " criteria passed\n";
    return out;
}

inline Table acceptance_table(const std::vector<Criterion>& r) {
    Table t;
    t.experiment = "accept";
    t.columns = {"criterion", "title", "check", "value", "target", "error", "limit", "unit", "headroom", "pass"};
    for (const auto& c : r)
        for (const auto& k : c.checks)
            t.add({std::int64_t{c.id}, c.title, k.name, k.value, k.target, k.error, k.limit, k.unit, k.headroom(), k.pass});
    return t;
}

}  // namespace pim::exp
