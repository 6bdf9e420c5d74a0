#pragma once

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pim/core/parallel.hpp"
#include "pim/experiment/table.hpp"
#include "pim/prim/registry.hpp"
#include "pim/timing/host_link.hpp"
#include "pim/timing/microbench.hpp"

namespace pim::exp {

enum class Experiment : std::uint8_t {
    arith, wram_stream, mram_stream, stride, gups, roofline, transfer, bench, scale_strong, scale_weak, accept,
};

inline constexpr std::array<std::string_view, 11> kExperimentNames = {
    "arith", "wram-stream", "mram-stream", "stride", "gups", "roofline",
    "transfer", "bench", "scale-strong", "scale-weak", "accept",
};

inline std::string_view name(Experiment e) { return kExperimentNames[static_cast<std::size_t>(e)]; }

inline Experiment parse_experiment(std::string_view s) {
    for (std::size_t i = 0; i < kExperimentNames.size(); ++i)
        if (kExperimentNames[i] == s) return static_cast<Experiment>(i);
    throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

// Axes that an experiment does not use stay empty.
struct SweepSpec {
    Experiment experiment = Experiment::bench;
    std::vector<unsigned> tasklets;
    std::vector<std::uint32_t> dpus;
    // DMA sizes (mram-stream), bytes per DPU (transfer) or problem sizes (bench, scale-strong; 0 = default).
    std::vector<std::uint64_t> sizes;
    std::vector<double> intensities;
    std::vector<std::uint32_t> strides;
    std::vector<std::string> ops;  // "add:int32"
    std::vector<std::string> streams;
    std::vector<std::string> modes;
    std::vector<std::string> directions;
    std::vector<std::string> benchmarks;
    std::vector<std::string> variants;  // RED only
    std::vector<std::uint32_t> bins;    // HST only
    std::uint32_t transfer_bytes = 1024;
    std::uint64_t seed = 1;
    std::uint32_t seeds = 1;
    unsigned workers = 0;  // 0: one per hardware thread
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string r(s);
    for (auto& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t at = 0;
    while (at <= s.size()) {
        const auto comma = std::min(s.find(',', at), s.size());
        const auto item = pim::detail::trim(s.substr(at, comma - at));
        if (!item.empty()) out.emplace_back(item);
        at = comma + 1;
    }
    return out;
}

// Decimal or p/q.
inline double parse_number(const std::string& key, std::string_view s) {
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const double den = pim::detail::parse_double(key, s.substr(slash + 1));
        if (den == 0) throw ConfigError(key, "zero denominator in '" + std::string(s) + "'");
        return pim::detail::parse_double(key, s.substr(0, slash)) / den;
    }
    return pim::detail::parse_double(key, s);
}

// Items are values or ranges: a..b (step 1), a..b+k (step k), a..b*k (factor k), bounds inclusive.
inline std::vector<double> parse_numbers(const std::string& key, std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_number(key, item));
            continue;
        }
        std::string_view rest = std::string_view(item).substr(dots + 2);
        char op = '+';
        double step = 1;
        if (const auto k = rest.find_first_of("+*"); k != std::string_view::npos) {
            op = rest[k];
            step = parse_number(key, rest.substr(k + 1));
            rest = rest.substr(0, k);
        }
        const double lo = parse_number(key, std::string_view(item).substr(0, dots)), hi = parse_number(key, rest);
        if ((op == '+' && !(step > 0)) || (op == '*' && !(step > 1)) || (op == '*' && !(lo > 0)))
            throw ConfigError(key, "range '" + item + "' does not advance");
        if (hi < lo) throw ConfigError(key, "empty range '" + item + "'");
        for (double x = lo; x <= hi * (1 + 1e-12); x = op == '+' ? x + step : x * step) {
            out.push_back(x);
            if (out.size() > 1000000) throw ConfigError(key, "range '" + item + "' is too long");
        }
    }
    return out;
}

template <class T>
std::vector<T> parse_integers(const std::string& key, std::string_view text) {
    std::vector<T> out;
    for (double v : parse_numbers(key, text)) {
        if (v < 0 || v != std::floor(v) || v > static_cast<double>(std::numeric_limits<T>::max()))
            throw ConfigError(key, "expected nonnegative integers");
        out.push_back(static_cast<T>(v));
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, std::string>) out += v[i];
        else if constexpr (std::is_floating_point_v<T>) out += format_value(v[i]);
        else out += std::to_string(v[i]);
    }
    return out;
}

inline std::vector<std::string> all_benchmarks() {
    std::vector<std::string> r;
    for (const auto& b : prim::benchmarks()) r.push_back(b.name);
    return r;
}

struct SweepKey {
    std::string key;
    std::vector<Experiment> used_by;
    std::function<void(SweepSpec&, const std::string&, std::string_view)> parse;
    std::function<std::string(const SweepSpec&)> format;
};

inline const std::vector<SweepKey>& sweep_keys() {
    using E = Experiment;
    const std::vector<E> benches = {E::bench, E::scale_strong, E::scale_weak};
    static const std::vector<SweepKey> keys = {
        {"sweep.tasklets",
         {E::arith, E::wram_stream, E::mram_stream, E::stride, E::gups, E::roofline, E::bench, E::scale_strong, E::scale_weak},
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.tasklets = parse_integers<unsigned>(k, v); },
         [](const SweepSpec& s) { return join(s.tasklets); }},
        {"sweep.dpus", {E::transfer, E::bench, E::scale_strong, E::scale_weak},
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.dpus = parse_integers<std::uint32_t>(k, v); },
         [](const SweepSpec& s) { return join(s.dpus); }},
        {"sweep.sizes", {E::mram_stream, E::transfer, E::bench, E::scale_strong},
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.sizes = parse_integers<std::uint64_t>(k, v); },
         [](const SweepSpec& s) { return join(s.sizes); }},
        {"sweep.intensities", {E::roofline},
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.intensities = parse_numbers(k, v); },
         [](const SweepSpec& s) { return join(s.intensities); }},
        {"sweep.strides", {E::stride},
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.strides = parse_integers<std::uint32_t>(k, v); },
         [](const SweepSpec& s) { return join(s.strides); }},
        {"sweep.ops", {E::arith, E::roofline},
         [](SweepSpec& s, const std::string&, std::string_view v) { s.ops = split_list(v); },
         [](const SweepSpec& s) { return join(s.ops); }},
        {"sweep.streams", {E::wram_stream, E::mram_stream},
         [](SweepSpec& s, const std::string&, std::string_view v) { s.streams = split_list(v); },
         [](const SweepSpec& s) { return join(s.streams); }},
        {"sweep.modes", {E::stride, E::transfer},
         [](SweepSpec& s, const std::string&, std::string_view v) { s.modes = split_list(v); },
         [](const SweepSpec& s) { return join(s.modes); }},
        {"sweep.directions", {E::transfer},
         [](SweepSpec& s, const std::string&, std::string_view v) { s.directions = split_list(v); },
         [](const SweepSpec& s) { return join(s.directions); }},
        {"sweep.benchmarks", benches,
         [](SweepSpec& s, const std::string&, std::string_view v) {
             s.benchmarks = lower(pim::detail::trim(v)) == "all" ? all_benchmarks() : split_list(v);
         },
         [](const SweepSpec& s) { return join(s.benchmarks); }},
        {"sweep.variants", benches,
         [](SweepSpec& s, const std::string&, std::string_view v) { s.variants = split_list(v); },
         [](const SweepSpec& s) { return join(s.variants); }},
        {"sweep.bins", benches,
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.bins = parse_integers<std::uint32_t>(k, v); },
         [](const SweepSpec& s) { return join(s.bins); }},
        {"sweep.transfer_bytes", {E::mram_stream},
         [](SweepSpec& s, const std::string& k, std::string_view v) {
             s.transfer_bytes = static_cast<std::uint32_t>(pim::detail::parse_uint(k, v));
         },
         [](const SweepSpec& s) { return std::to_string(s.transfer_bytes); }},
        {"sweep.seed", benches,
         [](SweepSpec& s, const std::string& k, std::string_view v) { s.seed = pim::detail::parse_uint(k, v); },
         [](const SweepSpec& s) { return std::to_string(s.seed); }},
        {"sweep.seeds", {E::bench},
         [](SweepSpec& s, const std::string& k, std::string_view v) {
             s.seeds = static_cast<std::uint32_t>(pim::detail::parse_uint(k, v));
         },
         [](const SweepSpec& s) { return std::to_string(s.seeds); }},
        {"sweep.workers",
         {E::arith, E::wram_stream, E::mram_stream, E::stride, E::gups, E::roofline, E::transfer, E::bench,
          E::scale_strong, E::scale_weak, E::accept},
         [](SweepSpec& s, const std::string& k, std::string_view v) {
             s.workers = static_cast<unsigned>(pim::detail::parse_uint(k, v));
         },
         [](const SweepSpec& s) { return std::to_string(s.workers); }},
    };
    return keys;
}

inline bool uses(const SweepKey& k, Experiment e) {
    return std::find(k.used_by.begin(), k.used_by.end(), e) != k.used_by.end();
}

template <class T>
std::vector<T> iota_list(T first, T last) {
    std::vector<T> v;
    for (T x = first; x <= last; ++x) v.push_back(x);
    return v;
}

template <class T>
std::vector<T> doubling(T first, T last) {
    std::vector<T> v;
    for (T x = first; x <= last; x *= 2) v.push_back(x);
    return v;
}

}  // namespace detail

inline SweepSpec default_spec(Experiment e) {
    using detail::doubling;
    using detail::iota_list;
    SweepSpec s;
    s.experiment = e;
    switch (e) {
        case Experiment::arith:
            for (const char* op : {"add", "sub", "mul", "div"})
                for (const char* dt : {"int32", "int64", "float32", "float64"}) s.ops.push_back(std::string(op) + ":" + dt);
            s.tasklets = iota_list(1u, 24u);
            break;
        case Experiment::wram_stream:
            s.streams = {"COPY", "ADD", "SCALE", "TRIAD"};
            s.tasklets = iota_list(1u, 24u);
            break;
        case Experiment::mram_stream:
            s.sizes = doubling<std::uint64_t>(8, 2048);
            s.streams = {"COPY-DMA", "COPY", "ADD", "SCALE", "TRIAD"};
            s.tasklets = iota_list(1u, 16u);
            break;
        case Experiment::stride:
            s.modes = {"coarse", "fine"};
            s.strides = doubling<std::uint32_t>(1, 4096);
            s.tasklets = {16};
            break;
        case Experiment::gups:
            s.tasklets = iota_list(1u, 16u);
            break;
        case Experiment::roofline:
            s.ops = {"add:int32", "mul:int32", "add:float32", "mul:float32"};
            s.tasklets = {16};
            s.intensities = default_oi_grid();
            break;
        case Experiment::transfer:
            s.modes = {"serial", "parallel", "broadcast"};
            s.directions = {"cpu-dpu", "dpu-cpu"};
            s.dpus = doubling<std::uint32_t>(1, 64);
            s.sizes = {8, 512, 32768, 1 << 20, 32 << 20};
            break;
        case Experiment::bench:
            s.benchmarks = detail::all_benchmarks();
            s.dpus = {1};
            s.tasklets = {16};
            s.sizes = {0};
            break;
        case Experiment::scale_strong:
        case Experiment::scale_weak:
            s.benchmarks = detail::all_benchmarks();
            s.dpus = {1, 4, 16, 64};
            s.tasklets = {16};
            break;
        case Experiment::accept:
            break;
    }
    return s;
}

// Config text split into system keys (for load_config) and sweep.* keys.
struct SplitConfig {
    std::string system;
    std::vector<std::pair<std::string, std::string>> sweep;
};

inline SplitConfig split_config(std::string_view text) {
    SplitConfig out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = line;
        if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
        const auto eq = l.find('=');
        const auto key = eq == std::string_view::npos ? std::string_view{} : pim::detail::trim(l.substr(0, eq));
        if (key.starts_with("sweep.")) {
            out.sweep.emplace_back(std::string(key), std::string(pim::detail::trim(l.substr(eq + 1))));
            out.system += "\n";
        } else {
            out.system += line + "\n";
        }
    }
    return out;
}

// Keys the experiment does not use are checked for syntax and then ignored, so one file can serve every experiment.
inline void apply_sweep_keys(SweepSpec& s, const std::vector<std::pair<std::string, std::string>>& entries) {
    const auto& keys = detail::sweep_keys();
    for (const auto& [k, v] : entries) {
        auto it = std::find_if(keys.begin(), keys.end(), [&](const detail::SweepKey& d) { return d.key == k; });
        if (it == keys.end()) throw ConfigError(k, "unknown key");
        if (!detail::uses(*it, s.experiment)) {
            SweepSpec scratch;
            it->parse(scratch, k, v);
            continue;
        }
        it->parse(s, k, v);
    }
}

// Sweep keys used by the experiment, in `key = value` form readable by split_config.
inline std::string serialize(const SweepSpec& s) {
    std::string out;
    for (const auto& k : detail::sweep_keys())
        if (detail::uses(k, s.experiment)) out += k.key + " = " + k.format(s) + "\n";
    return out;
}

inline Json to_json(const SweepSpec& s) {
    Json j = Json::object();
    for (const auto& k : detail::sweep_keys())
        if (detail::uses(k, s.experiment)) j[k.key.substr(6)] = k.format(s);
    return j;
}

struct OpSpec {
    OpClass op;
    DataType dt;
};

inline OpSpec parse_op(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("sweep.ops", "expected op:dtype, got '" + s + "'");
    try {
        return {parse_op_class(detail::lower(s.substr(0, colon))), parse_data_type(detail::lower(s.substr(colon + 1)))};
    } catch (const ParseError& e) {
        throw ConfigError("sweep.ops", e.what());
    }
}

inline WramStream parse_wram_stream(const std::string& s) {
    for (auto v : {WramStream::copy, WramStream::add, WramStream::scale, WramStream::triad})
        if (detail::lower(name(v)) == detail::lower(s)) return v;
    throw ConfigError("sweep.streams", "unknown WRAM stream '" + s + "'");
}

inline MramStream parse_mram_stream(const std::string& s) {
    for (auto v : {MramStream::copy_dma, MramStream::copy, MramStream::add, MramStream::scale, MramStream::triad})
        if (detail::lower(name(v)) == detail::lower(s)) return v;
    throw ConfigError("sweep.streams", "unknown MRAM stream '" + s + "'");
}

inline StrideMode parse_stride_mode(const std::string& s) {
    if (detail::lower(s) == "coarse") return StrideMode::coarse;
    if (detail::lower(s) == "fine") return StrideMode::fine;
    throw ConfigError("sweep.modes", "unknown stride mode '" + s + "'");
}

inline TransferMode parse_transfer_mode(const std::string& s) {
    for (auto m : {TransferMode::serial, TransferMode::parallel, TransferMode::broadcast})
        if (name(m) == detail::lower(s)) return m;
    throw ConfigError("sweep.modes", "unknown transfer mode '" + s + "'");
}

inline TransferDirection parse_direction(const std::string& s) {
    const auto l = detail::lower(s);
    if (l == "cpu-dpu" || l == "cpu_to_dpu") return TransferDirection::cpu_to_dpu;
    if (l == "dpu-cpu" || l == "dpu_to_cpu") return TransferDirection::dpu_to_cpu;
    throw ConfigError("sweep.directions", "unknown direction '" + s + "'");
}

// Throws ConfigError naming the first invalid axis.
inline void validate(const SweepSpec& s, const SystemConfig& sys) {
    const auto nonempty = [&](const auto& axis, const char* key) {
        if (axis.empty()) throw ConfigError(key, "axis is empty");
    };
    for (const auto& k : detail::sweep_keys()) {
        if (!detail::uses(k, s.experiment) || k.key == "sweep.variants" || k.key == "sweep.bins") continue;
        if (k.key == "sweep.sizes" && s.experiment == Experiment::scale_strong) continue;
        if (k.format(s).empty()) throw ConfigError(k.key, "axis is empty");
    }
    const auto uses = [&](const char* key) {
        const auto& keys = detail::sweep_keys();
        return detail::uses(*std::find_if(keys.begin(), keys.end(), [&](const auto& d) { return d.key == key; }),
                            s.experiment);
    };
    if (uses("sweep.tasklets"))
        for (unsigned t : s.tasklets)
            if (t < 1 || t > sys.dpu.max_tasklets)
                throw ConfigError("sweep.tasklets", std::to_string(t) + " is outside [1, " +
                                                        std::to_string(sys.dpu.max_tasklets) + "]");
    if (uses("sweep.dpus"))
        for (auto d : s.dpus)
            if (d < 1 || d > sys.total_dpus())
                throw ConfigError("sweep.dpus", std::to_string(d) + " is outside [1, " + std::to_string(sys.total_dpus()) + "]");
    switch (s.experiment) {
        case Experiment::arith:
        case Experiment::roofline:
            nonempty(s.ops, "sweep.ops");
            for (const auto& o : s.ops) parse_op(o);
            for (double oi : s.intensities)
                if (!(oi > 0) || !std::isfinite(oi)) throw ConfigError("sweep.intensities", "must be positive");
            break;
        case Experiment::wram_stream:
            for (const auto& v : s.streams) parse_wram_stream(v);
            break;
        case Experiment::mram_stream:
            for (const auto& v : s.streams) parse_mram_stream(v);
            try {
                for (auto b : s.sizes) check_dma_size(b, sys.dpu);
                check_dma_size(s.transfer_bytes, sys.dpu);
            } catch (const DmaError& e) {
                throw ConfigError("sweep.sizes", e.what());
            }
            break;
        case Experiment::stride:
            for (const auto& m : s.modes) parse_stride_mode(m);
            for (auto st : s.strides)
                if (st < 1) throw ConfigError("sweep.strides", "must be at least 1");
            break;
        case Experiment::transfer:
            for (const auto& m : s.modes) parse_transfer_mode(m);
            for (const auto& d : s.directions) parse_direction(d);
            for (auto b : s.sizes)
                if (b == 0 || b > sys.dpu.mram_bytes) throw ConfigError("sweep.sizes", "must be in [1, MRAM size]");
            break;
        case Experiment::bench:
        case Experiment::scale_strong:
        case Experiment::scale_weak:
            for (const auto& b : s.benchmarks) {
                try {
                    prim::find_benchmark(b);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("sweep.benchmarks", e.what());
                }
            }
            for (const auto& v : s.variants) {
                const auto u = detail::lower(v);
                if (u != "single" && u != "barrier" && u != "hands")
                    throw ConfigError("sweep.variants", "unknown RED variant '" + v + "'");
            }
            for (auto b : s.bins)
                if (!std::has_single_bit(b) || b > 4096) throw ConfigError("sweep.bins", "must be a power of two up to 4096");
            if (s.experiment == Experiment::bench && s.seeds == 0) throw ConfigError("sweep.seeds", "must be at least 1");
            break;
        default:
            break;
    }
}

namespace detail {

struct RowOut {
    std::vector<Value> cells;
    Json extra = Json::object();
};

using Point = std::function<std::vector<RowOut>()>;

inline std::vector<std::vector<RowOut>> run_points(const std::vector<Point>& points, unsigned workers) {
    std::vector<std::vector<RowOut>> out(points.size());
    parallel_for(points.size(), workers ? workers : default_workers(), [&](std::size_t i) { out[i] = points[i](); });
    return out;
}

inline std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

inline double seconds(double cycles, const SystemConfig& sys) { return cycles / sys.dpu.frequency_hz; }

inline std::vector<std::string> bench_columns() {
    return {"benchmark", "variant", "dpus", "tasklets", "seed", "size", "dataset", "correct", "dpu_cycles",
            "launches", "dpu_s", "inter_dpu_s", "cpu_dpu_s", "dpu_cpu_s", "total_s"};
}

inline RowOut bench_row(const prim::ExperimentRecord& r) {
    const auto& t = r.time;
    RowOut row{{r.benchmark, r.variant, std::int64_t{r.dpus}, std::int64_t{r.tasklets}, i64(r.seed), i64(r.size),
                r.dataset, r.correct, i64(t.dpu_cycles), std::int64_t{t.launches}, t.dpu_seconds, t.inter_dpu_seconds,
                t.cpu_to_dpu_seconds, t.dpu_to_cpu_seconds, t.total_seconds()}};
    row.extra["mismatch"] = r.mismatch;
    row.extra["launch_cycles"] = r.launch_cycles;
    row.extra["detail"] = Json(r.detail);
    return row;
}

// One grid point per benchmark configuration; RED expands over variants and HST over bins.
struct BenchPoint {
    const prim::Benchmark* bench;
    prim::BenchParams params;
};

inline std::vector<BenchPoint> expand_variants(const SweepSpec& s, const prim::Benchmark& b, prim::BenchParams p) {
    std::vector<BenchPoint> out;
    if (b.name == "RED" && !s.variants.empty()) {
        for (const auto& v : s.variants) {
            p.variant = v;
            out.push_back({&b, p});
        }
    } else if (b.name.starts_with("HST-") && !s.bins.empty()) {
        for (auto bins : s.bins) {
            p.bins = bins;
            out.push_back({&b, p});
        }
    } else {
        out.push_back({&b, p});
    }
    return out;
}

}  // namespace detail

// Runs every grid point of `s` on a worker pool; rows are ordered by grid index.
inline Table run_sweep(const SweepSpec& s, const SystemConfig& sys) {
    using detail::i64;
    using detail::Point;
    using detail::RowOut;
    validate(s, sys);
    const DpuConfig& cfg = sys.dpu;
    Table t;
    t.experiment = std::string(name(s.experiment));
    std::vector<Point> points;

    switch (s.experiment) {
        case Experiment::arith:
            t.columns = {"op", "dtype", "tasklets", "loop_instructions", "cycles_per_op", "seconds_per_op", "mops"};
            for (const auto& o : s.ops)
                for (unsigned tk : s.tasklets)
                    points.push_back([&, o, tk] {
                        const auto [op, dt] = parse_op(o);
                        const double ops = arithmetic_throughput(op, dt, tk, cfg);
                        const auto loop = loop_instruction_count(op, dt, cfg.costs);
                        const double cycles = static_cast<double>(loop) * cfg.dispatch_interval /
                                              std::min(tk, cfg.dispatch_interval);
                        return std::vector<RowOut>{{{std::string(name(op)), std::string(name(dt)), std::int64_t{tk},
                                                     std::int64_t{loop}, cycles, detail::seconds(cycles, sys),
                                                     ops / 1e6}}};
                    });
            break;

        case Experiment::wram_stream:
            t.columns = {"stream", "tasklets", "bytes", "cycles", "seconds", "bandwidth_mbps"};
            for (const auto& v : s.streams)
                for (unsigned tk : s.tasklets)
                    points.push_back([&, v, tk] {
                        const auto st = parse_wram_stream(v);
                        const auto r = wram_stream_bandwidth(st, tk, cfg);
                        return std::vector<RowOut>{{{std::string(name(st)), std::int64_t{tk}, r.bytes_moved, r.cycles,
                                                     detail::seconds(r.cycles, sys), r.bandwidth / 1e6}}};
                    });
            break;

        case Experiment::mram_stream:
            t.columns = {"kind", "name", "tasklets", "transfer_bytes", "bytes", "cycles", "seconds", "bandwidth_mbps"};
            for (auto size : s.sizes)
                for (auto dir : {DmaDirection::mram_to_wram, DmaDirection::wram_to_mram})
                    points.push_back([&, size, dir] {
                        const auto b = static_cast<std::uint32_t>(size);
                        const double cycles = static_cast<double>(dma_latency({dir, b, 0}, cfg));
                        return std::vector<RowOut>{{{std::string("dma"),
                                                     std::string(dir == DmaDirection::mram_to_wram ? "read" : "write"),
                                                     std::int64_t{1}, i64(size), static_cast<double>(size), cycles,
                                                     detail::seconds(cycles, sys), dma_bandwidth(b, dir, cfg) / 1e6}}};
                    });
            for (const auto& v : s.streams)
                for (unsigned tk : s.tasklets)
                    points.push_back([&, v, tk] {
                        const auto st = parse_mram_stream(v);
                        const auto r = mram_stream_bandwidth(st, tk, s.transfer_bytes, cfg);
                        return std::vector<RowOut>{{{std::string("stream"), std::string(name(st)), std::int64_t{tk},
                                                     std::int64_t{s.transfer_bytes}, r.bytes_moved, r.cycles,
                                                     detail::seconds(r.cycles, sys), r.bandwidth / 1e6}}};
                    });
            break;

        case Experiment::stride:
            t.columns = {"mode", "stride", "tasklets", "bytes", "cycles", "seconds", "bandwidth_mbps"};
            for (const auto& m : s.modes)
                for (auto st : s.strides)
                    for (unsigned tk : s.tasklets)
                        points.push_back([&, m, st, tk] {
                            const auto mode = parse_stride_mode(m);
                            const auto r = strided_bandwidth(mode, st, tk, cfg);
                            return std::vector<RowOut>{{{std::string(name(mode)), std::int64_t{st}, std::int64_t{tk},
                                                         r.bytes_moved, r.cycles, detail::seconds(r.cycles, sys),
                                                         r.bandwidth / 1e6}}};
                        });
            break;

        case Experiment::gups:
            t.columns = {"tasklets", "bytes", "cycles", "seconds", "bandwidth_mbps"};
            for (unsigned tk : s.tasklets)
                points.push_back([&, tk] {
                    const auto r = random_access_bandwidth(tk, cfg);
                    return std::vector<RowOut>{
                        {{std::int64_t{tk}, r.bytes_moved, r.cycles, detail::seconds(r.cycles, sys), r.bandwidth / 1e6}}};
                });
            break;

        case Experiment::roofline:
            t.columns = {"op", "dtype", "tasklets", "oi", "compute_mops", "memory_mbps", "throughput_mops", "knee_oi",
                         "saturation_oi", "compute_bound"};
            for (const auto& o : s.ops)
                for (unsigned tk : s.tasklets)
                    points.push_back([&, o, tk] {
                        const auto [op, dt] = parse_op(o);
                        const Roofline r = roofline(op, dt, tk, cfg);
                        auto grid = s.intensities;
                        std::sort(grid.begin(), grid.end());
                        const double sat = saturation_intensity(r, grid);
                        std::vector<RowOut> rows;
                        for (double oi : s.intensities) {
                            const double x = r.throughput(oi);
                            rows.push_back({{std::string(name(op)), std::string(name(dt)), std::int64_t{tk}, oi,
                                             r.compute_ops / 1e6, r.memory_bps / 1e6, x / 1e6, r.knee(), sat,
                                             x >= r.compute_ops}});
                        }
                        return rows;
                    });
            break;

        case Experiment::transfer:
            t.columns = {"mode", "direction", "dpus", "bytes_per_dpu", "payload_bytes", "seconds", "bandwidth_gbps"};
            for (const auto& m : s.modes)
                for (const auto& d : s.directions) {
                    const auto mode = parse_transfer_mode(m);
                    const auto dir = parse_direction(d);
                    if (mode == TransferMode::broadcast && dir == TransferDirection::dpu_to_cpu) continue;
                    for (auto n : s.dpus)
                        for (auto size : s.sizes)
                            points.push_back([&, mode, dir, n, size] {
                                const TransferPlan plan{mode, dir, std::vector<std::uint64_t>(n, size)};
                                const auto c = system_transfer_time(plan, sys);
                                return std::vector<RowOut>{{{std::string(name(mode)), std::string(name(dir)),
                                                             std::int64_t{n}, i64(size), c.payload_bytes, c.seconds,
                                                             c.bandwidth_bps / 1e9}}};
                            });
                }
            break;

        case Experiment::bench:
        case Experiment::scale_strong:
        case Experiment::scale_weak: {
            t.columns = detail::bench_columns();
            if (s.experiment == Experiment::scale_strong) {
                t.columns.push_back("speedup_vs_previous");
                t.columns.push_back("speedup_vs_first");
            } else if (s.experiment == Experiment::scale_weak) {
                t.columns.push_back("relative_dpu_cycles");
            }
            std::vector<detail::BenchPoint> bp;
            const std::uint32_t seeds = s.experiment == Experiment::bench ? s.seeds : 1;
            for (const auto& name : s.benchmarks) {
                const auto& b = prim::find_benchmark(name);
                std::vector<std::uint64_t> sizes = s.sizes;
                if (s.experiment == Experiment::scale_weak || (s.experiment == Experiment::scale_strong && sizes.empty()))
                    sizes = {0};
                for (auto size : sizes)
                    for (std::uint32_t k = 0; k < seeds; ++k)
                        for (unsigned tk : s.tasklets) {
                            prim::BenchParams p;
                            p.tasklets = tk;
                            p.seed = s.seed + k;
                            for (auto x : detail::expand_variants(s, b, p))
                                for (auto d : s.dpus) {
                                    x.params.dpus = d;
                                    x.params.size = s.experiment == Experiment::scale_weak ? b.weak(d)
                                                    : s.experiment == Experiment::scale_strong && size == 0 ? b.strong
                                                                                                          : size;
                                    bp.push_back(x);
                                }
                        }
            }
            for (const auto& x : bp)
                points.push_back([&sys, x] { return std::vector<RowOut>{detail::bench_row(x.bench->run(sys, x.params))}; });
            auto results = detail::run_points(points, s.workers);
            if (s.experiment != Experiment::bench) {
                // Group rows whose only difference is the DPU count.
                for (std::size_t i = 0; i < results.size(); ++i) {
                    auto& row = results[i][0];
                    const auto cycles = static_cast<double>(std::get<std::int64_t>(row.cells[8]));
                    std::size_t first = i;
                    while (first > 0 && std::get<std::int64_t>(results[first - 1][0].cells[2]) <
                                            std::get<std::int64_t>(results[first][0].cells[2]) &&
                           results[first - 1][0].cells[0] == row.cells[0] && results[first - 1][0].cells[1] == row.cells[1])
                        --first;
                    const auto first_cycles = static_cast<double>(std::get<std::int64_t>(results[first][0].cells[8]));
                    if (s.experiment == Experiment::scale_strong) {
                        const auto prev =
                            i == first ? cycles : static_cast<double>(std::get<std::int64_t>(results[i - 1][0].cells[8]));
                        row.cells.push_back(cycles > 0 ? prev / cycles : 0.0);
                        row.cells.push_back(cycles > 0 ? first_cycles / cycles : 0.0);
                    } else {
                        row.cells.push_back(first_cycles > 0 ? cycles / first_cycles : 0.0);
                    }
                }
            }
            for (auto& rows : results)
                for (auto& r : rows) t.add(std::move(r.cells), std::move(r.extra));
            return t;
        }

        case Experiment::accept:
            throw std::invalid_argument("accept is not a sweep");
    }
    for (auto& rows : detail::run_points(points, s.workers))
        for (auto& r : rows) t.add(std::move(r.cells), std::move(r.extra));
    return t;
}

}  // namespace pim::exp
