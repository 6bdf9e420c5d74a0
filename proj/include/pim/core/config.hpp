#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pim/core/cost_table.hpp"
#include "pim/core/types.hpp"

namespace pim {

struct SyncCost {
    // Release of a barrier happens this long after the last arrival.
    // Defaults fit the 2K-element reduction comparison at 16 tasklets.
    double barrier_base_cycles = 64;
    double barrier_per_tasklet_cycles = 255;
    // Charged as pipeline instructions of the calling tasklet.
    std::uint32_t mutex_lock_instructions = 1;
    std::uint32_t mutex_unlock_instructions = 1;
    // Delay between a matched notify/wait pair and the waiter resuming.
    double handshake_cycles = 1300;
    double semaphore_cycles = 20;

    friend bool operator==(const SyncCost&, const SyncCost&) = default;
};

struct DpuConfig {
    double frequency_hz = 350e6;
    std::uint32_t pipeline_depth = 14;
    std::uint32_t dispatch_interval = 11;
    std::uint32_t max_tasklets = 24;
    std::uint64_t wram_bytes = 65536;
    std::uint64_t wram_stack_bytes = 1024;
    std::uint64_t iram_capacity = 4096;
    std::uint64_t mram_bytes = 64ull << 20;
    double dma_alpha_read = 77;
    double dma_alpha_write = 61;
    double dma_beta = 0.5;
    std::uint32_t dma_min_bytes = 8;
    std::uint32_t dma_max_bytes = 2048;
    std::uint32_t dma_granularity = 8;
    // Share of alpha hidden for back-to-back queued requests of at most fine_dma_max_bytes.
    double fine_dma_overlap = 0.495;
    std::uint32_t fine_dma_max_bytes = 8;
    // Pipeline instructions to issue one mram_read/mram_write.
    std::uint32_t dma_issue_instructions = 2;
    SyncCost sync;
    InstructionCostTable costs;

    friend bool operator==(const DpuConfig&, const DpuConfig&) = default;
};

namespace detail {

inline constexpr double kCalibrationBytes = 32.0 * 1024 * 1024;

// Table over 1, 2, 4, ... n_max reaching `at_max` at n_max on a power law.
inline std::vector<double> power_law_table(double at_max, double n_max) {
    std::vector<double> t;
    for (double n = 1; n <= n_max; n *= 2) t.push_back(std::pow(n, std::log(at_max) / std::log(n_max)));
    t.back() = at_max;
    return t;
}

inline std::vector<double> doubling_grid(double n_max) {
    std::vector<double> t;
    for (double n = 1; n <= n_max; n *= 2) t.push_back(n);
    return t;
}

}  // namespace detail

struct HostLinkConfig {
    // Per-DPU bandwidth(size) = max * size / (size + half), fitted at 32 MiB.
    // DPU-CPU half size makes both directions share the small-size slope.
    double cpu_dpu_max_bandwidth_bps = 0.33e9 * (detail::kCalibrationBytes + 32768.0) / detail::kCalibrationBytes;
    double cpu_dpu_half_size_bytes = 32768;
    double dpu_cpu_max_bandwidth_bps =
        0.12e9 / (1.0 - 0.12e9 * (32768.0 / cpu_dpu_max_bandwidth_bps) / detail::kCalibrationBytes);
    double dpu_cpu_half_size_bytes = dpu_cpu_max_bandwidth_bps * 32768.0 / cpu_dpu_max_bandwidth_bps;
    // Speedup over one DPU at each entry of parallel_dpus, log-log interpolated.
    std::vector<double> parallel_dpus = detail::doubling_grid(64);
    std::vector<double> cpu_dpu_parallel_speedup = detail::power_law_table(20.13, 64);
    std::vector<double> dpu_cpu_parallel_speedup = detail::power_law_table(38.76, 64);
    // Broadcast bandwidth over one-DPU CPU-DPU bandwidth at the same per-DPU size.
    std::vector<double> broadcast_speedup = detail::power_law_table(16.88 / 0.33, 64);
    double rank_peak_bandwidth_bps = 19.2e9;
    // Extra factor on multi-rank transfer time (NUMA); 1 disables it.
    double rank_group_slowdown = 1.0;
    double host_ops_per_second = 1e9;

    friend bool operator==(const HostLinkConfig&, const HostLinkConfig&) = default;
};

struct SystemConfig {
    std::uint32_t n_ranks = 1;
    std::uint32_t dpus_per_rank = 64;
    DpuConfig dpu;
    HostLinkConfig host_link;

    std::uint32_t total_dpus() const { return n_ranks * dpus_per_rank; }

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, std::string_view text) {
    const std::string s(trim(text));
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError(key, "not a number: '" + s + "'");
    return v;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view text) {
    const double v = parse_double(key, text);
    if (v < 0 || v != std::floor(v) || v > 9.0e18)
        throw ConfigError(key, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct Field {
    std::string key;
    std::function<void(SystemConfig&, const std::string&, std::string_view)> parse;
    std::function<std::string(const SystemConfig&)> format;
};

template <class T>
Field real_field(std::string key, T SystemConfig::*outer, double T::*member) {
    return {std::move(key),
            [=](SystemConfig& c, const std::string& k, std::string_view v) {
                c.*outer.*member = parse_double(k, v);
            },
            [=](const SystemConfig& c) { return format_double(c.*outer.*member); }};
}

template <class T, class U>
Field uint_field(std::string key, T SystemConfig::*outer, U T::*member) {
    return {std::move(key),
            [=](SystemConfig& c, const std::string& k, std::string_view v) {
                const std::uint64_t x = parse_uint(k, v);
                if (x > std::numeric_limits<U>::max()) throw ConfigError(k, "value too large");
                c.*outer.*member = static_cast<U>(x);
            },
            [=](const SystemConfig& c) { return std::to_string(c.*outer.*member); }};
}

inline Field list_field(std::string key, std::vector<double> HostLinkConfig::*member) {
    return {std::move(key),
            [=](SystemConfig& c, const std::string& k, std::string_view v) {
                std::vector<double> out;
                std::string_view rest = v;
                while (true) {
                    const auto comma = rest.find(',');
                    out.push_back(parse_double(k, rest.substr(0, comma)));
                    if (comma == std::string_view::npos) break;
                    rest = rest.substr(comma + 1);
                }
                c.host_link.*member = std::move(out);
            },
            [=](const SystemConfig& c) {
                std::string s;
                for (double x : c.host_link.*member) s += (s.empty() ? "" : ", ") + format_double(x);
                return s;
            }};
}

inline const std::vector<Field>& fields() {
    static const std::vector<Field> all = [] {
        using D = DpuConfig;
        using H = HostLinkConfig;
        const auto dpu = &SystemConfig::dpu;
        const auto host = &SystemConfig::host_link;
        std::vector<Field> f;
        f.push_back({"n_ranks",
                     [](SystemConfig& c, const std::string& k, std::string_view v) {
                         c.n_ranks = static_cast<std::uint32_t>(parse_uint(k, v));
                     },
                     [](const SystemConfig& c) { return std::to_string(c.n_ranks); }});
        f.push_back({"dpus_per_rank",
                     [](SystemConfig& c, const std::string& k, std::string_view v) {
                         c.dpus_per_rank = static_cast<std::uint32_t>(parse_uint(k, v));
                     },
                     [](const SystemConfig& c) { return std::to_string(c.dpus_per_rank); }});
        f.push_back(real_field("frequency_hz", dpu, &D::frequency_hz));
        f.push_back(uint_field("pipeline_depth", dpu, &D::pipeline_depth));
        f.push_back(uint_field("dispatch_interval", dpu, &D::dispatch_interval));
        f.push_back(uint_field("max_tasklets", dpu, &D::max_tasklets));
        f.push_back(uint_field("wram_bytes", dpu, &D::wram_bytes));
        f.push_back(uint_field("wram_stack_bytes", dpu, &D::wram_stack_bytes));
        f.push_back(uint_field("iram_capacity", dpu, &D::iram_capacity));
        f.push_back(uint_field("mram_bytes", dpu, &D::mram_bytes));
        f.push_back(real_field("dma_alpha_read_cycles", dpu, &D::dma_alpha_read));
        f.push_back(real_field("dma_alpha_write_cycles", dpu, &D::dma_alpha_write));
        f.push_back(real_field("dma_beta_cycles_per_byte", dpu, &D::dma_beta));
        f.push_back(uint_field("dma_min_bytes", dpu, &D::dma_min_bytes));
        f.push_back(uint_field("dma_max_bytes", dpu, &D::dma_max_bytes));
        f.push_back(uint_field("dma_granularity_bytes", dpu, &D::dma_granularity));
        f.push_back(real_field("fine_dma_overlap", dpu, &D::fine_dma_overlap));
        f.push_back(uint_field("fine_dma_max_bytes", dpu, &D::fine_dma_max_bytes));
        f.push_back(uint_field("dma_issue_instructions", dpu, &D::dma_issue_instructions));
        const auto sync_real = [](std::string key, double SyncCost::*m) {
            return Field{std::move(key),
                         [=](SystemConfig& c, const std::string& k, std::string_view v) {
                             c.dpu.sync.*m = parse_double(k, v);
                         },
                         [=](const SystemConfig& c) { return format_double(c.dpu.sync.*m); }};
        };
        const auto sync_uint = [](std::string key, std::uint32_t SyncCost::*m) {
            return Field{std::move(key),
                         [=](SystemConfig& c, const std::string& k, std::string_view v) {
                             c.dpu.sync.*m = static_cast<std::uint32_t>(parse_uint(k, v));
                         },
                         [=](const SystemConfig& c) { return std::to_string(c.dpu.sync.*m); }};
        };
        f.push_back(sync_real("sync_barrier_base_cycles", &SyncCost::barrier_base_cycles));
        f.push_back(sync_real("sync_barrier_per_tasklet_cycles", &SyncCost::barrier_per_tasklet_cycles));
        f.push_back(sync_uint("sync_mutex_lock_instructions", &SyncCost::mutex_lock_instructions));
        f.push_back(sync_uint("sync_mutex_unlock_instructions", &SyncCost::mutex_unlock_instructions));
        f.push_back(sync_real("sync_handshake_cycles", &SyncCost::handshake_cycles));
        f.push_back(sync_real("sync_semaphore_cycles", &SyncCost::semaphore_cycles));
        for (OpClass op : kAllOpClasses)
            for (DataType dt : kAllDataTypes) {
                if (!InstructionCostTable::is_configurable(op, dt)) continue;
                f.push_back({"cost_" + std::string(name(op)) + "_" + std::string(name(dt)),
                             [=](SystemConfig& c, const std::string& k, std::string_view v) {
                                 const std::uint64_t n = parse_uint(k, v);
                                 if (n < 1 || n > 1000000) throw ConfigError(k, "must be in [1, 1000000]");
                                 c.dpu.costs.set(op, dt, static_cast<std::uint32_t>(n));
                             },
                             [=](const SystemConfig& c) { return std::to_string(c.dpu.costs(op, dt)); }});
            }
        f.push_back(real_field("host_cpu_dpu_max_bandwidth_bps", host, &H::cpu_dpu_max_bandwidth_bps));
        f.push_back(real_field("host_cpu_dpu_half_size_bytes", host, &H::cpu_dpu_half_size_bytes));
        f.push_back(real_field("host_dpu_cpu_max_bandwidth_bps", host, &H::dpu_cpu_max_bandwidth_bps));
        f.push_back(real_field("host_dpu_cpu_half_size_bytes", host, &H::dpu_cpu_half_size_bytes));
        f.push_back(list_field("host_parallel_dpus", &H::parallel_dpus));
        f.push_back(list_field("host_cpu_dpu_parallel_speedup", &H::cpu_dpu_parallel_speedup));
        f.push_back(list_field("host_dpu_cpu_parallel_speedup", &H::dpu_cpu_parallel_speedup));
        f.push_back(list_field("host_broadcast_speedup", &H::broadcast_speedup));
        f.push_back(real_field("host_rank_peak_bandwidth_bps", host, &H::rank_peak_bandwidth_bps));
        f.push_back(real_field("host_rank_group_slowdown", host, &H::rank_group_slowdown));
        f.push_back(real_field("host_ops_per_second", host, &H::host_ops_per_second));
        return f;
    }();
    return all;
}

inline void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

}  // namespace detail

// Throws ConfigError naming the first offending key.
inline void validate(const SystemConfig& c) {
    using detail::require;
    const DpuConfig& d = c.dpu;
    const HostLinkConfig& h = c.host_link;
    require(c.n_ranks >= 1, "n_ranks", "must be at least 1");
    require(c.dpus_per_rank >= 1, "dpus_per_rank", "must be at least 1");
    require(d.frequency_hz > 0, "frequency_hz", "must be positive");
    require(d.pipeline_depth >= 1, "pipeline_depth", "must be at least 1");
    require(d.dispatch_interval >= 1, "dispatch_interval", "must be at least 1");
    require(d.dispatch_interval < d.pipeline_depth, "dispatch_interval", "must be less than pipeline_depth");
    require(d.max_tasklets >= 1, "max_tasklets", "must be at least 1");
    require(d.wram_bytes >= 8, "wram_bytes", "must be at least 8");
    require(d.wram_stack_bytes % 8 == 0, "wram_stack_bytes", "must be a multiple of 8");
    require(d.iram_capacity >= 1, "iram_capacity", "must be at least 1");
    require(d.mram_bytes >= 8 && d.mram_bytes % 8 == 0, "mram_bytes", "must be a positive multiple of 8");
    require(d.dma_alpha_read >= 0, "dma_alpha_read_cycles", "must be nonnegative");
    require(d.dma_alpha_write >= 0, "dma_alpha_write_cycles", "must be nonnegative");
    require(d.dma_beta >= 0, "dma_beta_cycles_per_byte", "must be nonnegative");
    require(d.dma_granularity >= 1, "dma_granularity_bytes", "must be at least 1");
    require(d.dma_min_bytes >= d.dma_granularity && d.dma_min_bytes % d.dma_granularity == 0, "dma_min_bytes",
            "must be a positive multiple of dma_granularity_bytes");
    require(d.dma_max_bytes % d.dma_granularity == 0, "dma_max_bytes",
            "must be a multiple of dma_granularity_bytes");
    require(d.dma_min_bytes <= d.dma_max_bytes, "dma_max_bytes", "must be at least dma_min_bytes");
    require(d.fine_dma_overlap >= 0 && d.fine_dma_overlap <= 1, "fine_dma_overlap", "must be in [0, 1]");
    require(d.sync.barrier_base_cycles >= 0, "sync_barrier_base_cycles", "must be nonnegative");
    require(d.sync.barrier_per_tasklet_cycles >= 0, "sync_barrier_per_tasklet_cycles", "must be nonnegative");
    require(d.sync.handshake_cycles >= 0, "sync_handshake_cycles", "must be nonnegative");
    require(d.sync.semaphore_cycles >= 0, "sync_semaphore_cycles", "must be nonnegative");
    require(h.cpu_dpu_max_bandwidth_bps > 0, "host_cpu_dpu_max_bandwidth_bps", "must be positive");
    require(h.dpu_cpu_max_bandwidth_bps > 0, "host_dpu_cpu_max_bandwidth_bps", "must be positive");
    require(h.dpu_cpu_max_bandwidth_bps <= h.cpu_dpu_max_bandwidth_bps, "host_dpu_cpu_max_bandwidth_bps",
            "must not exceed host_cpu_dpu_max_bandwidth_bps");
    require(h.cpu_dpu_half_size_bytes > 0, "host_cpu_dpu_half_size_bytes", "must be positive");
    require(h.dpu_cpu_half_size_bytes > 0, "host_dpu_cpu_half_size_bytes", "must be positive");
    require(!h.parallel_dpus.empty() && h.parallel_dpus.front() == 1, "host_parallel_dpus",
            "must start at 1");
    for (std::size_t i = 1; i < h.parallel_dpus.size(); ++i)
        require(h.parallel_dpus[i] > h.parallel_dpus[i - 1], "host_parallel_dpus", "must be increasing");
    const auto check_table = [&](const std::vector<double>& t, const char* key) {
        require(t.size() == h.parallel_dpus.size(), key, "must have one entry per host_parallel_dpus value");
        for (double x : t) require(x > 0, key, "entries must be positive");
    };
    check_table(h.cpu_dpu_parallel_speedup, "host_cpu_dpu_parallel_speedup");
    check_table(h.dpu_cpu_parallel_speedup, "host_dpu_cpu_parallel_speedup");
    check_table(h.broadcast_speedup, "host_broadcast_speedup");
    require(h.rank_peak_bandwidth_bps > 0, "host_rank_peak_bandwidth_bps", "must be positive");
    require(h.rank_group_slowdown >= 1, "host_rank_group_slowdown", "must be at least 1");
    require(h.host_ops_per_second > 0, "host_ops_per_second", "must be positive");
}

// Named starting points selectable with the "preset" key.
inline SystemConfig preset(std::string_view name) {
    SystemConfig c;
    if (name == "upmem-2556") return c;
    if (name == "upmem-640") {
        c.dpu.frequency_hz = 267e6;
        c.n_ranks = 10;
        return c;
    }
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

// Flat "key = value" lines; '#' starts a comment; absent keys keep their defaults.
inline SystemConfig load_config(std::string_view source) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in{std::string(source)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view l = line;
        if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
        l = detail::trim(l);
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(l), "line " + std::to_string(lineno) + " has no '='");
        entries.emplace_back(std::string(detail::trim(l.substr(0, eq))),
                             std::string(detail::trim(l.substr(eq + 1))));
    }
    SystemConfig c;
    for (const auto& [k, v] : entries)
        if (k == "preset") c = preset(v);
    for (const auto& [k, v] : entries) {
        if (k == "preset") continue;
        const auto& all = detail::fields();
        auto it = std::find_if(all.begin(), all.end(), [&](const detail::Field& f) { return f.key == k; });
        if (it == all.end()) throw ConfigError(k, "unknown key");
        it->parse(c, k, v);
    }
    validate(c);
    return c;
}

inline SystemConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return load_config(ss.str());
}

inline std::string serialize(const SystemConfig& c) {
    std::string out;
    for (const auto& f : detail::fields()) out += f.key + " = " + f.format(c) + "\n";
    return out;
}

}  // namespace pim
