#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pim/core/config.hpp"

namespace pim {

enum class TransferMode : std::uint8_t { serial, parallel, broadcast };
enum class TransferDirection : std::uint8_t { cpu_to_dpu, dpu_to_cpu };

inline constexpr std::string_view name(TransferMode m) {
    return m == TransferMode::serial ? "serial" : m == TransferMode::parallel ? "parallel" : "broadcast";
}
inline constexpr std::string_view name(TransferDirection d) {
    return d == TransferDirection::cpu_to_dpu ? "cpu_to_dpu" : "dpu_to_cpu";
}

// Zero entries are DPUs not involved in the transfer.
struct TransferPlan {
    TransferMode mode = TransferMode::parallel;
    TransferDirection direction = TransferDirection::cpu_to_dpu;
    std::vector<std::uint64_t> sizes;
};

struct TransferCost {
    double seconds = 0;
    double payload_bytes = 0;
    double bandwidth_bps = 0;
};

class TransferError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline double single_dpu_bandwidth(TransferDirection d, double bytes, const HostLinkConfig& h) {
    const bool in = d == TransferDirection::cpu_to_dpu;
    const double max = in ? h.cpu_dpu_max_bandwidth_bps : h.dpu_cpu_max_bandwidth_bps;
    const double half = in ? h.cpu_dpu_half_size_bytes : h.dpu_cpu_half_size_bytes;
    return max * bytes / (bytes + half);
}

inline double single_dpu_time(TransferDirection d, double bytes, const HostLinkConfig& h) {
    return bytes <= 0 ? 0.0 : bytes / single_dpu_bandwidth(d, bytes, h);
}

// Log-log interpolation of a speedup table; extrapolates along the last segment.
inline double interpolate_speedup(const std::vector<double>& table, double n, const HostLinkConfig& h) {
    const auto& xs = h.parallel_dpus;
    if (n <= xs.front()) return table.front();
    std::size_t i = 1;
    while (i + 1 < xs.size() && xs[i] < n) ++i;
    const double x0 = std::log(xs[i - 1]), x1 = std::log(xs[i]);
    const double y0 = std::log(table[i - 1]), y1 = std::log(table[i]);
    return std::exp(y0 + (y1 - y0) * (std::log(n) - x0) / (x1 - x0));
}

inline double parallel_speedup(TransferDirection d, double n, const HostLinkConfig& h) {
    return interpolate_speedup(
        d == TransferDirection::cpu_to_dpu ? h.cpu_dpu_parallel_speedup : h.dpu_cpu_parallel_speedup, n, h);
}

inline double broadcast_speedup(double n, const HostLinkConfig& h) {
    return interpolate_speedup(h.broadcast_speedup, n, h);
}

inline void check_plan(const TransferPlan& plan) {
    if (plan.mode == TransferMode::broadcast && plan.direction == TransferDirection::dpu_to_cpu)
        throw TransferError("broadcast is only defined for cpu_to_dpu transfers");
    if (plan.mode == TransferMode::serial) return;
    std::uint64_t common = 0;
    for (std::uint64_t s : plan.sizes) {
        if (s == 0) continue;
        if (common != 0 && s != common)
            throw TransferError(std::string(name(plan.mode)) + " transfers need equal per-DPU sizes");
        common = s;
    }
}

// Prices a plan whose DPUs all belong to one rank.
inline TransferCost transfer_time(const TransferPlan& plan, const HostLinkConfig& h) {
    check_plan(plan);
    TransferCost c;
    c.payload_bytes = static_cast<double>(std::accumulate(plan.sizes.begin(), plan.sizes.end(), std::uint64_t{0}));
    const auto involved = static_cast<double>(std::count_if(plan.sizes.begin(), plan.sizes.end(),
                                                            [](std::uint64_t s) { return s > 0; }));
    if (involved == 0) return c;
    const double size = static_cast<double>(*std::max_element(plan.sizes.begin(), plan.sizes.end()));
    switch (plan.mode) {
        case TransferMode::serial:
            for (std::uint64_t s : plan.sizes) c.seconds += single_dpu_time(plan.direction, static_cast<double>(s), h);
            break;
        case TransferMode::parallel:
            c.seconds = single_dpu_time(plan.direction, size, h) * involved / parallel_speedup(plan.direction, involved, h);
            break;
        case TransferMode::broadcast:
            c.seconds = c.payload_bytes /
                        (broadcast_speedup(involved, h) * single_dpu_bandwidth(plan.direction, size, h));
            break;
    }
    c.seconds = std::max(c.seconds, c.payload_bytes / h.rank_peak_bandwidth_bps);
    c.bandwidth_bps = c.payload_bytes / c.seconds;
    return c;
}

// Splits a system-wide plan into per-rank plans (DPU i belongs to rank i / dpus_per_rank).
inline std::vector<TransferPlan> rank_partition(std::uint32_t total_dpus, const TransferPlan& plan,
                                                const SystemConfig& sys) {
    if (total_dpus > sys.total_dpus())
        throw TransferError(std::to_string(total_dpus) + " DPUs exceed system capacity " +
                            std::to_string(sys.total_dpus()));
    if (plan.sizes.size() > total_dpus) throw TransferError("plan addresses more DPUs than allocated");
    std::vector<TransferPlan> ranks;
    for (std::size_t first = 0; first < plan.sizes.size(); first += sys.dpus_per_rank) {
        const std::size_t last = std::min<std::size_t>(first + sys.dpus_per_rank, plan.sizes.size());
        TransferPlan p{plan.mode, plan.direction, {plan.sizes.begin() + first, plan.sizes.begin() + last}};
        ranks.push_back(std::move(p));
    }
    return ranks;
}

// Ranks transfer one after another; rank times add.
inline TransferCost system_transfer_time(const TransferPlan& plan, const SystemConfig& sys) {
    TransferCost total;
    const auto ranks = rank_partition(static_cast<std::uint32_t>(plan.sizes.size()), plan, sys);
    int active = 0;
    for (const auto& r : ranks) {
        const TransferCost c = transfer_time(r, sys.host_link);
        total.seconds += c.seconds;
        total.payload_bytes += c.payload_bytes;
        active += c.payload_bytes > 0;
    }
    if (active > 1) total.seconds *= sys.host_link.rank_group_slowdown;
    total.bandwidth_bps = total.seconds > 0 ? total.payload_bytes / total.seconds : 0.0;
    return total;
}

}  // namespace pim
