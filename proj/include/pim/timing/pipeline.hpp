#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "pim/core/config.hpp"

namespace pim {

enum class LimitingFactor { per_tasklet_dispatch, aggregate_issue };

struct PipelineReport {
    std::uint64_t cycles = 0;
    std::uint64_t instructions = 0;
    double issue_utilization = 0;
    LimitingFactor limiting_factor = LimitingFactor::aggregate_issue;
};

inline void check_tasklet_count(std::size_t tasklets, const DpuConfig& cfg) {
    if (tasklets == 0) throw std::invalid_argument("at least one tasklet is required");
    if (tasklets > cfg.max_tasklets)
        throw CapacityError(std::to_string(tasklets) + " tasklets exceed max_tasklets " +
                            std::to_string(cfg.max_tasklets));
}

// Closed form: max(sum n_i, dispatch_interval * max n_i) + pipeline_depth.
inline PipelineReport pipeline_cycles(std::span<const std::uint64_t> per_tasklet, const DpuConfig& cfg) {
    check_tasklet_count(per_tasklet.size(), cfg);
    const std::uint64_t sum = std::accumulate(per_tasklet.begin(), per_tasklet.end(), std::uint64_t{0});
    const std::uint64_t longest = *std::max_element(per_tasklet.begin(), per_tasklet.end());
    const std::uint64_t dispatch = cfg.dispatch_interval * longest;
    PipelineReport r;
    r.instructions = sum;
    r.limiting_factor = dispatch > sum ? LimitingFactor::per_tasklet_dispatch : LimitingFactor::aggregate_issue;
    r.cycles = std::max(sum, dispatch) + cfg.pipeline_depth;
    r.issue_utilization = static_cast<double>(sum) / static_cast<double>(r.cycles);
    return r;
}

inline PipelineReport pipeline_cycles(std::span<const InstructionMix> mixes, const DpuConfig& cfg) {
    std::vector<std::uint64_t> n;
    n.reserve(mixes.size());
    for (const auto& m : mixes) n.push_back(m.instructions(cfg.costs));
    return pipeline_cycles(std::span<const std::uint64_t>(n), cfg);
}

inline double tasklet_scaling(unsigned tasklets, const DpuConfig& cfg) {
    return static_cast<double>(std::min(tasklets, cfg.dispatch_interval)) / cfg.dispatch_interval;
}

// Operations per second of the read-modify-write loop.
inline double arithmetic_throughput(OpClass op, DataType dt, unsigned tasklets, const DpuConfig& cfg) {
    if (tasklets == 0) throw std::invalid_argument("at least one tasklet is required");
    return cfg.frequency_hz / loop_instruction_count(op, dt, cfg.costs) * tasklet_scaling(tasklets, cfg);
}

}  // namespace pim
