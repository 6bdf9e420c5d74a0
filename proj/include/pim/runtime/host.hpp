#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pim/core/config.hpp"
#include "pim/core/parallel.hpp"
#include "pim/runtime/dpu.hpp"
#include "pim/timing/host_link.hpp"

namespace pim::rt {

// Breakdown categories of a benchmark run.
enum class Category : std::uint8_t { cpu_to_dpu, inter_dpu, dpu_to_cpu };

struct TimeBreakdown {
    double dpu_seconds = 0;
    double inter_dpu_seconds = 0;
    double cpu_to_dpu_seconds = 0;
    double dpu_to_cpu_seconds = 0;
    // Sum over launches of the slowest DPU's cycles.
    std::uint64_t dpu_cycles = 0;
    std::uint32_t launches = 0;

    double total_seconds() const { return dpu_seconds + inter_dpu_seconds + cpu_to_dpu_seconds + dpu_to_cpu_seconds; }
    double& of(Category c) {
        return c == Category::cpu_to_dpu ? cpu_to_dpu_seconds
               : c == Category::inter_dpu ? inter_dpu_seconds
                                          : dpu_to_cpu_seconds;
    }
};

// N DPUs driven by the host: priced transfers, launches and host-side work.
class DpuSet {
  public:
    DpuSet(const SystemConfig& sys, std::uint32_t n, unsigned workers = 1)
        : sys_(std::make_shared<const SystemConfig>(sys)), workers_(workers) {
        if (n == 0) throw std::invalid_argument("a DPU set needs at least one DPU");
        if (n > sys.total_dpus())
            throw CapacityError(std::to_string(n) + " DPUs exceed system capacity " + std::to_string(sys.total_dpus()));
        dpus_.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) dpus_.push_back(std::make_unique<Dpu>(sys_->dpu));
    }

    std::uint32_t size() const { return static_cast<std::uint32_t>(dpus_.size()); }
    Dpu& operator[](std::size_t i) { return *dpus_.at(i); }
    const Dpu& operator[](std::size_t i) const { return *dpus_.at(i); }
    const SystemConfig& system() const { return *sys_; }
    const DpuConfig& config() const { return sys_->dpu; }
    const TimeBreakdown& breakdown() const { return time_; }
    const std::vector<KernelTimeline>& last_launch() const { return last_; }
    // Slowest-DPU cycles of every launch so far.
    const std::vector<std::uint64_t>& launch_cycles() const { return launch_cycles_; }

    // Writes per-DPU buffers (empty = DPU not involved). Parallel transfers are priced at the largest
    // buffer for every involved DPU, as the host pads them to a common size.
    template <class T>
    void push(Category c, std::uint64_t addr, const std::vector<std::vector<T>>& per_dpu,
              TransferMode mode = TransferMode::parallel) {
        check_count(per_dpu.size());
        std::vector<std::uint64_t> sizes(per_dpu.size());
        for (std::size_t i = 0; i < per_dpu.size(); ++i) {
            dpus_[i]->write<T>(addr, per_dpu[i]);
            sizes[i] = per_dpu[i].size() * sizeof(T);
        }
        charge_transfer(c, mode, TransferDirection::cpu_to_dpu, std::move(sizes));
    }

    // Same data to every DPU.
    template <class T>
    void broadcast(Category c, std::uint64_t addr, std::span<const T> data) {
        for (auto& d : dpus_) d->write<T>(addr, data);
        charge_transfer(c, TransferMode::broadcast, TransferDirection::cpu_to_dpu,
                        std::vector<std::uint64_t>(dpus_.size(), data.size_bytes()));
    }

    // Reads counts[i] elements of DPU i.
    template <class T>
    std::vector<std::vector<T>> pull(Category c, std::uint64_t addr, const std::vector<std::size_t>& counts,
                                     TransferMode mode = TransferMode::parallel) {
        check_count(counts.size());
        std::vector<std::vector<T>> out(counts.size());
        std::vector<std::uint64_t> sizes(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            out[i] = dpus_[i]->read<T>(addr, counts[i]);
            sizes[i] = counts[i] * sizeof(T);
        }
        charge_transfer(c, mode, TransferDirection::dpu_to_cpu, std::move(sizes));
        return out;
    }

    // Host CPU work between launches.
    void host_compute(Category c, double ops) { time_.of(c) += ops / sys_->host_link.host_ops_per_second; }

    // `repeat` identical transfers back to back.
    void charge_transfer(Category c, TransferMode mode, TransferDirection d, std::vector<std::uint64_t> sizes,
                         std::uint64_t repeat = 1) {
        if (mode == TransferMode::parallel) {
            const std::uint64_t m = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
            for (auto& s : sizes)
                if (s > 0) s = m;
        }
        time_.of(c) += static_cast<double>(repeat) * system_transfer_time({mode, d, std::move(sizes)}, *sys_).seconds;
    }

    // Runs the kernel on every DPU; the launch lasts as long as the slowest DPU.
    const std::vector<KernelTimeline>& launch(const Kernel& kernel, unsigned tasklets, LaunchOptions options = {}) {
        last_.assign(dpus_.size(), {});
        parallel_for(dpus_.size(), workers_, [&](std::size_t i) { last_[i] = dpus_[i]->launch(kernel, tasklets, options); });
        std::uint64_t worst = 0;
        for (const auto& tl : last_) worst = std::max(worst, tl.total_cycles);
        time_.dpu_cycles += worst;
        launch_cycles_.push_back(worst);
        time_.dpu_seconds += static_cast<double>(worst) / sys_->dpu.frequency_hz;
        ++time_.launches;
        return last_;
    }

  private:
    void check_count(std::size_t n) const {
        if (n > dpus_.size())
            throw std::invalid_argument("transfer addresses " + std::to_string(n) + " DPUs, set has " +
                                        std::to_string(dpus_.size()));
    }

    std::shared_ptr<const SystemConfig> sys_;
    unsigned workers_;
    std::vector<std::unique_ptr<Dpu>> dpus_;
    TimeBreakdown time_;
    std::vector<KernelTimeline> last_;
    std::vector<std::uint64_t> launch_cycles_;
};

}  // namespace pim::rt
