#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pim/runtime/host.hpp"

namespace pim::prim {

using rt::Category;
using rt::DpuSet;
using rt::Task;
using rt::Tasklet;
using rt::TimeBreakdown;

struct BenchParams {
    std::uint32_t dpus = 1;
    unsigned tasklets = 16;
    std::uint64_t seed = 1;
    bool timing = true;
    std::uint32_t tile_bytes = 1024;
    // Benchmark-specific problem size; 0 selects the desk-scale default.
    std::uint64_t size = 0;
    std::string variant;
    // Histogram size for HST.
    std::uint32_t bins = 256;
    // Threads used to simulate DPUs of one launch.
    unsigned workers = 1;
};

// Timing side of a benchmark run, shared by all benchmarks.
struct RunStats {
    TimeBreakdown time;
    std::vector<std::uint64_t> launch_cycles;
    std::map<std::string, double> detail;

    void absorb(const DpuSet& set) {
        time = set.breakdown();
        launch_cycles = set.launch_cycles();
    }
};

struct ExperimentRecord {
    std::string benchmark;
    std::string variant;
    std::uint32_t dpus = 0;
    unsigned tasklets = 0;
    std::uint64_t seed = 0;
    std::uint64_t size = 0;
    std::string dataset;
    TimeBreakdown time;
    bool correct = false;
    std::string mismatch;
    std::vector<std::uint64_t> launch_cycles;
    std::map<std::string, double> detail;
};

inline constexpr std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }
inline constexpr std::uint64_t align_down(std::uint64_t v, std::uint64_t a) { return v / a * a; }
inline constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

struct Range {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
    std::uint64_t size() const { return end - begin; }
};

// Contiguous split of n items into `parts` chunks of ceil(n/parts) rounded up to `align`;
// trailing chunks may be short or empty.
inline std::vector<Range> block_partition(std::uint64_t n, std::uint32_t parts, std::uint64_t align = 1) {
    const std::uint64_t chunk = align_up(ceil_div(n, parts), align);
    std::vector<Range> r(parts);
    for (std::uint32_t i = 0; i < parts; ++i) {
        r[i].begin = std::min(n, i * chunk);
        r[i].end = std::min(n, r[i].begin + chunk);
    }
    return r;
}

// Even split: the first n % parts chunks get one extra item.
inline std::vector<Range> even_partition(std::uint64_t n, std::uint32_t parts) {
    std::vector<Range> r(parts);
    std::uint64_t at = 0;
    for (std::uint32_t i = 0; i < parts; ++i) {
        const std::uint64_t len = n / parts + (i < n % parts ? 1 : 0);
        r[i] = {at, at + len};
        at += len;
    }
    return r;
}

// Elements of T per DMA tile, rounded to the 8-byte transfer granularity.
template <class T>
std::uint32_t tile_elems(std::uint32_t tile_bytes) {
    return std::max<std::uint32_t>(1, tile_bytes / sizeof(T));
}

inline std::uint32_t dma_bytes(std::uint64_t bytes) { return static_cast<std::uint32_t>(align_up(bytes, 8)); }

template <class T>
std::vector<std::vector<T>> slices(std::span<const T> data, const std::vector<Range>& ranges, std::uint64_t pad_to = 1) {
    std::vector<std::vector<T>> out(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        out[i].assign(data.begin() + ranges[i].begin, data.begin() + ranges[i].end);
        out[i].resize(align_up(out[i].size(), pad_to));
    }
    return out;
}

inline bool relative_equal(double a, double b, double tol = 1e-6) {
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-30});
}

template <class T>
std::string compare_exact(const std::vector<T>& got, const std::vector<T>& want) {
    if (got.size() != want.size())
        return "size " + std::to_string(got.size()) + " vs " + std::to_string(want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        if (!(got[i] == want[i])) return "first difference at index " + std::to_string(i);
    return {};
}

template <class T>
std::string compare_relative(const std::vector<T>& got, const std::vector<T>& want, double tol = 1e-6) {
    if (got.size() != want.size())
        return "size " + std::to_string(got.size()) + " vs " + std::to_string(want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        if (!relative_equal(static_cast<double>(got[i]), static_cast<double>(want[i]), tol))
            return "first difference at index " + std::to_string(i);
    return {};
}

inline rt::LaunchOptions launch_options(const BenchParams& p) { return {.timing = p.timing, .record_traces = false}; }

}  // namespace pim::prim
