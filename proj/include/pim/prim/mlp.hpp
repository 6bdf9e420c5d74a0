#pragma once

#include "pim/prim/gemv.hpp"

// Multilayer perceptron inference: every layer is a distributed GEMV followed by ReLU.
namespace pim::prim::mlp {

struct Layer {
    std::uint32_t rows = 0, cols = 0;
    std::vector<std::uint32_t> weights;  // row-major, rows x cols
};

struct Input {
    std::vector<Layer> layers;
    std::vector<std::uint32_t> x;
};

// Square layers of `width` neurons. Small weights keep activations from saturating too often.
inline Input generate(std::uint32_t width, std::uint32_t n_layers, std::uint64_t seed) {
    Input in;
    for (std::uint32_t l = 0; l < n_layers; ++l)
        in.layers.push_back({width, width, random_values<std::uint32_t>(std::size_t{width} * width, 0, 0xFFFFFFFF,
                                                                       seed + 101 * (l + 1))});
    in.x = random_values<std::uint32_t>(width, 0, 0xFFFFFFFF, seed);
    return in;
}

inline std::vector<std::uint32_t> oracle(const Input& in) {
    std::vector<std::uint32_t> v = in.x;
    for (const Layer& L : in.layers) {
        std::vector<std::uint32_t> y(L.rows, 0);
        for (std::uint32_t r = 0; r < L.rows; ++r) {
            std::uint32_t acc = 0;
            for (std::uint32_t c = 0; c < L.cols; ++c) acc += L.weights[std::size_t{r} * L.cols + c] * v[c];
            y[r] = gemv::relu(acc);
        }
        v = std::move(y);
    }
    return v;
}

struct Result {
    std::vector<std::uint32_t> y;
    RunStats stats;
};

inline Result run(const SystemConfig& sys, const BenchParams& p, const Input& in) {
    DpuSet set(sys, p.dpus, p.workers);
    std::vector<std::uint32_t> v = in.x;
    for (std::size_t l = 0; l < in.layers.size(); ++l) {
        const Layer& L = in.layers[l];
        if (L.cols != v.size()) throw std::invalid_argument("MLP layer " + std::to_string(l) + " input width mismatch");
        const bool first = l == 0, last = l + 1 == in.layers.size();
        v = gemv::distributed_layer(set, p, L.weights, L.rows, L.cols, v, true,
                                    first ? Category::cpu_to_dpu : Category::inter_dpu,
                                    first ? Category::cpu_to_dpu : Category::inter_dpu,
                                    last ? Category::dpu_to_cpu : Category::inter_dpu);
        if (!last) set.host_compute(Category::inter_dpu, static_cast<double>(v.size()));
    }
    Result r{std::move(v), {}};
    r.stats.absorb(set);
    return r;
}

}  // namespace pim::prim::mlp
