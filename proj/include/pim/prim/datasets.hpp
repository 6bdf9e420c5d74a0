#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace pim::prim {

// Seeded generator with a platform-independent mapping to ranges.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : g_(seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull) {}

    std::uint64_t next() { return g_(); }
    // Uniform in [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<unsigned __int128>(static_cast<std::uint64_t>(hi - lo)) + 1;
        return lo + static_cast<std::int64_t>((static_cast<unsigned __int128>(next()) * span) >> 64);
    }
    // Uniform in [0, 1).
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 g_;
};

template <class T>
std::vector<T> random_values(std::size_t n, std::int64_t lo, std::int64_t hi, std::uint64_t seed) {
    Rng r(seed);
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(r.uniform(lo, hi));
    return v;
}

// Strictly increasing int64 values with random gaps.
inline std::vector<std::int64_t> sorted_distinct(std::size_t n, std::uint64_t seed) {
    Rng r(seed);
    std::vector<std::int64_t> v(n);
    std::int64_t x = r.uniform(-1000, 1000);
    for (auto& e : v) {
        e = x;
        x += r.uniform(1, 8);
    }
    return v;
}

// Runs of repeated values, for UNI.
inline std::vector<std::int64_t> runs(std::size_t n, std::uint64_t seed, std::int64_t max_run = 4) {
    Rng r(seed);
    std::vector<std::int64_t> v;
    v.reserve(n);
    std::int64_t x = 0;
    while (v.size() < n) {
        x += r.uniform(1, 3);
        const std::int64_t len = r.uniform(1, max_run);
        for (std::int64_t i = 0; i < len && v.size() < n; ++i) v.push_back(x);
    }
    return v;
}

// 12-bit pixels: smooth background plus noise, clipped to [0, 4095].
inline std::vector<std::uint32_t> image12(std::size_t width, std::size_t height, std::uint64_t seed) {
    Rng r(seed);
    const double fx = 1 + r.real() * 6, fy = 1 + r.real() * 6, ph = r.real() * 6.283185307179586;
    std::vector<std::uint32_t> img(width * height);
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) {
            const double base = 2048 + 1400 * std::sin(fx * 6.283185307179586 * x / width + ph) *
                                           std::cos(fy * 6.283185307179586 * y / height);
            const double noise = static_cast<double>(r.uniform(-600, 600));
            img[y * width + x] = static_cast<std::uint32_t>(std::clamp(base + noise, 0.0, 4095.0));
        }
    return img;
}

inline std::vector<std::uint8_t> dna(std::size_t n, std::uint64_t seed) {
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    Rng r(seed);
    std::vector<std::uint8_t> s(n);
    for (auto& c : s) c = static_cast<std::uint8_t>(kBases[r.uniform(0, 3)]);
    return s;
}

template <class V>
struct Csr {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint32_t> row_ptr;
    std::vector<std::uint32_t> col_idx;
    std::vector<V> values;

    std::size_t nnz() const { return col_idx.size(); }
    friend bool operator==(const Csr&, const Csr&) = default;
};

// Banded random sparsity; `density` is the expected fraction of nonzeros per row.
inline Csr<float> banded_sparse(std::uint32_t n, double density, std::uint64_t seed, std::uint32_t band = 0) {
    Rng r(seed);
    if (band == 0) band = std::max<std::uint32_t>(8, static_cast<std::uint32_t>(n * density * 4));
    const double per_row = std::max(1.0, n * density);
    Csr<float> m;
    m.rows = m.cols = n;
    m.row_ptr.push_back(0);
    std::vector<std::uint32_t> cols;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::int64_t>(std::floor(per_row * (0.5 + r.real())));
        const std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(i) - band);
        const std::int64_t hi = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(i) + band);
        cols.assign(1, i);
        for (std::int64_t j = 1; j < k; ++j) cols.push_back(static_cast<std::uint32_t>(r.uniform(lo, hi)));
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        for (std::uint32_t c : cols) {
            m.col_idx.push_back(c);
            m.values.push_back(static_cast<float>(r.uniform(-1000, 1000)) / 256.0f);
        }
        m.row_ptr.push_back(static_cast<std::uint32_t>(m.col_idx.size()));
    }
    return m;
}

struct RmatParams {
    double a = 0.57;
    double b = 0.19;
    double c = 0.19;
    double edges_per_vertex = 12;
};

// Directed rMat graph without self loops or duplicate edges, as CSR adjacency.
inline Csr<std::uint8_t> rmat(std::uint32_t vertices, std::uint64_t seed, RmatParams p = {}) {
    Rng r(seed);
    const unsigned scale = std::max(1u, static_cast<unsigned>(std::bit_width(std::max(1u, vertices - 1))));
    const auto target = static_cast<std::uint64_t>(p.edges_per_vertex * vertices);
    std::vector<std::uint64_t> edges;
    edges.reserve(target * 2);
    const std::uint64_t max_attempts = target * 8 + 64;
    for (std::uint64_t attempt = 0; attempt < max_attempts && edges.size() < target; ++attempt) {
        std::uint64_t u = 0, v = 0;
        for (unsigned bit = 0; bit < scale; ++bit) {
            const double x = r.real();
            const int quad = x < p.a ? 0 : x < p.a + p.b ? 1 : x < p.a + p.b + p.c ? 2 : 3;
            u = (u << 1) | static_cast<std::uint64_t>(quad >> 1);
            v = (v << 1) | static_cast<std::uint64_t>(quad & 1);
        }
        if (u >= vertices || v >= vertices || u == v) continue;
        edges.push_back(u << 32 | v);
        if (edges.size() == target) {
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    Csr<std::uint8_t> g;
    g.rows = g.cols = vertices;
    g.row_ptr.assign(vertices + 1, 0);
    for (std::uint64_t e : edges) ++g.row_ptr[(e >> 32) + 1];
    for (std::uint32_t i = 0; i < vertices; ++i) g.row_ptr[i + 1] += g.row_ptr[i];
    g.col_idx.reserve(edges.size());
    for (std::uint64_t e : edges) g.col_idx.push_back(static_cast<std::uint32_t>(e & 0xFFFFFFFFu));
    return g;
}

// Dataset files: one text header line "<dtype> <d0> <d1> ...", then raw little-endian values.
template <class T>
constexpr const char* dtype_name() {
    if constexpr (std::is_same_v<T, std::int32_t>) return "int32";
    else if constexpr (std::is_same_v<T, std::uint32_t>) return "uint32";
    else if constexpr (std::is_same_v<T, std::int64_t>) return "int64";
    else if constexpr (std::is_same_v<T, std::uint64_t>) return "uint64";
    else if constexpr (std::is_same_v<T, float>) return "float32";
    else if constexpr (std::is_same_v<T, double>) return "float64";
    else if constexpr (std::is_same_v<T, std::uint8_t>) return "uint8";
    else static_assert(sizeof(T) == 0, "unsupported dataset type");
}

static_assert(std::endian::native == std::endian::little, "dataset files assume a little-endian host");

template <class T>
void write_array(std::ostream& os, const std::vector<T>& v, const std::vector<std::uint64_t>& dims) {
    os << dtype_name<T>();
    for (auto d : dims) os << ' ' << d;
    os << '\n';
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> read_array(std::istream& is, std::vector<std::uint64_t>* dims_out = nullptr) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("dataset: missing header");
    std::istringstream hs(line);
    std::string dtype;
    hs >> dtype;
    if (dtype != dtype_name<T>()) throw std::runtime_error("dataset: expected " + std::string(dtype_name<T>()) + ", found " + dtype);
    std::vector<std::uint64_t> dims;
    std::uint64_t count = 1, d = 0;
    while (hs >> d) {
        dims.push_back(d);
        count *= d;
    }
    if (dims.empty()) throw std::runtime_error("dataset: header has no dimensions");
    std::vector<T> v(count);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (static_cast<std::uint64_t>(is.gcount()) != count * sizeof(T)) throw std::runtime_error("dataset: truncated data");
    if (dims_out) *dims_out = dims;
    return v;
}

// CSR files hold three arrays in sequence: row offsets, column indices, values.
template <class V>
void write_csr(std::ostream& os, const Csr<V>& m) {
    write_array(os, m.row_ptr, {m.rows + 1ull, m.cols});
    write_array(os, m.col_idx, {m.col_idx.size()});
    write_array(os, m.values, {m.values.size()});
}

template <class V>
Csr<V> read_csr(std::istream& is) {
    Csr<V> m;
    std::vector<std::uint64_t> dims;
    m.row_ptr = read_array<std::uint32_t>(is, &dims);
    if (dims.size() != 2 || dims[0] == 0) throw std::runtime_error("dataset: bad CSR row header");
    m.rows = static_cast<std::uint32_t>(dims[0] - 1);
    m.cols = static_cast<std::uint32_t>(dims[1]);
    m.col_idx = read_array<std::uint32_t>(is);
    m.values = read_array<V>(is);
    if (m.row_ptr.back() != m.col_idx.size() || (!m.values.empty() && m.values.size() != m.col_idx.size()))
        throw std::runtime_error("dataset: inconsistent CSR arrays");
    return m;
}

}  // namespace pim::prim
