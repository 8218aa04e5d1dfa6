#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace snnkit {

/// Dense row-major n-dimensional array over a real scalar type.
///
/// All kernels in this project operate on TensorT<float> (training) or
/// TensorT<double> (verification / gradient checking). Shapes follow the
/// [batch, channel, height, width] convention for image data and [rows, cols]
/// for matrices.
template <typename S>
struct TensorT {
    std::vector<int> shape;
    std::vector<S> data;

    TensorT() = default;

    explicit TensorT(std::vector<int> dims, S fill = S(0)) : shape(std::move(dims)) {
        data.assign(static_cast<size_t>(count(shape)), fill);
    }

    static TensorT zeros(std::vector<int> dims) { return TensorT(std::move(dims)); }

    static TensorT full(std::vector<int> dims, S value) { return TensorT(std::move(dims), value); }

    static int64_t count(const std::vector<int>& dims) {
        int64_t n = 1;
        for (int d : dims) {
            if (d < 0) throw std::invalid_argument("tensor: negative extent in shape " + shape_str(dims));
            n *= d;
        }
        return n;
    }

    int64_t size() const { return static_cast<int64_t>(data.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape.at(static_cast<size_t>(i)); }

    S& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
    const S& operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

    // 4-d indexing (b, c, y, x); caller guarantees ndim()==4.
    S& at4(int b, int c, int y, int x) {
        return data[((static_cast<size_t>(b) * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }
    const S& at4(int b, int c, int y, int x) const {
        return data[((static_cast<size_t>(b) * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }

    // 2-d indexing (i, j); caller guarantees ndim()==2.
    S& at2(int i, int j) { return data[static_cast<size_t>(i) * shape[1] + j]; }
    const S& at2(int i, int j) const { return data[static_cast<size_t>(i) * shape[1] + j]; }

    bool same_shape(const TensorT& other) const { return shape == other.shape; }

    /// Reinterpret the flat buffer under a new shape with identical element count.
    TensorT reshaped(std::vector<int> dims) const {
        if (count(dims) != size())
            throw std::invalid_argument("tensor: reshape " + shape_str(shape) + " -> " + shape_str(dims) +
                                        " changes element count");
        TensorT out;
        out.shape = std::move(dims);
        out.data = data;
        return out;
    }

    bool all_finite() const {
        for (S v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    static std::string shape_str(const std::vector<int>& dims) {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
        os << "]";
        return os.str();
    }
    std::string shape_str() const { return shape_str(shape); }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent seed for a named substream (weights, dropout,
/// shuffle, ...). Purely arithmetic, so every platform gets the same value.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream_tag) {
    return splitmix64(seed ^ splitmix64(stream_tag));
}

/// Deterministic random source: std::mt19937_64 (bit-exact per the C++
/// standard) with hand-rolled output transforms, since the standard leaves
/// <random> distributions implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) via the multiply-shift reduction.
    uint64_t uniform_int(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(engine_()) * n) >> 64);
    }

    /// Standard normal via the Marsaglia polar method (one spare cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

template <typename S>
TensorT<S> random_normal(std::vector<int> dims, Rng& rng, double mean = 0.0, double stddev = 1.0) {
    TensorT<S> t(std::move(dims));
    for (auto& v : t.data) v = static_cast<S>(rng.normal(mean, stddev));
    return t;
}

template <typename S>
TensorT<S> random_uniform(std::vector<int> dims, Rng& rng, double lo = 0.0, double hi = 1.0) {
    TensorT<S> t(std::move(dims));
    for (auto& v : t.data) v = static_cast<S>(lo + (hi - lo) * rng.uniform());
    return t;
}

}  // namespace snnkit
