#pragma once

#include <utility>

#include "snnkit/parallel.hpp"
#include "snnkit/tensor.hpp"

namespace snnkit {

/// Dense kernels for the training engine. Every kernel is a pure function
/// with a fixed, documented accumulation order, so identical inputs produce
/// bit-identical outputs for any thread count (parallel loops only split
/// disjoint output slices).

namespace detail {

template <typename S>
TensorT<S> zero_pad(const TensorT<S>& x, int pad) {
    if (pad == 0) return x;
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    TensorT<S> out({B, C, H + 2 * pad, W + 2 * pad});
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y) {
                const S* src = &x.at4(b, c, y, 0);
                S* dst = &out.at4(b, c, y + pad, pad);
                for (int xx = 0; xx < W; ++xx) dst[xx] = src[xx];
            }
    return out;
}

}  // namespace detail

/// 2-d cross-correlation. input [B,Cin,H,W], kernels [Cout,Cin,k,k].
/// Output extents H' = (H + 2*padding - k)/stride + 1 (floor), same for W'.
/// Accumulation order per output element: (cin, ky, kx) ascending.
template <typename S>
TensorT<S> conv2d(const TensorT<S>& input, const TensorT<S>& kernels, int stride, int padding) {
    if (input.ndim() != 4 || kernels.ndim() != 4)
        throw std::invalid_argument("conv2d: expected 4-d input and kernels, got " + input.shape_str() + " and " +
                                    kernels.shape_str());
    if (input.dim(1) != kernels.dim(1))
        throw std::invalid_argument("conv2d: channel mismatch between input " + input.shape_str() + " and kernels " +
                                    kernels.shape_str());
    if (kernels.dim(2) != kernels.dim(3))
        throw std::invalid_argument("conv2d: non-square kernel " + kernels.shape_str());
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (padding < 0) throw std::invalid_argument("conv2d: negative padding");

    const int B = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int Cout = kernels.dim(0), k = kernels.dim(2);
    const int Hp = H + 2 * padding, Wp = W + 2 * padding;
    if (k > Hp || k > Wp)
        throw std::invalid_argument("conv2d: kernel " + kernels.shape_str() + " larger than padded input " +
                                    input.shape_str());
    const int Ho = (Hp - k) / stride + 1;
    const int Wo = (Wp - k) / stride + 1;

    const TensorT<S> padded = detail::zero_pad(input, padding);
    TensorT<S> out({B, Cout, Ho, Wo});

    parallel_for(static_cast<int64_t>(B) * Cout, [&](int64_t idx) {
        const int b = static_cast<int>(idx / Cout);
        const int co = static_cast<int>(idx % Cout);
        S* out_plane = &out.at4(b, co, 0, 0);
        for (int ci = 0; ci < Cin; ++ci)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    const S w = kernels.at4(co, ci, ky, kx);
                    for (int yo = 0; yo < Ho; ++yo) {
                        const S* in_row = &padded.at4(b, ci, yo * stride + ky, kx);
                        S* out_row = out_plane + static_cast<size_t>(yo) * Wo;
                        if (stride == 1) {
                            for (int xo = 0; xo < Wo; ++xo) out_row[xo] += w * in_row[xo];
                        } else {
                            for (int xo = 0; xo < Wo; ++xo) out_row[xo] += w * in_row[xo * stride];
                        }
                    }
                }
    });
    return out;
}

/// Gradient of conv2d w.r.t. its input. grad_out [B,Cout,Ho,Wo] -> [B,Cin,H,W].
template <typename S>
TensorT<S> conv2d_grad_input(const TensorT<S>& grad_out, const TensorT<S>& kernels, int stride, int padding, int H,
                             int W) {
    const int B = grad_out.dim(0), Cout = grad_out.dim(1), Ho = grad_out.dim(2), Wo = grad_out.dim(3);
    const int Cin = kernels.dim(1), k = kernels.dim(2);
    if (kernels.dim(0) != Cout)
        throw std::invalid_argument("conv2d_grad_input: grad_out " + grad_out.shape_str() + " vs kernels " +
                                    kernels.shape_str());

    // Accumulate into the padded frame, then crop; keeps the inner loops free
    // of boundary tests. Order per input element: (co, ky, kx) ascending.
    TensorT<S> dpad({B, Cin, H + 2 * padding, W + 2 * padding});
    parallel_for(B, [&](int64_t b) {
        for (int co = 0; co < Cout; ++co)
            for (int ci = 0; ci < Cin; ++ci)
                for (int ky = 0; ky < k; ++ky)
                    for (int kx = 0; kx < k; ++kx) {
                        const S w = kernels.at4(co, ci, ky, kx);
                        for (int yo = 0; yo < Ho; ++yo) {
                            const S* g_row = &grad_out.at4(static_cast<int>(b), co, yo, 0);
                            S* d_row = &dpad.at4(static_cast<int>(b), ci, yo * stride + ky, kx);
                            if (stride == 1) {
                                for (int xo = 0; xo < Wo; ++xo) d_row[xo] += w * g_row[xo];
                            } else {
                                for (int xo = 0; xo < Wo; ++xo) d_row[xo * stride] += w * g_row[xo];
                            }
                        }
                    }
    });
    if (padding == 0) return dpad;
    TensorT<S> din({B, Cin, H, W});
    for (int b = 0; b < B; ++b)
        for (int ci = 0; ci < Cin; ++ci)
            for (int y = 0; y < H; ++y) {
                const S* src = &dpad.at4(b, ci, y + padding, padding);
                S* dst = &din.at4(b, ci, y, 0);
                for (int x = 0; x < W; ++x) dst[x] = src[x];
            }
    return din;
}

/// Gradient of conv2d w.r.t. the kernels. Accumulation order per weight
/// element: (b, yo, xo) ascending.
template <typename S>
TensorT<S> conv2d_grad_weights(const TensorT<S>& input, const TensorT<S>& grad_out, int stride, int padding, int k) {
    const int B = input.dim(0), Cin = input.dim(1);
    const int Cout = grad_out.dim(1), Ho = grad_out.dim(2), Wo = grad_out.dim(3);
    if (grad_out.dim(0) != B)
        throw std::invalid_argument("conv2d_grad_weights: batch mismatch " + input.shape_str() + " vs " +
                                    grad_out.shape_str());
    const TensorT<S> padded = detail::zero_pad(input, padding);

    TensorT<S> dw({Cout, Cin, k, k});
    parallel_for(static_cast<int64_t>(Cout) * Cin, [&](int64_t idx) {
        const int co = static_cast<int>(idx / Cin);
        const int ci = static_cast<int>(idx % Cin);
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                S acc = S(0);
                for (int b = 0; b < B; ++b)
                    for (int yo = 0; yo < Ho; ++yo) {
                        const S* g_row = &grad_out.at4(b, co, yo, 0);
                        const S* in_row = &padded.at4(b, ci, yo * stride + ky, kx);
                        if (stride == 1) {
                            for (int xo = 0; xo < Wo; ++xo) acc += g_row[xo] * in_row[xo];
                        } else {
                            for (int xo = 0; xo < Wo; ++xo) acc += g_row[xo] * in_row[xo * stride];
                        }
                    }
                dw.at4(co, ci, ky, kx) = acc;
            }
    });
    return dw;
}

/// Matrix product a [M,K] x b [K,N] -> [M,N]. Row-major accumulation: each
/// output element sums over k ascending.
template <typename S>
TensorT<S> matmul(const TensorT<S>& a, const TensorT<S>& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0))
        throw std::invalid_argument("matmul: incompatible shapes " + a.shape_str() + " x " + b.shape_str());
    const int M = a.dim(0), K = a.dim(1), N = b.dim(1);
    TensorT<S> out({M, N});
    parallel_for(M, [&](int64_t i) {
        const S* a_row = &a.at2(static_cast<int>(i), 0);
        S* o_row = &out.at2(static_cast<int>(i), 0);
        for (int k = 0; k < K; ++k) {
            const S av = a_row[k];
            const S* b_row = &b.at2(k, 0);
            for (int j = 0; j < N; ++j) o_row[j] += av * b_row[j];
        }
    });
    return out;
}

/// a [M,K] x transpose(b [N,K]) -> [M,N]; inner product over k ascending.
template <typename S>
TensorT<S> matmul_nt(const TensorT<S>& a, const TensorT<S>& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(1))
        throw std::invalid_argument("matmul_nt: incompatible shapes " + a.shape_str() + " x " + b.shape_str() + "^T");
    const int M = a.dim(0), K = a.dim(1), N = b.dim(0);
    TensorT<S> out({M, N});
    parallel_for(M, [&](int64_t i) {
        const S* a_row = &a.at2(static_cast<int>(i), 0);
        S* o_row = &out.at2(static_cast<int>(i), 0);
        for (int j = 0; j < N; ++j) {
            const S* b_row = &b.at2(j, 0);
            S acc = S(0);
            for (int k = 0; k < K; ++k) acc += a_row[k] * b_row[k];
            o_row[j] = acc;
        }
    });
    return out;
}

/// transpose(a [K,M]) x b [K,N] -> [M,N]; accumulation over k ascending.
template <typename S>
TensorT<S> matmul_tn(const TensorT<S>& a, const TensorT<S>& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.dim(0) != b.dim(0))
        throw std::invalid_argument("matmul_tn: incompatible shapes " + a.shape_str() + "^T x " + b.shape_str());
    const int K = a.dim(0), M = a.dim(1), N = b.dim(1);
    TensorT<S> out({M, N});
    parallel_for(M, [&](int64_t i) {
        S* o_row = &out.at2(static_cast<int>(i), 0);
        for (int k = 0; k < K; ++k) {
            const S av = a.at2(k, static_cast<int>(i));
            const S* b_row = &b.at2(k, 0);
            for (int j = 0; j < N; ++j) o_row[j] += av * b_row[j];
        }
    });
    return out;
}

/// Mean over non-overlapping window x window blocks. Window must divide both
/// spatial extents. Accumulation per output element: (wy, wx) ascending.
template <typename S>
TensorT<S> avg_pool2d(const TensorT<S>& input, int window) {
    if (input.ndim() != 4) throw std::invalid_argument("avg_pool2d: expected 4-d input, got " + input.shape_str());
    const int B = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
    if (window < 1 || H % window != 0 || W % window != 0)
        throw std::invalid_argument("avg_pool2d: window " + std::to_string(window) + " does not divide input " +
                                    input.shape_str());
    const int Ho = H / window, Wo = W / window;
    const S inv = S(1) / static_cast<S>(window * window);
    TensorT<S> out({B, C, Ho, Wo});
    parallel_for(static_cast<int64_t>(B) * C, [&](int64_t idx) {
        const int b = static_cast<int>(idx / C);
        const int c = static_cast<int>(idx % C);
        for (int yo = 0; yo < Ho; ++yo)
            for (int xo = 0; xo < Wo; ++xo) {
                S acc = S(0);
                for (int wy = 0; wy < window; ++wy)
                    for (int wx = 0; wx < window; ++wx) acc += input.at4(b, c, yo * window + wy, xo * window + wx);
                out.at4(b, c, yo, xo) = acc * inv;
            }
    });
    return out;
}

/// Backward of avg_pool2d: distributes each output gradient uniformly
/// (1/window^2) over its window.
template <typename S>
TensorT<S> avg_pool2d_grad(const TensorT<S>& grad_out, int window) {
    const int B = grad_out.dim(0), C = grad_out.dim(1), Ho = grad_out.dim(2), Wo = grad_out.dim(3);
    const S inv = S(1) / static_cast<S>(window * window);
    TensorT<S> din({B, C, Ho * window, Wo * window});
    parallel_for(static_cast<int64_t>(B) * C, [&](int64_t idx) {
        const int b = static_cast<int>(idx / C);
        const int c = static_cast<int>(idx % C);
        for (int yo = 0; yo < Ho; ++yo)
            for (int xo = 0; xo < Wo; ++xo) {
                const S g = grad_out.at4(b, c, yo, xo) * inv;
                for (int wy = 0; wy < window; ++wy)
                    for (int wx = 0; wx < window; ++wx) din.at4(b, c, yo * window + wy, xo * window + wx) = g;
            }
    });
    return din;
}

/// Population mean and variance (divide by M, not M-1) over all elements.
/// Two-pass, accumulated in double in flat index order.
template <typename S>
std::pair<double, double> batch_stats(const TensorT<S>& x) {
    if (x.size() == 0) throw std::invalid_argument("batch_stats: empty tensor");
    const double m = static_cast<double>(x.size());
    double sum = 0.0;
    for (S v : x.data) sum += static_cast<double>(v);
    const double mean = sum / m;
    double sq = 0.0;
    for (S v : x.data) {
        const double d = static_cast<double>(v) - mean;
        sq += d * d;
    }
    return {mean, sq / m};
}

}  // namespace snnkit
