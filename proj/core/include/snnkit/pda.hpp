#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "snnkit/kernels.hpp"
#include "snnkit/lif.hpp"
#include "snnkit/tensor.hpp"

namespace snnkit {

/// Floor applied to batch variances so constant-potential batches cannot
/// produce infinities. When the clamp engages, the gradient through the
/// variance is zeroed (flat region).
inline constexpr double kPdaVarFloor = 1e-8;

/// Per-(layer, timestep) potential statistics and their symmetric-KL value.
struct PDAStats {
    int layer = 0;
    int timestep = 0;
    double mu = 0.0;
    double var = 0.0;
    double sym_kl = 0.0;
    bool var_clamped = false;
};

/// Symmetric KL divergence between Gaussian(mu, var) and the standard
/// normal: D(P||N) + D(N||P) = (var + mu^2)/2 + (1 + mu^2)/(2 var) - 1.
/// Zero exactly at (0, 1). Caller is expected to pass var >= kPdaVarFloor.
inline double sym_kl_std_normal(double mu, double var) {
    return (var + mu * mu) / 2.0 + (1.0 + mu * mu) / (2.0 * var) - 1.0;
}

/// Potential-distribution loss over a trace: mean of the per-(t, n)
/// symmetric KL terms with prefactor 1/(2 T N), moments taken over all
/// batch and spatial elements of each u^{t,n}.
template <typename S>
std::pair<double, std::vector<PDAStats>> pda_loss(const StateTraceT<S>& trace, int T, int N) {
    if (trace.layers.empty() || T < 1) throw std::invalid_argument("pda_loss: empty trace");
    if (static_cast<int>(trace.layers.size()) != N)
        throw std::invalid_argument("pda_loss: trace has " + std::to_string(trace.layers.size()) +
                                    " layers, expected " + std::to_string(N));
    std::vector<PDAStats> stats;
    stats.reserve(static_cast<size_t>(T) * N);
    double sum = 0.0;
    for (int n = 0; n < N; ++n) {
        const auto& layer = trace.layers[n];
        if (static_cast<int>(layer.u.size()) != T)
            throw std::invalid_argument("pda_loss: layer " + std::to_string(n) + " has " +
                                        std::to_string(layer.u.size()) + " timesteps, expected " + std::to_string(T));
        for (int t = 0; t < T; ++t) {
            auto [mu, var] = batch_stats(layer.u[t]);
            PDAStats s;
            s.layer = n;
            s.timestep = t;
            s.mu = mu;
            s.var_clamped = var < kPdaVarFloor;
            s.var = s.var_clamped ? kPdaVarFloor : var;
            s.sym_kl = sym_kl_std_normal(s.mu, s.var);
            sum += s.sym_kl;
            stats.push_back(s);
        }
    }
    return {sum / (2.0 * T * N), std::move(stats)};
}

/// Gradient of one symmetric-KL term w.r.t. each potential element:
///   dS/du_i = (dS/dmu)/M + (dS/dvar) * 2 (u_i - mu) / M
/// with dS/dmu = mu (1 + 1/var) and dS/dvar = 1/2 - (1 + mu^2)/(2 var^2).
/// The caller applies the beta / (2 T N) prefactor. For a clamped variance
/// the variance pathway is dropped.
template <typename S>
TensorT<S> pda_backward(const TensorT<S>& u, double mu, double var, int64_t M) {
    if (M != u.size())
        throw std::invalid_argument("pda_backward: M=" + std::to_string(M) + " does not match tensor " +
                                    u.shape_str());
    const bool clamped = var <= kPdaVarFloor;
    const double ds_dmu = mu * (1.0 + 1.0 / var);
    const double ds_dvar = clamped ? 0.0 : 0.5 - (1.0 + mu * mu) / (2.0 * var * var);
    const double inv_m = 1.0 / static_cast<double>(M);
    TensorT<S> grad;
    grad.shape = u.shape;
    grad.data.resize(u.data.size());
    for (size_t i = 0; i < u.data.size(); ++i) {
        const double d = static_cast<double>(u.data[i]) - mu;
        grad.data[i] = static_cast<S>(ds_dmu * inv_m + ds_dvar * 2.0 * d * inv_m);
    }
    return grad;
}

/// Softmax cross-entropy, averaged over the batch. Returns the loss and the
/// gradient w.r.t. the logits (already divided by the batch size).
template <typename S>
std::pair<double, TensorT<S>> softmax_cross_entropy(const TensorT<S>& logits, const std::vector<int>& labels) {
    const int B = logits.dim(0), C = logits.dim(1);
    if (static_cast<int>(labels.size()) != B)
        throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for batch " +
                                    std::to_string(B));
    TensorT<S> grad;
    grad.shape = logits.shape;
    grad.data.resize(logits.data.size());
    double loss = 0.0;
    const double inv_b = 1.0 / B;
    for (int b = 0; b < B; ++b) {
        const int y = labels[b];
        if (y < 0 || y >= C)
            throw std::invalid_argument("softmax_cross_entropy: label " + std::to_string(y) + " out of range [0," +
                                        std::to_string(C) + ")");
        double mx = -1e300;
        for (int c = 0; c < C; ++c) mx = std::max(mx, static_cast<double>(logits.at2(b, c)));
        double z = 0.0;
        for (int c = 0; c < C; ++c) z += std::exp(static_cast<double>(logits.at2(b, c)) - mx);
        const double logz = std::log(z) + mx;
        loss += logz - static_cast<double>(logits.at2(b, y));
        for (int c = 0; c < C; ++c) {
            const double p = std::exp(static_cast<double>(logits.at2(b, c)) - logz);
            grad.at2(b, c) = static_cast<S>((p - (c == y ? 1.0 : 0.0)) * inv_b);
        }
    }
    return {loss * inv_b, std::move(grad)};
}

/// Overall objective: task cross-entropy on time-averaged final-layer
/// potentials plus beta times the potential-distribution loss.
template <typename S>
double total_loss(const TensorT<S>& output_mean, const std::vector<int>& labels, double pda, double beta) {
    return softmax_cross_entropy(output_mean, labels).first + beta * pda;
}

}  // namespace snnkit
