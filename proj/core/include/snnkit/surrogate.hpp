#pragma once

#include <cmath>
#include <utility>

#include "snnkit/tensor.hpp"

namespace snnkit {

/// Surrogate-gradient family per layer type. Convolutional layers emit
/// spikes and use a rescaled arctan-derivative bump peaked at the threshold;
/// fully-connected layers emit accumulated potentials and use a rescaled
/// softplus derivative (a sigmoid) that grows with the potential.
enum class SurrogateKind { ConvSpike, FcPotential };

/// Per-layer scalar shape parameter. Clamped from below after every
/// optimizer step so the sigmoid family cannot flip sign.
struct GammaParam {
    double value = 1.0;
    double min_clamp = 0.01;

    void clamp() {
        if (value < min_clamp) value = min_clamp;
    }
};

inline double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

inline double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }

/// Auxiliary activation value f(u, gamma). Backward-only machinery: the
/// spiking forward pass never calls into this header. The relaxed
/// verification model in the harness uses these as real activations.
inline double aux_value(double u, double gamma, double v_th, SurrogateKind kind) {
    const double d = u - v_th;
    return kind == SurrogateKind::ConvSpike ? std::atan(gamma * d) + 0.5 : softplus(gamma * d);
}

/// Rescaled surrogate do/du (maximum value 1).
inline double psg_du_scalar(double u, double gamma, double v_th, SurrogateKind kind) {
    const double d = u - v_th;
    if (kind == SurrogateKind::ConvSpike) {
        const double g = gamma * d;
        return 1.0 / (1.0 + g * g);
    }
    return sigmoid(gamma * d);
}

/// Rescaled surrogate do/dgamma as printed: algebraically identical to
/// psg_du for both families. With signed_grad the sign of (u - v_th) from
/// the unscaled derivative is restored.
inline double psg_dgamma_scalar(double u, double gamma, double v_th, SurrogateKind kind, bool signed_grad = false) {
    const double d = u - v_th;
    double r;
    if (kind == SurrogateKind::ConvSpike) {
        const double g = d * gamma;
        r = 1.0 / (1.0 + g * g);
    } else {
        r = sigmoid(d * gamma);
    }
    if (signed_grad) r *= d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    return r;
}

/// Exact partial derivatives of the auxiliary functions before rescaling.
/// Verification only; training never uses them.
inline std::pair<double, double> unscaled_partials_scalar(double u, double gamma, double v_th, SurrogateKind kind) {
    const double d = u - v_th;
    if (kind == SurrogateKind::ConvSpike) {
        const double g = gamma * d;
        const double den = 1.0 + g * g;
        return {gamma / den, d / den};
    }
    const double s = sigmoid(gamma * d);
    return {gamma * s, d * s};
}

template <typename S>
TensorT<S> psg_du(const TensorT<S>& u, double gamma, double v_th, SurrogateKind kind) {
    TensorT<S> out;
    out.shape = u.shape;
    out.data.resize(u.data.size());
    for (size_t i = 0; i < u.data.size(); ++i)
        out.data[i] = static_cast<S>(psg_du_scalar(static_cast<double>(u.data[i]), gamma, v_th, kind));
    return out;
}

template <typename S>
TensorT<S> psg_dgamma(const TensorT<S>& u, double gamma, double v_th, SurrogateKind kind, bool signed_grad = false) {
    TensorT<S> out;
    out.shape = u.shape;
    out.data.resize(u.data.size());
    for (size_t i = 0; i < u.data.size(); ++i)
        out.data[i] = static_cast<S>(psg_dgamma_scalar(static_cast<double>(u.data[i]), gamma, v_th, kind, signed_grad));
    return out;
}

template <typename S>
std::pair<TensorT<S>, TensorT<S>> unscaled_partials(const TensorT<S>& u, double gamma, double v_th,
                                                    SurrogateKind kind) {
    TensorT<S> du, dg;
    du.shape = dg.shape = u.shape;
    du.data.resize(u.data.size());
    dg.data.resize(u.data.size());
    for (size_t i = 0; i < u.data.size(); ++i) {
        auto [a, b] = unscaled_partials_scalar(static_cast<double>(u.data[i]), gamma, v_th, kind);
        du.data[i] = static_cast<S>(a);
        dg.data[i] = static_cast<S>(b);
    }
    return {std::move(du), std::move(dg)};
}

}  // namespace snnkit
