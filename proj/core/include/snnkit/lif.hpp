#pragma once

#include <utility>
#include <vector>

#include "snnkit/tensor.hpp"

namespace snnkit {

/// Discrete-time leaky integrate-and-fire parameters. Reset is hard-to-zero:
/// a neuron that fired carries no potential into the next step.
struct LifConfig {
    double epsilon = 0.5;  // per-step decay factor, in (0,1)
    double v_th = 0.5;     // firing threshold, > 0

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("LifConfig: epsilon must lie in (0,1), got " + std::to_string(epsilon));
        if (!(v_th > 0.0)) throw std::invalid_argument("LifConfig: v_th must be > 0, got " + std::to_string(v_th));
    }
};

enum class OutputKind { SpikeOutput, PotentialOutput };

/// One LIF update: u = eps * u_prev * (1 - o_prev) + current, o = step(u).
/// Callers pass all-zero u_prev/o_prev at the first timestep.
template <typename S>
std::pair<TensorT<S>, TensorT<S>> lif_step(const TensorT<S>& u_prev, const TensorT<S>& o_prev,
                                           const TensorT<S>& current, const LifConfig& cfg) {
    if (!u_prev.same_shape(o_prev) || !u_prev.same_shape(current))
        throw std::invalid_argument("lif_step: shape mismatch " + u_prev.shape_str() + " / " + o_prev.shape_str() +
                                    " / " + current.shape_str());
    const S eps = static_cast<S>(cfg.epsilon);
    const S vth = static_cast<S>(cfg.v_th);
    TensorT<S> u, o;
    u.shape = o.shape = current.shape;
    u.data.resize(current.data.size());
    o.data.resize(current.data.size());
    for (size_t i = 0; i < current.data.size(); ++i) {
        const S ui = eps * u_prev.data[i] * (S(1) - o_prev.data[i]) + current.data[i];
        u.data[i] = ui;
        o.data[i] = ui >= vth ? S(1) : S(0);
    }
    return {std::move(u), std::move(o)};
}

/// Potential-output update for fully-connected layers: the potential leaks
/// and integrates but never fires or resets, and the output is the potential
/// itself.
template <typename S>
std::pair<TensorT<S>, TensorT<S>> potential_output_step(const TensorT<S>& u_prev, const TensorT<S>& current,
                                                        const LifConfig& cfg) {
    if (!u_prev.same_shape(current))
        throw std::invalid_argument("potential_output_step: shape mismatch " + u_prev.shape_str() + " / " +
                                    current.shape_str());
    const S eps = static_cast<S>(cfg.epsilon);
    TensorT<S> u;
    u.shape = current.shape;
    u.data.resize(current.data.size());
    for (size_t i = 0; i < current.data.size(); ++i) u.data[i] = eps * u_prev.data[i] + current.data[i];
    TensorT<S> o = u;
    return {std::move(u), std::move(o)};
}

/// Per-layer record of the unrolled dynamics, kept for BPTT.
/// For spike-output layers every o element is 0 or 1; for potential-output
/// layers o equals u. `input` holds the layer's input at each timestep (the
/// predecessor's output after pooling/dropout), needed for weight gradients.
template <typename S>
struct LayerTraceT {
    OutputKind kind = OutputKind::SpikeOutput;
    std::vector<TensorT<S>> u;
    std::vector<TensorT<S>> o;
    std::vector<TensorT<S>> input;
};

template <typename S>
struct StateTraceT {
    int timesteps = 0;
    std::vector<LayerTraceT<S>> layers;
};

/// Run one layer over a full current sequence, recording every (u, o).
template <typename S>
LayerTraceT<S> run_layer_over_time(const std::vector<TensorT<S>>& currents, const LifConfig& cfg, OutputKind kind) {
    if (currents.empty()) throw std::invalid_argument("run_layer_over_time: empty current sequence");
    cfg.validate();
    LayerTraceT<S> trace;
    trace.kind = kind;
    TensorT<S> u = TensorT<S>::zeros(currents.front().shape);
    TensorT<S> o = u;
    for (const auto& current : currents) {
        if (kind == OutputKind::SpikeOutput) {
            std::tie(u, o) = lif_step(u, o, current, cfg);
        } else {
            std::tie(u, o) = potential_output_step(u, current, cfg);
        }
        trace.u.push_back(u);
        trace.o.push_back(o);
    }
    return trace;
}

}  // namespace snnkit
