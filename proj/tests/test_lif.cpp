#include <doctest.h>

#include <cmath>
#include <vector>

#include "snnkit/lif.hpp"
#include "snnkit/tensor.hpp"

using namespace snnkit;

namespace {

Tensor64 scalar(double v) { return Tensor64::full({1}, v); }

// Reference simulator: per-neuron scalar loop written independently of the
// tensor stepping code.
struct ScalarRef {
    double u = 0.0, o = 0.0;
    void step_spike(double current, double eps, double v_th) {
        u = eps * u * (1.0 - o) + current;
        o = u >= v_th ? 1.0 : 0.0;
    }
    void step_potential(double current, double eps) {
        u = eps * u + current;
        o = u;
    }
};

}  // namespace

TEST_SUITE("lif") {

TEST_CASE("config validation") {
    LifConfig bad;
    bad.epsilon = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.epsilon = 0.5;
    bad.v_th = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.v_th = 0.5;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("reset annihilates the leak term") {
    LifConfig cfg;  // eps=0.5, v_th=0.5
    auto [u, o] = lif_step(scalar(0.8), scalar(1.0), scalar(0.3), cfg);
    CHECK(u[0] == doctest::Approx(0.3));
    CHECK(o[0] == 0.0);
}

TEST_CASE("without reset the potential leaks and integrates") {
    LifConfig cfg;
    auto [u, o] = lif_step(scalar(0.8), scalar(0.0), scalar(0.3), cfg);
    CHECK(u[0] == doctest::Approx(0.7));
    CHECK(o[0] == 1.0);
}

TEST_CASE("subthreshold potential decays geometrically and never fires") {
    LifConfig cfg;
    double expect = cfg.v_th - 1e-3;
    Tensor64 u = scalar(expect), o = scalar(0.0), zero = scalar(0.0);
    for (int t = 0; t < 20; ++t) {
        std::tie(u, o) = lif_step(u, o, zero, cfg);
        expect *= cfg.epsilon;
        CHECK(u[0] == doctest::Approx(expect));
        CHECK(o[0] == 0.0);
    }
}

TEST_CASE("potential-output accumulates a geometric series") {
    LifConfig cfg;
    cfg.epsilon = 0.99;
    const double c = 0.37;
    const int T = 12;
    Tensor64 u = scalar(0.0);
    for (int t = 0; t < T; ++t) {
        auto [nu, no] = potential_output_step(u, scalar(c), cfg);
        u = nu;
        CHECK(no[0] == u[0]);
    }
    double series = 0.0;
    for (int k = 0; k < T; ++k) series += std::pow(cfg.epsilon, k);
    CHECK(u[0] == doctest::Approx(c * series).epsilon(1e-12));
}

TEST_CASE("potential-output first step and zero-current cases") {
    LifConfig cfg;
    auto [u, o] = potential_output_step(scalar(0.0), scalar(1.25), cfg);
    CHECK(u[0] == 1.25);
    CHECK(o[0] == 1.25);

    Tensor64 z = scalar(0.0);
    for (int t = 0; t < 5; ++t) {
        auto [nu, no] = potential_output_step(z, scalar(0.0), cfg);
        z = nu;
        CHECK(z[0] == 0.0);
        CHECK(no[0] == 0.0);
    }
}

TEST_CASE("shape mismatches are rejected") {
    LifConfig cfg;
    CHECK_THROWS_AS(lif_step(Tensor64({2}), Tensor64({3}), Tensor64({2}), cfg), std::invalid_argument);
    CHECK_THROWS_AS(potential_output_step(Tensor64({2}), Tensor64({4}), cfg), std::invalid_argument);
}

TEST_CASE("run_layer_over_time with T=1 reduces to a single step") {
    LifConfig cfg;
    Rng rng(4);
    Tensor64 current = random_normal<double>({6}, rng);
    auto trace = run_layer_over_time<double>({current}, cfg, OutputKind::SpikeOutput);
    auto [u, o] = lif_step(Tensor64::zeros({6}), Tensor64::zeros({6}), current, cfg);
    REQUIRE(trace.u.size() == 1);
    for (int i = 0; i < 6; ++i) {
        CHECK(trace.u[0][i] == u[i]);
        CHECK(trace.o[0][i] == o[i]);
    }
    CHECK_THROWS_AS(run_layer_over_time<double>({}, cfg, OutputKind::SpikeOutput), std::invalid_argument);
}

TEST_CASE("membrane rises on input, then the reset drops the leak path") {
    // Drive one neuron over threshold, then cut the input: the step after a
    // spike must carry no eps*u term.
    LifConfig cfg;
    std::vector<Tensor64> currents = {scalar(0.3), scalar(0.3), scalar(0.0), scalar(0.0)};
    auto trace = run_layer_over_time(currents, cfg, OutputKind::SpikeOutput);
    // t=0: u=0.3 silent; t=1: u=0.45... still below. Adjust drive: we want a
    // spike, so check the recorded trace for one and verify the next u.
    bool fired = false;
    for (size_t t = 0; t + 1 < currents.size(); ++t) {
        if (trace.o[t][0] == 1.0) {
            fired = true;
            const double expected_next = currents[t + 1][0];  // leak term zeroed
            CHECK(trace.u[t + 1][0] == doctest::Approx(expected_next));
        }
    }
    if (!fired) {
        // Stronger drive must fire.
        currents = {scalar(0.6), scalar(0.0)};
        trace = run_layer_over_time(currents, cfg, OutputKind::SpikeOutput);
        CHECK(trace.o[0][0] == 1.0);
        CHECK(trace.u[1][0] == doctest::Approx(0.0));
    }
}

TEST_CASE("random current trace equals the scalar reference simulator") {
    LifConfig cfg;
    cfg.epsilon = 0.6;
    Rng rng(77);
    const int T = 16, n = 9;
    std::vector<Tensor64> currents;
    for (int t = 0; t < T; ++t) currents.push_back(random_normal<double>({n}, rng, 0.2, 0.5));

    for (OutputKind kind : {OutputKind::SpikeOutput, OutputKind::PotentialOutput}) {
        auto trace = run_layer_over_time(currents, cfg, kind);
        for (int i = 0; i < n; ++i) {
            ScalarRef ref;
            for (int t = 0; t < T; ++t) {
                if (kind == OutputKind::SpikeOutput)
                    ref.step_spike(currents[t][i], cfg.epsilon, cfg.v_th);
                else
                    ref.step_potential(currents[t][i], cfg.epsilon);
                CHECK(trace.u[t][i] == doctest::Approx(ref.u).epsilon(1e-14));
                CHECK(trace.o[t][i] == doctest::Approx(ref.o).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("spikes are binary and re-thresholding is idempotent") {
    LifConfig cfg;
    Rng rng(8);
    Tensor64 current = random_normal<double>({64}, rng, 0.4, 0.6);
    auto [u, o] = lif_step(Tensor64::zeros({64}), Tensor64::zeros({64}), current, cfg);
    for (int i = 0; i < 64; ++i) {
        CHECK((o[i] == 0.0 || o[i] == 1.0));
        const double again = u[i] >= cfg.v_th ? 1.0 : 0.0;
        CHECK(o[i] == again);
    }
}

TEST_CASE("u is affine and increasing in the input current") {
    LifConfig cfg;
    Tensor64 u_prev = scalar(0.4), o_prev = scalar(0.0);
    auto [u1, o1] = lif_step(u_prev, o_prev, scalar(0.1), cfg);
    auto [u2, o2] = lif_step(u_prev, o_prev, scalar(0.3), cfg);
    auto [u3, o3] = lif_step(u_prev, o_prev, scalar(0.5), cfg);
    CHECK(u2[0] > u1[0]);
    CHECK(u3[0] > u2[0]);
    // Affine: equal input increments give equal potential increments.
    CHECK(u3[0] - u2[0] == doctest::Approx(u2[0] - u1[0]));
}

TEST_CASE("all-zero input with zero state leaves the whole trace at zero") {
    LifConfig cfg;
    const int T = 7;
    std::vector<Tensor64> currents(T, Tensor64::zeros({3, 4}));
    for (OutputKind kind : {OutputKind::SpikeOutput, OutputKind::PotentialOutput}) {
        auto trace = run_layer_over_time(currents, cfg, kind);
        for (int t = 0; t < T; ++t)
            for (int64_t i = 0; i < trace.u[t].size(); ++i) {
                CHECK(trace.u[t][i] == 0.0);
                CHECK(trace.o[t][i] == 0.0);
            }
    }
}

}  // TEST_SUITE
