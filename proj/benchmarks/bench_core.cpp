#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "spinnet/balance.hpp"
#include "spinnet/dynamics.hpp"
#include "spinnet/errors.hpp"
#include "spinnet/lambda_model.hpp"
#include "spinnet/netgen.hpp"
#include "spinnet/normscale.hpp"
#include "spinnet/swpert.hpp"

using namespace spinnet;

static void BM_EigSym(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SpinNetwork net = build_random_uniform(n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(eig_sym(net.couplings));
    state.SetComplexityN(n);
}
BENCHMARK(BM_EigSym)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_FidelityTrace(benchmark::State& state) {
    const int samples = static_cast<int>(state.range(0));
    const SpinNetwork net = build_random_dipolar_chain(24, 1.0, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(fidelity_trace(net.couplings, 0, 23, 50.0, samples));
}
BENCHMARK(BM_FidelityTrace)->Arg(2001)->Arg(20001);

static void BM_EffectivePipeline(benchmark::State& state) {
    // partition + bulk diagonalization + second-order end model, the screening
    // inner loop of the off-resonance ensembles
    const SpinNetwork net =
        rescale_to_gamma(build_random_dipolar_chain(12, 1.0, 11), 25.0);
    for (auto _ : state) {
        const PartitionedNetwork p = partition(net);
        benchmark::DoNotOptimize(effective_AS(p));
    }
}
BENCHMARK(BM_EffectivePipeline);

static void BM_LambdaClosedForm(benchmark::State& state) {
    Eigen::VectorXd u(6);
    u << 0.7, -0.5, 0.9, 0.3, -0.8, 0.4;
    SpinNetwork net;
    const int nb = static_cast<int>(u.size());
    net.couplings = Eigen::MatrixXd::Zero(nb + 2, nb + 2);
    for (int j = 0; j < nb; ++j) {
        net.couplings(0, j + 1) = net.couplings(j + 1, 0) = 0.3 * u(j);
        net.couplings(nb + 1, j + 1) = net.couplings(j + 1, nb + 1) = u(j);
    }
    net.ends = {0, nb + 1};
    std::vector<int> all(nb);
    for (int j = 0; j < nb; ++j) all[j] = j;
    const LambdaModel m = build_lambda_degenerate(partition(net), all);

    double t = 0.0;
    for (auto _ : state) {
        t += 1e-3;
        benchmark::DoNotOptimize(lambda_fidelity_closed(m, t));
    }
}
BENCHMARK(BM_LambdaClosedForm);

static void BM_SimulateSchedule(benchmark::State& state) {
    const int cycles = static_cast<int>(state.range(0));
    const SpinNetwork net = build_random_dipolar_chain(12, 1.0, 11);
    const PartitionedNetwork p = partition(net);
    const ModeSelection sel = select_resonant_mode(p);
    const LambdaModel m = build_lambda(p, sel.mode);
    const auto [r, side] = balance_ratio(m.O1, m.ON);
    const double T = balanced_transfer_time(m.O1, m.ON);
    const Eigen::MatrixXd A = lambda_matrix(m);
    const int N = static_cast<int>(A.rows());
    const int flip = side == 0 ? 0 : N - 1;
    const auto sched = build_schedule(r, flip, T, cycles, true);
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_schedule(A, {0, N - 1}, sched, 2001, 1.25));
}
BENCHMARK(BM_SimulateSchedule)->Arg(4)->Arg(20)->Arg(64);

static void BM_BuildP1Nv(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        ++seed;
        try {
            benchmark::DoNotOptimize(build_p1_nv({30.0, 14.0, 14.0}, 10.0, 18.0, seed));
        } catch (const PhysicsError&) {
            // empty draw, keep going
        }
    }
}
BENCHMARK(BM_BuildP1Nv);

static void BM_BuildHoneycomb(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_honeycomb(side, side, 1.0));
    state.SetComplexityN(side * side);
}
BENCHMARK(BM_BuildHoneycomb)->Arg(4)->Arg(8)->Arg(16)->Complexity();

BENCHMARK_MAIN();
