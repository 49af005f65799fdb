#include "lcsf/design.hpp"
#include "lcsf/gp.hpp"
#include "lcsf/harness.hpp"
#include "lcsf/ident.hpp"
#include "lcsf/rng.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

using namespace lcsf;

Eigen::MatrixXd random_features(Eigen::Index n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::MatrixXd x(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(-0.1, 0.1);
        x(i, 1) = rng.uniform(-0.8, 0.8);
    }
    return x;
}

void bm_v_cost(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Eigen::MatrixXd x = random_features(n, 1);
    const GpConfig config;
    const AnchorGrid anchors = build_anchor_grid(RegionOfInterest{}, {5, 5});
    for (auto _ : state) benchmark::DoNotOptimize(v_cost(x, anchors, config));
}
BENCHMARK(bm_v_cost)->Arg(128)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_design_objective(benchmark::State& state) {
    StudyConfig cfg = StudyConfig::desk_profile();
    cfg.multisine.n_samples = static_cast<std::size_t>(state.range(0));
    cfg.multisine.line_indices =
        MultisineConfig::make_line_band(cfg.multisine.f_s, cfg.multisine.n_samples, 1.2, 9.8);
    const SignalParams theta = draw_initial_params(cfg, 0);
    const IoModel model = build_design_model(cfg, 0);
    const DesignProblem problem = make_design_problem(cfg, model, theta);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_design(theta, problem).v_cost);
}
BENCHMARK(bm_design_objective)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_rk4(benchmark::State& state) {
    IoModel model;
    model.kind = IoModel::Kind::nonlinear_msd;
    std::vector<double> u(static_cast<std::size_t>(state.range(0)));
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = 20.0 * std::sin(2.0 * std::numbers::pi * 0.01 * static_cast<double>(k));
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_rk4(model, State::Zero(), u, 0.01).back());
}
BENCHMARK(bm_rk4)->Arg(1024)->Arg(8192)->Unit(benchmark::kMicrosecond);

void bm_lm_iteration(benchmark::State& state) {
    const NoeModel teacher = NoeModel::random_init(3, 0.8);
    SplitMix64 rng(4);
    std::vector<double> u(512);
    for (auto& s : u) s = rng.uniform(-2.0, 2.0);
    const auto yhat = noe_simulate(teacher, u, {0.1, -0.05});
    std::vector<double> y{0.1, -0.05};
    y.insert(y.end(), yhat.begin(), yhat.end());
    TrainConfig config;
    config.max_iterations = 5;
    config.restarts = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_lm(u, y, config, 9).final_cost);
}
BENCHMARK(bm_lm_iteration)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
