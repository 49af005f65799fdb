#include "lcsf/harness.hpp"

#include "lcsf/errors.hpp"
#include "lcsf/rng.hpp"
#include "lcsf/threading.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lcsf {

void StudyConfig::validate() const {
    if (realizations < 1) throw ConfigError("realization count must be >= 1");
    multisine.validate();
    msd.validate();
    gp.validate();
    region.validate();
    solver.validate();
    train.validate();
    if (static_cast<Eigen::Index>(anchor_counts.size()) != region.dim() ||
        static_cast<Eigen::Index>(eval_counts.size()) != region.dim())
        throw ConfigError("anchor/evaluation counts must match the region dimension");
    if (!(margin > 0.0)) throw ConfigError("gamma margin must be positive");
    if (initial_amplitude < bounds.lo || initial_amplitude > bounds.hi)
        throw ConfigError("initial amplitude outside the amplitude bounds");
    if (warmup_periods < 0) throw ConfigError("warm-up period count must be >= 0");
    if (linearization_jitter < 0.0) throw ConfigError("linearization jitter must be >= 0");
    if (n_test < 16) throw ConfigError("test-set length too small");
    if (!(test_f_max > test_f_min && test_f_min > 0.0))
        throw ConfigError("test band requires f_max > f_min > 0");
    if (test_amplitude_full <= 0.0 || test_amplitude_reduced <= 0.0 ||
        sweep_amplitude <= 0.0 || white_variance <= 0.0)
        throw ConfigError("test-signal scales must be positive");
    if (jobs < 1) throw ConfigError("job count must be >= 1");
}

StudyConfig StudyConfig::desk_profile() {
    StudyConfig cfg;
    cfg.realizations = 10;
    cfg.multisine.n_samples = 512;
    // Same 1.17..9.8 Hz band as the full profile at the shorter period.
    cfg.multisine.line_indices = MultisineConfig::make_line_range(6, 50, 4);
    cfg.eval_counts = {61, 61};
    cfg.n_test = std::size_t{1} << 13;
    cfg.solver.max_inner_iterations = 120;
    cfg.solver.max_outer_iterations = 6;
    return cfg;
}

StudyConfig StudyConfig::paper_profile() {
    return StudyConfig{};  // schema defaults are the full-scale study
}

double median(std::vector<double> values) {
    if (values.empty()) throw ConfigError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

IoModel nonlinear_plant(const StudyConfig& config) {
    IoModel plant;
    plant.kind = IoModel::Kind::nonlinear_msd;
    plant.msd = config.msd;
    plant.f_s = config.multisine.f_s;
    return plant;
}

SolveDiagnostics diagnostics_of(const DesignOutcome& outcome) {
    return SolveDiagnostics{outcome.iterations, outcome.evaluations, outcome.converged,
                            outcome.constraint_violation};
}

} // namespace

SignalParams draw_initial_params(const StudyConfig& config, int realization_index) {
    const std::size_t lines = config.multisine.line_count();
    SignalParams theta;
    theta.amplitudes.assign(lines, config.initial_amplitude);
    theta.phases.resize(lines);
    SplitMix64 rng(derive_seed(config.master_seed,
                               static_cast<std::uint64_t>(realization_index), "phases"));
    for (auto& p : theta.phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return theta;
}

IoModel build_design_model(const StudyConfig& config, int realization_index,
                           double* linearization_point) {
    IoModel model;
    model.msd = config.msd;
    model.f_s = config.multisine.f_s;
    double point = 0.0;
    if (config.design_model == DesignModelKind::linear) {
        if (config.linearization == LinearizationMode::jittered) {
            SplitMix64 rng(derive_seed(config.master_seed,
                                       static_cast<std::uint64_t>(realization_index),
                                       "linpoint"));
            point = rng.uniform(-config.linearization_jitter, config.linearization_jitter);
        }
        model.kind = IoModel::Kind::linear_approx;
        model.linear = linearize_msd_at(config.msd, point);
    } else {
        model.kind = IoModel::Kind::nonlinear_msd;
    }
    if (linearization_point) *linearization_point = point;
    return model;
}

DesignProblem make_design_problem(const StudyConfig& config, const IoModel& model,
                                  const SignalParams& theta0) {
    DesignProblem problem;
    problem.model = model;
    problem.signal = config.multisine;
    problem.gp = config.gp;
    problem.anchors = build_anchor_grid(config.region, config.anchor_counts);
    problem.region = config.region;
    problem.eval_counts = config.eval_counts;
    problem.theta0 = theta0;
    problem.x0 = State::Zero();
    problem.margin = config.margin;
    problem.bounds = config.bounds;
    problem.cost_kind = config.cost_kind;
    problem.warmup_periods = config.warmup_periods;
    problem.dy_scale = config.dy_scale();
    problem.solver = config.solver;
    return problem;
}

std::vector<TestDataset> generate_test_suite(const StudyConfig& config) {
    const IoModel plant = nonlinear_plant(config);
    const double f_s = config.multisine.f_s;

    MultisineConfig test_grid;
    test_grid.f_s = f_s;
    test_grid.n_samples = config.n_test;
    test_grid.line_indices = MultisineConfig::make_line_band(
        f_s, config.n_test, config.test_f_min, config.test_f_max);
    test_grid.validate();

    std::vector<TestDataset> suite;
    auto add = [&](const std::string& name, const std::vector<double>& u) {
        auto y = simulate_output(plant, State::Zero(), u);
        y.resize(u.size());
        suite.push_back(TestDataset{name, u, y});
    };

    auto random_phase_multisine = [&](double amplitude, const char* tag) {
        SignalParams theta;
        theta.amplitudes.assign(test_grid.line_count(), amplitude);
        theta.phases.resize(test_grid.line_count());
        SplitMix64 rng(derive_seed(config.master_seed, 0, tag));
        for (auto& p : theta.phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
        return multisine_sequence(theta, test_grid, config.n_test);
    };

    add("multisine_full", random_phase_multisine(config.test_amplitude_full,
                                                 "test-multisine-full"));
    add("multisine_reduced", random_phase_multisine(config.test_amplitude_reduced,
                                                    "test-multisine-reduced"));
    const double duration = static_cast<double>(config.n_test) / f_s;
    add("sweep_log",
        log_sweep_sequence(config.test_f_min, config.test_f_max, duration,
                           config.sweep_amplitude, f_s, config.n_test));
    add("white_noise",
        white_uniform_sequence(derive_seed(config.master_seed, 0, "test-white"),
                               config.white_variance, config.n_test));
    return suite;
}

RealizationRecord run_realization(int index, const StudyConfig& config,
                                  const std::vector<TestDataset>& tests) {
    RealizationRecord rec;
    rec.index = index;
    rec.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(index),
                           "realization");
    std::string stage = "init";
    try {
        stage = "phases";
        rec.theta_ini = draw_initial_params(config, index);

        stage = "design_model";
        const IoModel design_model =
            build_design_model(config, index, &rec.linearization_point);

        const DesignProblem base = make_design_problem(config, design_model, rec.theta_ini);

        stage = "evaluate_initial";
        const DesignEvaluation initial_eval = evaluate_design(rec.theta_ini, base);
        rec.v_ini = initial_eval.v_cost;
        rec.power_ini = initial_eval.power;

        stage = "solve_classical";
        const DesignOutcome classical = solve_classical(base);
        rec.theta_cl = classical.theta;
        rec.power_cl = classical.power;
        rec.v_cl = classical.v_cost;
        rec.classical = diagnostics_of(classical);

        stage = "compute_gamma";
        rec.gamma0 = classical.v_cost;
        rec.gamma = compute_gamma(classical, config.margin);

        stage = "solve_least_costly";
        DesignProblem lc_problem = base;
        lc_problem.mode = DesignMode::least_costly;
        lc_problem.gamma = rec.gamma;
        lc_problem.theta0 = classical.theta;
        const DesignOutcome least_costly = solve_least_costly(lc_problem);
        rec.theta_lc = least_costly.theta;
        rec.power_lc = least_costly.power;
        rec.v_lc = least_costly.v_cost;
        rec.least_costly = diagnostics_of(least_costly);

        stage = "validation";
        const IoModel plant = nonlinear_plant(config);
        const std::size_t period = config.multisine.n_samples;
        const std::size_t skip = static_cast<std::size_t>(config.warmup_periods) * period;
        const SignalParams* thetas[kDesignCount] = {&rec.theta_ini, &rec.theta_cl,
                                                    &rec.theta_lc};
        double* rhos[kDesignCount] = {&rec.rho_ini, &rec.rho_cl, &rec.rho_lc};
        std::array<std::vector<double>, kDesignCount> train_u, train_y;
        for (int d = 0; d < kDesignCount; ++d) {
            const Dataset data =
                simulate_dataset(plant, *thetas[d], config.multisine, State::Zero(),
                                 config.warmup_periods, config.dy_scale());
            *rhos[d] =
                covering_radius(data.features, config.region, config.eval_counts).radius;
            const auto u_full =
                multisine_sequence(*thetas[d], config.multisine, skip + period);
            const auto y_full = simulate_output(plant, State::Zero(), u_full);
            train_u[d].assign(u_full.begin() + static_cast<std::ptrdiff_t>(skip),
                              u_full.end());
            train_y[d].assign(y_full.begin() + static_cast<std::ptrdiff_t>(skip),
                              y_full.begin() + static_cast<std::ptrdiff_t>(skip + period));
        }

        stage = "identify";
        std::array<NoeModel, kDesignCount> models;
        for (int d = 0; d < kDesignCount; ++d) {
            const auto fit_seed =
                derive_seed(config.master_seed, static_cast<std::uint64_t>(index),
                            std::string("identify-") + design_name(d));
            const TrainResult fit = train_lm(train_u[d], train_y[d], config.train, fit_seed);
            for (std::size_t i = 1; i < fit.cost_trace.size(); ++i)
                if (fit.cost_trace[i] > fit.cost_trace[i - 1])
                    rec.lm_traces_monotone = false;
            models[d] = fit.model;
        }

        stage = "evaluate_tests";
        for (int d = 0; d < kDesignCount; ++d) {
            const std::size_t first =
                static_cast<std::size_t>(std::max(models[d].m_y, models[d].m_u));
            for (std::size_t f = 0; f < tests.size() && f < kTestFamilyCount; ++f) {
                const auto& test = tests[f];
                const std::vector<double> y_init(test.y.begin(),
                                                 test.y.begin() + models[d].m_y);
                const auto yhat = noe_simulate(models[d], test.u, y_init);
                const std::vector<double> reference(
                    test.y.begin() + static_cast<std::ptrdiff_t>(first), test.y.end());
                rec.rmse[static_cast<std::size_t>(d)][f] = rmse(reference, yhat);
            }
        }

        rec.ok = true;
    } catch (const std::exception& error) {
        rec.ok = false;
        rec.failure_stage = stage + ": " + error.what();
    }
    return rec;
}

StudyResult run_study(const StudyConfig& config) {
    config.validate();
    StudyResult result;
    result.config = config;

    const auto tests = generate_test_suite(config);
    for (const auto& t : tests) result.test_names.push_back(t.name);

    StudyConfig worker = config;
    if (config.jobs > 1) worker.solver.gradient_threads = 1;

    result.records.resize(static_cast<std::size_t>(config.realizations));
    parallel_for(
        static_cast<std::size_t>(config.realizations),
        [&](std::size_t r) {
            result.records[r] = run_realization(static_cast<int>(r), worker, tests);
        },
        static_cast<unsigned>(std::max(config.jobs, 1)));
    return result;
}

StudyAggregates aggregate(const StudyResult& result) {
    StudyAggregates agg;
    std::vector<const RealizationRecord*> ok;
    for (const auto& rec : result.records) {
        if (rec.ok)
            ok.push_back(&rec);
        else
            ++agg.failures;
    }
    agg.successes = static_cast<int>(ok.size());
    if (ok.empty()) return agg;

    const double n = static_cast<double>(ok.size());
    for (const auto* rec : ok) {
        agg.mean_power_ini += rec->power_ini / n;
        agg.mean_power_cl += rec->power_cl / n;
        agg.mean_power_lc += rec->power_lc / n;
        agg.mean_v_cl += rec->v_cl / n;
        agg.mean_v_lc += rec->v_lc / n;
        agg.mean_rho_ini += rec->rho_ini / n;
        agg.mean_rho_cl += rec->rho_cl / n;
        agg.mean_rho_lc += rec->rho_lc / n;
    }
    for (int d = 0; d < kDesignCount; ++d) {
        for (int f = 0; f < kTestFamilyCount; ++f) {
            std::vector<double> values;
            values.reserve(ok.size());
            for (const auto* rec : ok)
                values.push_back(
                    rec->rmse[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)]);
            agg.median_rmse[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)] =
                median(std::move(values));
        }
    }
    return agg;
}

} // namespace lcsf
