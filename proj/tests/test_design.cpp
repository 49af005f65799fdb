#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lcsf/design.hpp"
#include "lcsf/errors.hpp"
#include "lcsf/rng.hpp"

#include <cmath>
#include <numbers>

using namespace lcsf;

namespace {

/// Small, fast problem: 4 excited lines, 64-sample period, linear model,
/// 3x3 anchors. Every evaluation costs a 64x64 factorization.
DesignProblem toy_problem(std::uint64_t phase_seed = 1) {
    DesignProblem p;
    p.signal.f_s = 100.0;
    p.signal.n_samples = 64;
    p.signal.line_indices = {1, 2, 3, 4};
    p.model.kind = IoModel::Kind::linear_approx;
    p.model.linear = linearize_msd(p.model.msd);
    p.model.f_s = p.signal.f_s;
    p.anchors = build_anchor_grid(p.region, {3, 3});
    p.eval_counts = {21, 21};
    p.theta0 = SignalParams::constant(4, 8.0);
    SplitMix64 rng(phase_seed);
    for (auto& phase : p.theta0.phases) phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.solver.max_inner_iterations = 40;
    p.solver.max_outer_iterations = 4;
    p.solver.max_evaluations = 20000;
    return p;
}

bool same_params(const SignalParams& a, const SignalParams& b) {
    return a.amplitudes == b.amplitudes && a.phases == b.phases;
}

} // namespace

TEST_CASE("finite-difference gradient") {
    SUBCASE("signal power: dP/dA_l = A_l, dP/dphi_l = 0") {
        MultisineConfig config;
        config.n_samples = 256;
        config.line_indices = MultisineConfig::make_line_range(3, 24, 3);
        const std::size_t lines = config.line_count();
        SplitMix64 rng(3);
        Eigen::VectorXd z(2 * lines);
        for (std::size_t i = 0; i < lines; ++i) {
            z[static_cast<Eigen::Index>(i)] = rng.uniform(1.0, 20.0);
            z[static_cast<Eigen::Index>(lines + i)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        const auto objective = [&](const Eigen::VectorXd& v) {
            SignalParams theta;
            theta.amplitudes.assign(v.data(), v.data() + lines);
            theta.phases.assign(v.data() + lines, v.data() + 2 * lines);
            return signal_power(multisine_sequence(theta, config, config.n_samples));
        };
        const Eigen::VectorXd grad = fd_gradient(objective, z, 1e-4);
        for (std::size_t i = 0; i < lines; ++i) {
            CHECK(grad[static_cast<Eigen::Index>(i)] ==
                  doctest::Approx(z[static_cast<Eigen::Index>(i)]).epsilon(1e-6));
            CHECK(std::abs(grad[static_cast<Eigen::Index>(lines + i)]) < 1e-6);
        }
    }

    SUBCASE("quadratic is differentiated to roundoff") {
        Eigen::VectorXd z(5);
        z << 1.0, -2.0, 0.5, 3.0, -0.1;
        const auto objective = [](const Eigen::VectorXd& v) { return v.squaredNorm(); };
        const Eigen::VectorXd grad = fd_gradient(objective, z, 1e-4);
        CHECK((grad - 2.0 * z).lpNorm<Eigen::Infinity>() < 1e-6);
    }

    SUBCASE("halving the step shrinks the error about fourfold on a cubic") {
        Eigen::VectorXd z(3);
        z << 0.8, -1.1, 0.4;
        const auto objective = [](const Eigen::VectorXd& v) {
            return v.array().cube().sum();
        };
        const Eigen::VectorXd exact = 3.0 * z.array().square().matrix();
        const double err_h = (fd_gradient(objective, z, 1e-3) - exact).norm();
        const double err_h2 = (fd_gradient(objective, z, 5e-4) - exact).norm();
        CHECK(err_h / err_h2 == doctest::Approx(4.0).epsilon(0.25));
    }

    SUBCASE("non-finite objective names the coordinate") {
        Eigen::VectorXd z(2);
        z << 0.0, 0.0;
        const auto objective = [](const Eigen::VectorXd& v) {
            return v[0] == 0.0 ? v.squaredNorm() : std::nan("");
        };
        CHECK_THROWS_WITH_AS(fd_gradient(objective, z, 1e-4),
                             doctest::Contains("coordinate"), NumericError);
    }

    SUBCASE("thread count does not change the result") {
        const DesignProblem p = toy_problem();
        const auto objective = [&](const Eigen::VectorXd& v) {
            SignalParams theta;
            theta.amplitudes.assign(v.data(), v.data() + 4);
            theta.phases.assign(v.data() + 4, v.data() + 8);
            return evaluate_design(theta, p).v_cost;
        };
        Eigen::VectorXd z(8);
        z << 8, 8, 8, 8, 0.3, 1.2, 2.7, 5.0;
        const Eigen::VectorXd g1 = fd_gradient(objective, z, 1e-4, 1);
        const Eigen::VectorXd g2 = fd_gradient(objective, z, 1e-4, 2);
        CHECK(g1 == g2);
    }
}

TEST_CASE("evaluate_design") {
    SUBCASE("zero amplitudes: zero power, prior reduced only at the origin") {
        DesignProblem p = toy_problem();
        const SignalParams zero = SignalParams::constant(4, 0.0);
        const DesignEvaluation eval = evaluate_design(zero, p);
        CHECK(eval.power == 0.0);
        CHECK(eval.v_cost < p.gp.sigma_f2);
        CHECK(eval.v_cost > 0.5 * p.gp.sigma_f2);  // a single repeated feature point
        // All feature rows collapse to the rest position.
        CHECK(eval.dataset.features.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("default initial parameters on the full-size problem") {
        DesignProblem p = toy_problem();
        p.signal = MultisineConfig{};  // N = 1024, lines 12:7:103
        p.theta0 = SignalParams::constant(14, 8.0);
        const DesignEvaluation eval = evaluate_design(p.theta0, p);
        CHECK(eval.power == doctest::Approx(448.0).epsilon(1e-6));
        CHECK(eval.v_cost < p.gp.sigma_f2);
    }

    SUBCASE("identical parameters give bit-identical results") {
        const DesignProblem p = toy_problem();
        SignalParams theta = p.theta0;
        const DesignEvaluation a = evaluate_design(theta, p);
        const DesignEvaluation b = evaluate_design(theta, p);
        CHECK(a.v_cost == b.v_cost);
        CHECK(a.power == b.power);
        CHECK(a.dataset.features == b.dataset.features);
    }
}

TEST_CASE("classical design solve") {
    SUBCASE("strict improvement on the toy problem") {
        const DesignProblem p = toy_problem();
        const double v0 = evaluate_design(p.theta0, p).v_cost;
        const DesignOutcome outcome = solve_classical(p);
        CHECK(outcome.converged);
        CHECK(outcome.v_cost < v0);
        CHECK(outcome.evaluations > 0);
        for (double a : outcome.theta.amplitudes) {
            CHECK(a >= p.bounds.lo);
            CHECK(a <= p.bounds.hi);
        }
    }

    SUBCASE("flat objective returns theta0 with the converged flag") {
        // Region far outside anything the plant can reach: the kernel cross
        // terms underflow to zero and the V-cost is constant in theta.
        DesignProblem p = toy_problem();
        p.region.lower << 100.0, 100.0;
        p.region.upper << 100.2, 101.6;
        p.anchors = build_anchor_grid(p.region, {3, 3});
        const DesignOutcome outcome = solve_classical(p);
        CHECK(outcome.converged);
        CHECK(same_params(outcome.theta, p.theta0));
        CHECK(outcome.v_cost == doctest::Approx(p.gp.sigma_f2).epsilon(1e-14));
    }

    SUBCASE("deterministic across repeated solves") {
        const DesignProblem p = toy_problem(7);
        const DesignOutcome a = solve_classical(p);
        const DesignOutcome b = solve_classical(p);
        CHECK(same_params(a.theta, b.theta));
        CHECK(a.v_cost == b.v_cost);
        CHECK(a.power == b.power);
        CHECK(a.iterations == b.iterations);
        CHECK(a.evaluations == b.evaluations);
    }

    SUBCASE("evaluation budget exhaustion clears the converged flag") {
        DesignProblem p = toy_problem();
        p.solver.max_evaluations = 10;  // below one gradient
        const DesignOutcome outcome = solve_classical(p);
        CHECK_FALSE(outcome.converged);
        CHECK(same_params(outcome.theta, p.theta0));
    }
}

TEST_CASE("gamma computation") {
    DesignOutcome outcome;
    outcome.converged = true;
    outcome.v_cost = 0.04;

    CHECK(compute_gamma(outcome, 0.05) == doctest::Approx(0.042).epsilon(1e-15));
    CHECK(compute_gamma(outcome, 0.0) == doctest::Approx(0.04).epsilon(1e-15));

    outcome.v_cost = 0.0428;
    CHECK(compute_gamma(outcome, 0.05) == doctest::Approx(0.04494).epsilon(1e-12));

    outcome.converged = false;
    CHECK_THROWS_AS(compute_gamma(outcome, 0.05), ConfigError);
}

TEST_CASE("least-costly design solve") {
    SUBCASE("inactive constraint drives the signal to zero power") {
        DesignProblem p = toy_problem();
        p.mode = DesignMode::least_costly;
        p.gamma = 2.0 * p.gp.sigma_f2;  // V <= sigma_f2 always, constraint inactive
        const DesignOutcome outcome = solve_least_costly(p);
        CHECK(outcome.power < 1e-8);
        CHECK(outcome.v_cost <= p.gamma * (1.0 + 1e-4));
    }

    SUBCASE("pipeline: classical feasibility step then cost reduction") {
        const DesignProblem p = toy_problem(11);
        const DesignOutcome classical = solve_classical(p);
        REQUIRE(classical.converged);
        const double gamma = compute_gamma(classical, p.margin);

        DesignProblem lc = p;
        lc.mode = DesignMode::least_costly;
        lc.gamma = gamma;
        lc.theta0 = classical.theta;
        const DesignOutcome outcome = solve_least_costly(lc);
        CHECK(outcome.v_cost <= gamma * (1.0 + 1e-4));
        CHECK(outcome.power <= classical.power);
        CHECK(outcome.constraint_violation <= 1e-4);
    }

    SUBCASE("infeasible start is rejected") {
        DesignProblem p = toy_problem();
        p.mode = DesignMode::least_costly;
        p.gamma = 1e-9;
        CHECK_THROWS_AS(solve_least_costly(p), ConfigError);
    }

    SUBCASE("zero signal with a large threshold is returned unchanged") {
        DesignProblem p = toy_problem();
        p.mode = DesignMode::least_costly;
        p.gamma = 2.0 * p.gp.sigma_f2;
        p.theta0 = SignalParams::constant(4, 0.0);
        const DesignOutcome outcome = solve_least_costly(p);
        CHECK(outcome.power == 0.0);
        CHECK(same_params(outcome.theta, p.theta0));
    }

    SUBCASE("deterministic across repeated solves") {
        DesignProblem p = toy_problem(13);
        const DesignOutcome classical = solve_classical(p);
        DesignProblem lc = p;
        lc.mode = DesignMode::least_costly;
        lc.gamma = compute_gamma(classical, p.margin);
        lc.theta0 = classical.theta;
        const DesignOutcome a = solve_least_costly(lc);
        const DesignOutcome b = solve_least_costly(lc);
        CHECK(same_params(a.theta, b.theta));
        CHECK(a.power == b.power);
        CHECK(a.evaluations == b.evaluations);
    }

    SUBCASE("penalty-only fallback also satisfies the constraint") {
        DesignProblem p = toy_problem(17);
        const DesignOutcome classical = solve_classical(p);
        DesignProblem lc = p;
        lc.mode = DesignMode::least_costly;
        lc.gamma = compute_gamma(classical, p.margin);
        lc.theta0 = classical.theta;
        lc.solver.penalty_only = true;
        const DesignOutcome outcome = solve_least_costly(lc);
        CHECK(outcome.v_cost <= lc.gamma * (1.0 + 1e-4));
        CHECK(outcome.power <= classical.power);
    }
}

TEST_CASE("problem validation") {
    DesignProblem p = toy_problem();

    SUBCASE("sampling-rate mismatch") {
        p.model.f_s = 50.0;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }

    SUBCASE("least-costly mode needs gamma") {
        p.mode = DesignMode::least_costly;
        p.gamma = 0.0;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }

    SUBCASE("amplitude sup-norm cost is available") {
        p.cost_kind = ExperimentCost::max_abs;
        p.mode = DesignMode::least_costly;
        p.gamma = 2.0 * p.gp.sigma_f2;
        const DesignOutcome outcome = solve_least_costly(p);
        // Unconstrained max-abs minimization also empties the signal.
        CHECK(outcome.power < 1e-6);
    }
}
