#include "lcsf/design.hpp"

#include "lcsf/errors.hpp"
#include "lcsf/threading.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace lcsf {

void SolverConfig::validate() const {
    if (fd_step <= 0.0) throw ConfigError("finite-difference step must be positive");
    if (cost_rel_tol <= 0.0 || step_tol <= 0.0)
        throw ConfigError("solver tolerances must be positive");
    if (cost_tol_window < 1) throw ConfigError("cost tolerance window must be >= 1");
    if (max_inner_iterations < 1 || max_outer_iterations < 1)
        throw ConfigError("iteration limits must be >= 1");
    if (constraint_rel_tol <= 0.0) throw ConfigError("constraint tolerance must be positive");
    if (penalty_initial <= 0.0 || penalty_growth <= 1.0 || penalty_max < penalty_initial)
        throw ConfigError("penalty schedule requires initial > 0, growth > 1, max >= initial");
    if (max_evaluations < 1) throw ConfigError("evaluation budget must be >= 1");
    if (max_line_search_rejections < 1 || max_line_search_trials < 1)
        throw ConfigError("line-search limits must be >= 1");
}

void DesignProblem::validate() const {
    signal.validate();
    theta0.validate(signal);
    gp.validate();
    region.validate();
    solver.validate();
    if (model.f_s != signal.f_s)
        throw ConfigError("model and signal sampling frequencies disagree");
    if (anchors.size() == 0) throw ConfigError("design problem needs anchor points");
    if (!(bounds.lo <= bounds.hi)) throw ConfigError("invalid amplitude bounds");
    if (warmup_periods < 0) throw ConfigError("warm-up period count must be >= 0");
    if (dy_scale <= 0.0) throw ConfigError("dy scale must be positive");
    if (mode == DesignMode::least_costly && !(gamma > 0.0))
        throw ConfigError("least-costly mode requires gamma > 0");
    if (!(margin > 0.0)) throw ConfigError("gamma margin must be positive");
}

namespace {

Eigen::VectorXd pack_theta(const SignalParams& theta) {
    const auto n = static_cast<Eigen::Index>(theta.size());
    Eigen::VectorXd z(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        z[i] = theta.amplitudes[static_cast<std::size_t>(i)];
        z[n + i] = theta.phases[static_cast<std::size_t>(i)];
    }
    return z;
}

SignalParams unpack_theta(const Eigen::VectorXd& z) {
    const auto n = static_cast<std::size_t>(z.size() / 2);
    SignalParams theta;
    theta.amplitudes.assign(z.data(), z.data() + n);
    theta.phases.assign(z.data() + n, z.data() + 2 * n);
    return theta;
}

Eigen::VectorXd project_box(Eigen::VectorXd z, const AmplitudeBounds& bounds) {
    const Eigen::Index n = z.size() / 2;
    for (Eigen::Index i = 0; i < n; ++i)
        z[i] = std::clamp(z[i], bounds.lo, bounds.hi);
    return z;
}

/// One simulation + GP pass per candidate; thread-safe, counts evaluations.
class DesignEvaluator {
public:
    struct Metrics {
        double v = 0.0;
        double power = 0.0;
        double cost = 0.0;
    };

    explicit DesignEvaluator(const DesignProblem& problem) : problem_(problem) {}

    Metrics evaluate(const Eigen::VectorXd& z) const {
        evaluations_.fetch_add(1, std::memory_order_relaxed);
        const SignalParams theta = unpack_theta(z);
        const Dataset data =
            simulate_dataset(problem_.model, theta, problem_.signal, problem_.x0,
                             problem_.warmup_periods, problem_.dy_scale);
        Metrics m;
        m.v = v_cost(data.features, problem_.anchors, problem_.gp);
        const auto u = multisine_sequence(theta, problem_.signal, problem_.signal.n_samples);
        m.power = signal_power(u);
        m.cost = problem_.cost_kind == ExperimentCost::power ? m.power : signal_max_abs(u);
        return m;
    }

    long evaluations() const { return evaluations_.load(std::memory_order_relaxed); }

private:
    const DesignProblem& problem_;
    mutable std::atomic<long> evaluations_{0};
};

enum class StopReason { window, small_step, iteration_cap, stagnation, budget };

struct InnerResult {
    Eigen::VectorXd z;
    double f = 0.0;
    int iterations = 0;
    bool made_progress = false;
    StopReason reason = StopReason::iteration_cap;
    double start_grad_norm = 0.0;
};

/// Box-projected BFGS descent with backtracking line search. Deterministic:
/// no randomness, fixed evaluation order, fixed summation trees.
InnerResult minimize_inner(const std::function<double(const Eigen::VectorXd&)>& objective,
                           Eigen::VectorXd z, const SolverConfig& cfg,
                           const AmplitudeBounds& bounds,
                           const std::function<long()>& evals_used) {
    const Eigen::Index n = z.size();
    InnerResult result;
    z = project_box(std::move(z), bounds);
    double f = objective(z);
    if (!std::isfinite(f))
        throw NumericError("design objective is not finite at the starting point");

    Eigen::MatrixXd hessian_inv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd grad(n), grad_prev, step_prev;
    bool pending_update = false;
    double trust = 1.0;
    int consecutive_rejections = 0;
    std::deque<double> window{f};

    for (int iter = 0; iter < cfg.max_inner_iterations; ++iter) {
        if (evals_used() + 2 * n > cfg.max_evaluations) {
            result.reason = StopReason::budget;
            break;
        }
        grad = fd_gradient(objective, z, cfg.fd_step, cfg.gradient_threads);
        if (iter == 0) result.start_grad_norm = grad.lpNorm<Eigen::Infinity>();

        if (pending_update) {
            const Eigen::VectorXd y = grad - grad_prev;
            const double sy = step_prev.dot(y);
            if (sy > 1e-12 * step_prev.norm() * y.norm()) {
                const double rho = 1.0 / sy;
                const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
                hessian_inv = (identity - rho * step_prev * y.transpose()) * hessian_inv *
                                  (identity - rho * y * step_prev.transpose()) +
                              rho * step_prev * step_prev.transpose();
            }
            pending_update = false;
        }

        Eigen::VectorXd direction = -(hessian_inv * grad);
        if (!direction.allFinite() || direction.dot(grad) >= 0.0) {
            hessian_inv.setIdentity();
            direction = -grad;
        }

        bool accepted = false;
        double alpha = trust;
        for (int trial = 0; trial < cfg.max_line_search_trials; ++trial) {
            if (evals_used() >= cfg.max_evaluations) {
                result.reason = StopReason::budget;
                break;
            }
            const Eigen::VectorXd z_trial = project_box(z + alpha * direction, bounds);
            const Eigen::VectorXd step = z_trial - z;
            const double step_norm = step.norm();
            if (step_norm <= 1e-16 * std::max(1.0, z.norm())) {
                alpha *= 0.5;
                continue;
            }
            const double slope = grad.dot(step);
            const double f_trial = objective(z_trial);
            const bool sufficient =
                slope < 0.0 ? std::isfinite(f_trial) && f_trial <= f + 1e-4 * slope
                            : std::isfinite(f_trial) && f_trial < f - 1e-16 * std::abs(f);
            if (sufficient) {
                step_prev = step;
                grad_prev = grad;
                pending_update = true;
                z = z_trial;
                f = f_trial;
                accepted = true;
                result.made_progress = true;
                trust = std::min(1.0, alpha * 2.0);
                consecutive_rejections = 0;
                break;
            }
            alpha *= 0.5;
        }
        if (result.reason == StopReason::budget) break;
        ++result.iterations;

        if (!accepted) {
            ++consecutive_rejections;
            trust *= 0.5;
            hessian_inv.setIdentity();
            if (consecutive_rejections >= cfg.max_line_search_rejections) {
                result.reason = StopReason::stagnation;
                break;
            }
            continue;
        }

        window.push_back(f);
        if (static_cast<int>(window.size()) > cfg.cost_tol_window + 1) window.pop_front();
        if (static_cast<int>(window.size()) == cfg.cost_tol_window + 1) {
            const double drop = window.front() - window.back();
            if (drop < cfg.cost_rel_tol * std::max(std::abs(window.front()), 1e-30)) {
                result.reason = StopReason::window;
                break;
            }
        }
        if (step_prev.norm() <= cfg.step_tol * std::max(1.0, z.norm())) {
            result.reason = StopReason::small_step;
            break;
        }
    }

    result.z = std::move(z);
    result.f = f;
    return result;
}

double covering_radius_of(const Dataset& data, const DesignProblem& problem) {
    return covering_radius(data.features, problem.region, problem.eval_counts).radius;
}

} // namespace

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& theta, double h, unsigned threads) {
    if (h <= 0.0) throw ConfigError("finite-difference step must be positive");
    const Eigen::Index n = theta.size();
    std::vector<double> forward(static_cast<std::size_t>(n));
    std::vector<double> backward(static_cast<std::size_t>(n));

    parallel_for(
        static_cast<std::size_t>(2 * n),
        [&](std::size_t task) {
            const auto i = static_cast<Eigen::Index>(task / 2);
            const bool up = task % 2 == 0;
            const double delta = h * std::max(1.0, std::abs(theta[i]));
            Eigen::VectorXd point = theta;
            point[i] += up ? delta : -delta;
            const double value = objective(point);
            (up ? forward : backward)[static_cast<std::size_t>(i)] = value;
        },
        threads);

    Eigen::VectorXd grad(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double fp = forward[static_cast<std::size_t>(i)];
        const double fm = backward[static_cast<std::size_t>(i)];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericError("non-finite objective at perturbation of coordinate " +
                               std::to_string(i));
        const double delta = h * std::max(1.0, std::abs(theta[i]));
        grad[i] = (fp - fm) / (2.0 * delta);
    }
    return grad;
}

DesignEvaluation evaluate_design(const SignalParams& theta, const DesignProblem& problem) {
    problem.validate();
    theta.validate(problem.signal);
    DesignEvaluation eval;
    eval.dataset = simulate_dataset(problem.model, theta, problem.signal, problem.x0,
                                    problem.warmup_periods, problem.dy_scale);
    eval.v_cost = v_cost(eval.dataset.features, problem.anchors, problem.gp);
    eval.power =
        signal_power(multisine_sequence(theta, problem.signal, problem.signal.n_samples));
    return eval;
}

DesignOutcome solve_classical(const DesignProblem& problem) {
    problem.validate();
    if (problem.mode != DesignMode::classical)
        throw ConfigError("solve_classical requires a classical-mode problem");

    DesignEvaluator evaluator(problem);
    const auto objective = [&](const Eigen::VectorXd& z) { return evaluator.evaluate(z).v; };
    const Eigen::VectorXd z0 = project_box(pack_theta(problem.theta0), problem.bounds);

    const InnerResult inner =
        minimize_inner(objective, z0, problem.solver, problem.bounds,
                       [&] { return evaluator.evaluations(); });

    DesignOutcome outcome;
    outcome.theta = unpack_theta(inner.z);
    const DesignEvaluation final_eval = evaluate_design(outcome.theta, problem);
    outcome.v_cost = final_eval.v_cost;
    outcome.power = final_eval.power;
    outcome.covering_radius = covering_radius_of(final_eval.dataset, problem);
    outcome.iterations = inner.iterations;
    outcome.evaluations = evaluator.evaluations();
    // A stationary start counts as converged; a failed descent does not.
    const double stationary_tol = 1e-5 * std::max(1.0, std::abs(inner.f));
    outcome.converged = inner.reason != StopReason::budget &&
                        (inner.made_progress || inner.start_grad_norm <= stationary_tol);
    outcome.constraint_violation = 0.0;
    return outcome;
}

double compute_gamma(const DesignOutcome& classical_outcome, double margin) {
    if (!classical_outcome.converged)
        throw ConfigError("gamma requires a converged classical outcome");
    if (margin < 0.0) throw ConfigError("gamma margin must be non-negative");
    return (1.0 + margin) * classical_outcome.v_cost;
}

DesignOutcome solve_least_costly(const DesignProblem& problem) {
    problem.validate();
    if (problem.mode != DesignMode::least_costly)
        throw ConfigError("solve_least_costly requires a least-costly-mode problem");
    const double gamma = problem.gamma;
    const SolverConfig& cfg = problem.solver;

    DesignEvaluator evaluator(problem);
    const auto evals_used = [&] { return evaluator.evaluations(); };

    Eigen::VectorXd z = project_box(pack_theta(problem.theta0), problem.bounds);
    const DesignEvaluator::Metrics start = evaluator.evaluate(z);
    if (start.v > gamma * (1.0 + cfg.constraint_rel_tol))
        throw ConfigError("least-costly start is infeasible: V-cost exceeds gamma");
    const double cost_ref = std::max(start.cost, 1e-12);

    double lambda = 0.0;
    double mu = cfg.penalty_initial;
    const auto augmented = [&](const Eigen::VectorXd& candidate) {
        const auto m = evaluator.evaluate(candidate);
        const double violation = m.v / gamma - 1.0;
        const double shifted = std::max(0.0, lambda + mu * violation);
        return m.cost / cost_ref + (shifted * shifted - lambda * lambda) / (2.0 * mu);
    };

    struct Incumbent {
        Eigen::VectorXd z;
        double cost;
    } best{z, start.cost};

    int iterations_total = 0;
    bool budget_exceeded = false;
    bool stall_stop = false;
    bool last_feasible = true;
    double prev_violation = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
        const InnerResult inner = minimize_inner(augmented, z, cfg, problem.bounds, evals_used);
        iterations_total += inner.iterations;
        z = inner.z;

        const DesignEvaluator::Metrics m = evaluator.evaluate(z);
        const double violation = m.v / gamma - 1.0;
        last_feasible = violation <= cfg.constraint_rel_tol;

        bool improved = false;
        if (last_feasible && m.cost < best.cost) {
            best = {z, m.cost};
            improved = true;
        }
        if (inner.reason == StopReason::budget) {
            budget_exceeded = true;
            break;
        }

        if (!cfg.penalty_only) lambda = std::max(0.0, lambda + mu * violation);
        const double positive_violation = std::max(0.0, violation);
        if (positive_violation > cfg.constraint_rel_tol &&
            positive_violation > 0.25 * prev_violation)
            mu = std::min(mu * cfg.penalty_growth, cfg.penalty_max);
        prev_violation = std::max(positive_violation, cfg.constraint_rel_tol);

        if (last_feasible && !improved) {
            if (++stall >= 2) {
                stall_stop = true;
                break;
            }
        } else {
            stall = 0;
        }
    }

    DesignOutcome outcome;
    outcome.theta = unpack_theta(best.z);
    const DesignEvaluation final_eval = evaluate_design(outcome.theta, problem);
    outcome.v_cost = final_eval.v_cost;
    outcome.power = final_eval.power;
    outcome.covering_radius = covering_radius_of(final_eval.dataset, problem);
    outcome.gamma = gamma;
    outcome.iterations = iterations_total;
    outcome.evaluations = evaluator.evaluations();
    outcome.constraint_violation = std::max(0.0, final_eval.v_cost / gamma - 1.0);
    outcome.converged = !budget_exceeded && (stall_stop || last_feasible);
    return outcome;
}

} // namespace lcsf
