#pragma once

#include "lcsf/gp.hpp"
#include "lcsf/plant.hpp"
#include "lcsf/signals.hpp"
#include "lcsf/spacefill.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace lcsf {

/// Numerical-solver knobs shared by both design modes.
struct SolverConfig {
    double fd_step = 1e-4;            // relative central-difference step
    double cost_rel_tol = 1e-6;       // relative decrease over the window
    int cost_tol_window = 5;
    double step_tol = 1e-8;
    int max_inner_iterations = 200;
    int max_outer_iterations = 10;    // augmented-Lagrangian updates
    double constraint_rel_tol = 1e-4; // accepted relative constraint slack
    double penalty_initial = 10.0;
    double penalty_growth = 10.0;
    double penalty_max = 1e8;
    long max_evaluations = 50000;     // objective-evaluation budget per solve
    int max_line_search_rejections = 10;
    int max_line_search_trials = 30;
    bool penalty_only = false;        // disable multiplier updates
    unsigned gradient_threads = 0;    // 0 = hardware concurrency

    void validate() const;
};

enum class DesignMode { classical, least_costly };

/// Experiment-cost functional of the input signal over one period.
enum class ExperimentCost { power, max_abs };

/// Everything a design solve needs: the simulation model, the signal class,
/// the GP surrogate and the coverage discretization.
struct DesignProblem {
    IoModel model;
    MultisineConfig signal;
    GpConfig gp;
    AnchorGrid anchors;
    RegionOfInterest region;          // for covering-radius reporting
    std::vector<int> eval_counts{101, 101};
    SignalParams theta0;
    State x0 = State::Zero();
    DesignMode mode = DesignMode::classical;
    double gamma = 0.0;               // V-cost threshold (least_costly)
    double margin = 0.05;             // relative slack applied to gamma_0
    AmplitudeBounds bounds;
    ExperimentCost cost_kind = ExperimentCost::power;
    int warmup_periods = 2;
    double dy_scale = 100.0;
    SolverConfig solver;

    void validate() const;
};

struct DesignEvaluation {
    double v_cost = 0.0;
    double power = 0.0;
    Dataset dataset;
};

struct DesignOutcome {
    SignalParams theta;
    double v_cost = 0.0;
    double power = 0.0;
    double covering_radius = 0.0;
    double gamma = 0.0;               // least-costly threshold in effect, 0 otherwise
    int iterations = 0;
    long evaluations = 0;
    bool converged = false;
    double constraint_violation = 0.0; // max(0, v_cost/gamma - 1)
};

/// Central finite-difference gradient with per-coordinate step
/// h * max(1, |theta_i|). Perturbed evaluations run in parallel; each result
/// lands in its own slot so the gradient is scheduling-independent.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& theta, double h,
                            unsigned threads = 0);

/// Simulates the model under the multisine, assembles the dataset and returns
/// (V-cost, power, dataset). Deterministic in theta.
DesignEvaluation evaluate_design(const SignalParams& theta, const DesignProblem& problem);

/// Classical space-filling design: quasi-Newton descent of the V-cost over the
/// box-bounded parameter set.
DesignOutcome solve_classical(const DesignProblem& problem);

/// Feasibility threshold gamma = (1 + margin) * gamma_0 from a converged
/// classical solve.
double compute_gamma(const DesignOutcome& classical_outcome, double margin);

/// Least-costly design: minimizes the experiment cost subject to
/// V-cost <= gamma via an augmented-Lagrangian outer loop around the same
/// quasi-Newton inner solver. Requires a feasible starting point.
DesignOutcome solve_least_costly(const DesignProblem& problem);

} // namespace lcsf
