#pragma once

#include "lcsf/signals.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace lcsf {

/// Mass-spring-damper with a geometrically nonlinear spring. The spring force
/// is s * x1 / sqrt(x1^2 + a^2) * (sqrt(x1^2 + a^2) - l), smooth everywhere
/// because a > 0.
struct MsdParams {
    double m = 5.0;    // kg
    double s = 800.0;  // N/m
    double c = 10.0;   // N s/m
    double l = 0.17;   // m, compressed length
    double a = 0.25;   // m, tensionless geometry constant

    void validate() const;
};

/// Continuous-time linear model dx = A x + B u, y = x1.
struct LinearModel {
    Eigen::Matrix2d A;
    Eigen::Vector2d B;
};

/// Simulation model in input-output form: either the nonlinear benchmark or a
/// linear approximation of it. Both integrate with the same fixed-step RK4.
struct IoModel {
    enum class Kind { nonlinear_msd, linear_approx };

    Kind kind = Kind::nonlinear_msd;
    MsdParams msd;
    LinearModel linear{};  // used when kind == linear_approx
    double f_s = 100.0;

    double dt() const { return 1.0 / f_s; }
    std::string kind_name() const;
};

using State = Eigen::Vector2d;

/// Time derivative of (position, velocity) under force F.
State msd_derivative(const State& state, double force, const MsdParams& params);

/// Jacobian linearization at the unforced equilibrium:
/// A = [[0, 1], [-k_lin/m, -c/m]], B = [0; 1/m] with k_lin = s (a - l) / a.
LinearModel linearize_msd(const MsdParams& params);

/// Linearization with the spring slope evaluated at position x1_point; used to
/// vary the design model across Monte Carlo realizations.
LinearModel linearize_msd_at(const MsdParams& params, double x1_point);

/// Classical fixed-step RK4 with the input held zero-order over each step.
/// Returns states at samples 0..u.size(); throws NumericError naming the step
/// index if the state leaves the finite range.
std::vector<State> integrate_rk4(const IoModel& model, const State& x0,
                                 const std::vector<double>& u, double dt);

/// Position samples y(k) = x1(k) for k = 0..u.size().
std::vector<double> simulate_output(const IoModel& model, const State& x0,
                                    const std::vector<double>& u);

/// Feature/output pairs of one signal period: row k holds features
/// (y(k-1), dy(k-1)) and output y(k), where dy(k) = dy_scale * (y(k) - y(k-1)).
/// With dy_scale = f_s the second feature is the first-difference velocity.
struct Dataset {
    Eigen::MatrixX2d features;
    Eigen::VectorXd outputs;

    struct Provenance {
        std::string model_kind;
        std::uint64_t seed = 0;
        int warmup_periods = 0;
        double dy_scale = 1.0;
    } provenance;

    Eigen::Index size() const { return outputs.size(); }
};

/// Simulates (warmup_periods + 1) periods of the multisine from x0, discards
/// the warm-up and assembles one period of feature/output rows.
Dataset simulate_dataset(const IoModel& model, const SignalParams& params,
                         const MultisineConfig& config, const State& x0,
                         int warmup_periods, double dy_scale);

/// Dataset from an arbitrary input sequence (no periodicity assumed); rows
/// cover y(1)..y(n). Used for test sets and identification data.
Dataset dataset_from_signal(const IoModel& model, const State& x0,
                            const std::vector<double>& u, double dy_scale);

} // namespace lcsf
