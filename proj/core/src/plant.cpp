#include "lcsf/plant.hpp"

#include "lcsf/errors.hpp"

#include <cmath>

namespace lcsf {

void MsdParams::validate() const {
    if (m <= 0.0 || s <= 0.0 || c <= 0.0 || l <= 0.0 || a <= 0.0)
        throw ConfigError("mass-spring-damper parameters must be positive");
    if (a <= l)
        throw ConfigError("geometry constant a must exceed the compressed length l");
}

std::string IoModel::kind_name() const {
    return kind == Kind::nonlinear_msd ? "nonlinear_msd" : "linear_approx";
}

State msd_derivative(const State& state, double force, const MsdParams& params) {
    const double x1 = state[0];
    const double x2 = state[1];
    const double root = std::sqrt(x1 * x1 + params.a * params.a);
    const double spring = params.s * (x1 / root) * (root - params.l);
    return State(x2, (force - spring - params.c * x2) / params.m);
}

LinearModel linearize_msd(const MsdParams& params) {
    return linearize_msd_at(params, 0.0);
}

LinearModel linearize_msd_at(const MsdParams& params, double x1_point) {
    params.validate();
    // d/dx1 of the spring force: s * (1 - l a^2 / (x1^2 + a^2)^(3/2)).
    const double a2 = params.a * params.a;
    const double q = x1_point * x1_point + a2;
    const double k_lin = params.s * (1.0 - params.l * a2 / (q * std::sqrt(q)));
    LinearModel lin;
    lin.A << 0.0, 1.0, -k_lin / params.m, -params.c / params.m;
    lin.B << 0.0, 1.0 / params.m;
    return lin;
}

namespace {

inline State model_derivative(const IoModel& model, const State& x, double force) {
    if (model.kind == IoModel::Kind::nonlinear_msd)
        return msd_derivative(x, force, model.msd);
    return model.linear.A * x + model.linear.B * force;
}

} // namespace

std::vector<State> integrate_rk4(const IoModel& model, const State& x0,
                                 const std::vector<double>& u, double dt) {
    if (dt <= 0.0) throw ConfigError("integration step must be positive");
    std::vector<State> trajectory(u.size() + 1);
    trajectory[0] = x0;
    State x = x0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double f = u[k];
        const State k1 = model_derivative(model, x, f);
        const State k2 = model_derivative(model, x + 0.5 * dt * k1, f);
        const State k3 = model_derivative(model, x + 0.5 * dt * k2, f);
        const State k4 = model_derivative(model, x + dt * k3, f);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite())
            throw NumericError("simulation diverged at step " + std::to_string(k + 1));
        trajectory[k + 1] = x;
    }
    return trajectory;
}

std::vector<double> simulate_output(const IoModel& model, const State& x0,
                                    const std::vector<double>& u) {
    const auto trajectory = integrate_rk4(model, x0, u, model.dt());
    std::vector<double> y(trajectory.size());
    for (std::size_t k = 0; k < trajectory.size(); ++k) y[k] = trajectory[k][0];
    return y;
}

namespace {

Dataset assemble_rows(const std::vector<double>& y, std::size_t first_output,
                      std::size_t n_rows, double dy_scale, double rest_position) {
    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(n_rows), 2);
    data.outputs.resize(static_cast<Eigen::Index>(n_rows));
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::size_t k = first_output + r;  // output index y(k)
        const double y_prev = y[k - 1];
        // Leading rows without two past samples assume the system at rest.
        const double y_prev2 = k >= 2 ? y[k - 2] : rest_position;
        const auto row = static_cast<Eigen::Index>(r);
        data.features(row, 0) = y_prev;
        data.features(row, 1) = dy_scale * (y_prev - y_prev2);
        data.outputs[row] = y[k];
    }
    data.provenance.dy_scale = dy_scale;
    return data;
}

} // namespace

Dataset simulate_dataset(const IoModel& model, const SignalParams& params,
                         const MultisineConfig& config, const State& x0,
                         int warmup_periods, double dy_scale) {
    if (warmup_periods < 0) throw ConfigError("warm-up period count must be >= 0");
    const std::size_t period = config.n_samples;
    const std::size_t total = period * static_cast<std::size_t>(warmup_periods + 1);
    const auto u = multisine_sequence(params, config, total);
    const auto y = simulate_output(model, x0, u);  // y(0..total)

    const std::size_t first_output = static_cast<std::size_t>(warmup_periods) * period + 1;
    Dataset data = assemble_rows(y, first_output, period, dy_scale, x0[0]);
    data.provenance.model_kind = model.kind_name();
    data.provenance.warmup_periods = warmup_periods;
    return data;
}

Dataset dataset_from_signal(const IoModel& model, const State& x0,
                            const std::vector<double>& u, double dy_scale) {
    if (u.empty()) throw ConfigError("dataset requires a non-empty input sequence");
    const auto y = simulate_output(model, x0, u);
    Dataset data = assemble_rows(y, 1, u.size(), dy_scale, x0[0]);
    data.provenance.model_kind = model.kind_name();
    return data;
}

} // namespace lcsf
