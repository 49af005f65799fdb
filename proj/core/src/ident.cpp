#include "lcsf/ident.hpp"

#include "lcsf/errors.hpp"
#include "lcsf/rng.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

namespace lcsf {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_architecture(const NoeModel& model) {
    if (model.m_y < 1 || model.m_u < 1 || model.hidden < 1)
        throw ConfigError("NOE architecture requires m_y, m_u, hidden >= 1");
    if (model.w_hidden.rows() != model.hidden || model.w_hidden.cols() != model.n_x() ||
        model.b_hidden.size() != model.hidden || model.w_out.size() != model.hidden)
        throw ConfigError("NOE weight shapes do not match the architecture");
    if (model.scaling.u_std <= 0.0 || model.scaling.y_std <= 0.0)
        throw ConfigError("standardization scales must be positive");
}

} // namespace

Eigen::VectorXd NoeModel::parameters() const {
    Eigen::VectorXd eta(parameter_count());
    Eigen::Index at = 0;
    for (int h = 0; h < hidden; ++h)
        for (int i = 0; i < n_x(); ++i) eta[at++] = w_hidden(h, i);
    for (int h = 0; h < hidden; ++h) eta[at++] = b_hidden[h];
    for (int h = 0; h < hidden; ++h) eta[at++] = w_out[h];
    eta[at++] = b_out;
    return eta;
}

void NoeModel::set_parameters(const Eigen::VectorXd& eta) {
    if (eta.size() != parameter_count())
        throw ConfigError("parameter vector length does not match the architecture");
    Eigen::Index at = 0;
    w_hidden.resize(hidden, n_x());
    b_hidden.resize(hidden);
    w_out.resize(hidden);
    for (int h = 0; h < hidden; ++h)
        for (int i = 0; i < n_x(); ++i) w_hidden(h, i) = eta[at++];
    for (int h = 0; h < hidden; ++h) b_hidden[h] = eta[at++];
    for (int h = 0; h < hidden; ++h) w_out[h] = eta[at++];
    b_out = eta[at++];
}

NoeModel NoeModel::zeros(int m_y, int m_u, int hidden) {
    NoeModel model;
    model.m_y = m_y;
    model.m_u = m_u;
    model.hidden = hidden;
    model.w_hidden = Eigen::MatrixXd::Zero(hidden, model.n_x());
    model.b_hidden = Eigen::VectorXd::Zero(hidden);
    model.w_out = Eigen::RowVectorXd::Zero(hidden);
    model.b_out = 0.0;
    return model;
}

NoeModel NoeModel::random_init(std::uint64_t seed, double scale, int m_y, int m_u,
                               int hidden) {
    NoeModel model = zeros(m_y, m_u, hidden);
    SplitMix64 rng(seed);
    const double hidden_range = scale / std::sqrt(static_cast<double>(model.n_x()));
    const double out_range = scale / std::sqrt(static_cast<double>(hidden));
    for (int h = 0; h < hidden; ++h)
        for (int i = 0; i < model.n_x(); ++i)
            model.w_hidden(h, i) = rng.uniform(-hidden_range, hidden_range);
    for (int h = 0; h < hidden; ++h) model.b_hidden[h] = rng.uniform(-hidden_range, hidden_range);
    for (int h = 0; h < hidden; ++h) model.w_out[h] = rng.uniform(-out_range, out_range);
    model.b_out = rng.uniform(-out_range, out_range);
    return model;
}

void TrainConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("training iteration limit must be >= 1");
    if (lambda_init <= 0.0 || lambda_increase <= 1.0 || lambda_decrease <= 1.0 ||
        lambda_max <= lambda_init)
        throw ConfigError("invalid Levenberg-Marquardt damping schedule");
    if (cost_rel_tol <= 0.0 || grad_tol <= 0.0)
        throw ConfigError("training tolerances must be positive");
    if (restarts < 1) throw ConfigError("restart count must be >= 1");
    if (init_scale <= 0.0) throw ConfigError("init scale must be positive");
}

std::vector<double> noe_simulate(const NoeModel& model, const std::vector<double>& u,
                                 const std::vector<double>& y_init) {
    check_architecture(model);
    const std::size_t first = static_cast<std::size_t>(std::max(model.m_y, model.m_u));
    if (u.size() < first + 1) throw ConfigError("input sequence too short for the lags");
    if (y_init.size() < static_cast<std::size_t>(model.m_y))
        throw ConfigError("y_init must supply m_y initial outputs");

    const auto& sc = model.scaling;
    // Standardized output history; index k holds yhat'(k).
    std::vector<double> ys(u.size(), 0.0);
    for (int k = 0; k < model.m_y; ++k)
        ys[static_cast<std::size_t>(k)] = (y_init[static_cast<std::size_t>(k)] - sc.y_mean) / sc.y_std;

    Eigen::VectorXd regressor(model.n_x());
    std::vector<double> yhat(u.size() - first);
    for (std::size_t k = first; k < u.size(); ++k) {
        for (int j = 0; j < model.m_y; ++j)
            regressor[j] = ys[k - 1 - static_cast<std::size_t>(j)];
        for (int j = 0; j < model.m_u; ++j)
            regressor[model.m_y + j] =
                (u[k - 1 - static_cast<std::size_t>(j)] - sc.u_mean) / sc.u_std;
        const Eigen::VectorXd pre = model.w_hidden * regressor + model.b_hidden;
        double out = model.b_out;
        for (int h = 0; h < model.hidden; ++h) out += model.w_out[h] * sigmoid(pre[h]);
        if (!std::isfinite(out) || std::abs(out) > 1e12)
            throw NumericError("NOE simulation diverged at sample " + std::to_string(k));
        ys[k] = out;
        yhat[k - first] = sc.y_mean + sc.y_std * out;
    }
    return yhat;
}

Eigen::MatrixXd noe_jacobian(const NoeModel& model, const std::vector<double>& u,
                             const std::vector<double>& y_init) {
    check_architecture(model);
    const std::size_t first = static_cast<std::size_t>(std::max(model.m_y, model.m_u));
    if (u.size() < first + 1) throw ConfigError("input sequence too short for the lags");
    if (y_init.size() < static_cast<std::size_t>(model.m_y))
        throw ConfigError("y_init must supply m_y initial outputs");

    const auto& sc = model.scaling;
    const int n_eta = model.parameter_count();
    const int n_x = model.n_x();
    const int hid = model.hidden;
    const auto rows = static_cast<Eigen::Index>(u.size() - first);

    // Standardized outputs and their parameter sensitivities per lag depth.
    std::vector<double> ys(u.size(), 0.0);
    for (int k = 0; k < model.m_y; ++k)
        ys[static_cast<std::size_t>(k)] = (y_init[static_cast<std::size_t>(k)] - sc.y_mean) / sc.y_std;
    std::vector<Eigen::VectorXd> sens(u.size(), Eigen::VectorXd::Zero(n_eta));

    Eigen::MatrixXd jacobian(rows, n_eta);
    Eigen::VectorXd regressor(n_x);
    Eigen::VectorXd act(hid), act_deriv(hid), direct(n_eta);
    for (std::size_t k = first; k < u.size(); ++k) {
        for (int j = 0; j < model.m_y; ++j)
            regressor[j] = ys[k - 1 - static_cast<std::size_t>(j)];
        for (int j = 0; j < model.m_u; ++j)
            regressor[model.m_y + j] =
                (u[k - 1 - static_cast<std::size_t>(j)] - sc.u_mean) / sc.u_std;

        const Eigen::VectorXd pre = model.w_hidden * regressor + model.b_hidden;
        double out = model.b_out;
        for (int h = 0; h < hid; ++h) {
            act[h] = sigmoid(pre[h]);
            act_deriv[h] = act[h] * (1.0 - act[h]);
            out += model.w_out[h] * act[h];
        }
        if (!std::isfinite(out) || std::abs(out) > 1e12)
            throw NumericError("NOE sensitivity recursion diverged at sample " +
                               std::to_string(k));
        ys[k] = out;

        // Direct partials in eta order: w_hidden (row-major), b_hidden, w_out, b_out.
        Eigen::Index at = 0;
        for (int h = 0; h < hid; ++h) {
            const double gate = model.w_out[h] * act_deriv[h];
            for (int i = 0; i < n_x; ++i) direct[at++] = gate * regressor[i];
        }
        for (int h = 0; h < hid; ++h) direct[at++] = model.w_out[h] * act_deriv[h];
        for (int h = 0; h < hid; ++h) direct[at++] = act[h];
        direct[at++] = 1.0;

        Eigen::VectorXd& s = sens[k];
        s = direct;
        for (int j = 0; j < model.m_y; ++j) {
            // d out / d regressor_j through the hidden layer.
            double gain = 0.0;
            for (int h = 0; h < hid; ++h)
                gain += model.w_out[h] * act_deriv[h] * model.w_hidden(h, j);
            s += gain * sens[k - 1 - static_cast<std::size_t>(j)];
        }
        jacobian.row(static_cast<Eigen::Index>(k - first)) = sc.y_std * s.transpose();
    }
    return jacobian;
}

namespace {

struct LmRun {
    NoeModel model;
    std::vector<double> trace;
    double cost = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

double simulation_cost(const NoeModel& model, const std::vector<double>& u,
                       const std::vector<double>& y, std::size_t first) {
    const auto yhat = noe_simulate(model, u, {y.begin(), y.begin() + model.m_y});
    double acc = 0.0;
    for (std::size_t k = 0; k < yhat.size(); ++k) {
        const double e = y[first + k] - yhat[k];
        acc += e * e;
    }
    return acc / static_cast<double>(yhat.size());
}

LmRun lm_fit(NoeModel model, const std::vector<double>& u, const std::vector<double>& y,
             const TrainConfig& config) {
    const std::size_t first = static_cast<std::size_t>(std::max(model.m_y, model.m_u));
    const std::vector<double> y_init(y.begin(), y.begin() + model.m_y);
    const auto n_eff = static_cast<Eigen::Index>(u.size() - first);
    const int n_eta = model.parameter_count();

    LmRun run;
    double lambda = config.lambda_init;
    double cost = simulation_cost(model, u, y, first);
    run.trace.push_back(cost);

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        ++run.iterations;
        const auto yhat = noe_simulate(model, u, y_init);
        Eigen::VectorXd residual(n_eff);
        for (Eigen::Index k = 0; k < n_eff; ++k)
            residual[k] = y[first + static_cast<std::size_t>(k)] - yhat[static_cast<std::size_t>(k)];
        const Eigen::MatrixXd jac = noe_jacobian(model, u, y_init);
        const Eigen::VectorXd gradient = jac.transpose() * residual;  // half descent direction
        if ((2.0 / static_cast<double>(n_eff)) * gradient.lpNorm<Eigen::Infinity>() <
            config.grad_tol) {
            run.converged = true;
            run.trace.push_back(cost);
            break;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;

        bool accepted = false;
        while (lambda <= config.lambda_max) {
            Eigen::MatrixXd normal = jtj;
            normal.diagonal().array() += lambda;
            const Eigen::VectorXd delta = normal.ldlt().solve(gradient);
            if (!delta.allFinite()) {
                lambda *= config.lambda_increase;
                continue;
            }
            NoeModel trial = model;
            trial.set_parameters(model.parameters() + delta);
            double trial_cost;
            try {
                trial_cost = simulation_cost(trial, u, y, first);
            } catch (const NumericError&) {
                trial_cost = std::numeric_limits<double>::infinity();
            }
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                model = std::move(trial);
                const double drop = cost - trial_cost;
                cost = trial_cost;
                lambda = std::max(lambda / config.lambda_decrease, 1e-12);
                accepted = true;
                run.trace.push_back(cost);
                if (drop < config.cost_rel_tol * std::max(cost, 1e-300)) run.converged = true;
                break;
            }
            lambda *= config.lambda_increase;
        }
        if (!accepted) {
            // Damping exhausted: stagnation exit with the best model so far.
            run.trace.push_back(cost);
            break;
        }
        if (run.converged) break;
    }

    run.model = std::move(model);
    run.cost = cost;
    return run;
}

} // namespace

TrainResult train_lm(const std::vector<double>& u, const std::vector<double>& y,
                     const TrainConfig& config, std::uint64_t seed,
                     const std::optional<NoeModel>& initial) {
    config.validate();
    if (u.size() != y.size()) throw ConfigError("input/output lengths differ");

    NoeModel prototype = initial ? *initial : NoeModel::zeros();
    const std::size_t first = static_cast<std::size_t>(std::max(prototype.m_y, prototype.m_u));
    if (u.size() < first + 2) throw ConfigError("training data too short for the lags");
    if (u.size() < 10 * static_cast<std::size_t>(prototype.parameter_count()))
        std::cerr << "train_lm: only " << u.size() << " samples for "
                  << prototype.parameter_count() << " parameters\n";

    LmRun best;
    if (initial) {
        best = lm_fit(*initial, u, y, config);
    } else {
        // Standardize channels once; the network trains on scaled data.
        const auto n = static_cast<double>(u.size());
        double u_mean = 0.0, y_mean = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            u_mean += u[k];
            y_mean += y[k];
        }
        u_mean /= n;
        y_mean /= n;
        double u_var = 0.0, y_var = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            u_var += (u[k] - u_mean) * (u[k] - u_mean);
            y_var += (y[k] - y_mean) * (y[k] - y_mean);
        }
        NoeModel::Scaling scaling;
        scaling.u_mean = u_mean;
        scaling.y_mean = y_mean;
        scaling.u_std = std::max(std::sqrt(u_var / n), 1e-12);
        scaling.y_std = std::max(std::sqrt(y_var / n), 1e-12);

        for (int restart = 0; restart < config.restarts; ++restart) {
            NoeModel init = NoeModel::random_init(
                derive_seed(seed, static_cast<std::uint64_t>(restart), "lm-init"),
                config.init_scale, prototype.m_y, prototype.m_u, prototype.hidden);
            init.scaling = scaling;
            LmRun run = lm_fit(std::move(init), u, y, config);
            if (run.cost < best.cost) best = std::move(run);
        }
    }

    TrainResult result;
    result.model = std::move(best.model);
    result.cost_trace = std::move(best.trace);
    result.final_cost = best.cost;
    result.iterations = best.iterations;
    result.converged = best.converged;
    return result;
}

double rmse(const std::vector<double>& reference, const std::vector<double>& simulated) {
    if (reference.empty() || reference.size() != simulated.size())
        throw ConfigError("RMSE requires equal nonzero lengths");
    double acc = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const double e = reference[k] - simulated[k];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(reference.size()));
}

} // namespace lcsf
