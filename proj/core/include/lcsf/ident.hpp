#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace lcsf {

/// One-hidden-layer sigmoid network in nonlinear output-error form. The
/// free-run regressor is (y(k-1), ..., y(k-m_y), u(k-1), ..., u(k-m_u)) with
/// the model's own past predictions fed back. Inputs and outputs pass through
/// the stored standardization constants, so the network itself operates on
/// zero-mean unit-variance channels.
struct NoeModel {
    int m_y = 2;
    int m_u = 1;
    int hidden = 8;
    Eigen::MatrixXd w_hidden;      // hidden x n_x
    Eigen::VectorXd b_hidden;      // hidden
    Eigen::RowVectorXd w_out;      // 1 x hidden
    double b_out = 0.0;

    struct Scaling {
        double u_mean = 0.0;
        double u_std = 1.0;
        double y_mean = 0.0;
        double y_std = 1.0;
    } scaling;

    int n_x() const { return m_y + m_u; }
    int parameter_count() const { return hidden * n_x() + hidden + hidden + 1; }

    /// eta = vec(w_hidden row-major, b_hidden, w_out, b_out).
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& eta);

    /// Zero weights, architecture allocated.
    static NoeModel zeros(int m_y = 2, int m_u = 1, int hidden = 8);

    /// Uniform init scaled by 1/sqrt(fan-in), deterministic in the seed.
    static NoeModel random_init(std::uint64_t seed, double scale = 1.0, int m_y = 2,
                                int m_u = 1, int hidden = 8);
};

struct TrainConfig {
    int max_iterations = 300;
    double lambda_init = 1e-2;
    double lambda_increase = 10.0;   // on rejected step
    double lambda_decrease = 10.0;   // on accepted step
    double lambda_max = 1e12;
    double cost_rel_tol = 1e-9;
    double grad_tol = 1e-8;
    int restarts = 3;
    double init_scale = 1.0;

    void validate() const;
};

/// Free-run simulation: feeds back its own predictions. y_init supplies the
/// first m_y measured outputs; the prediction covers k = max(m_y, m_u)
/// .. u.size()-1, so the returned sequence has u.size() - max(m_y, m_u)
/// entries.
std::vector<double> noe_simulate(const NoeModel& model, const std::vector<double>& u,
                                 const std::vector<double>& y_init);

/// Jacobian d yhat(k) / d eta of the free-run simulation, computed by the
/// forward sensitivity recursion through the fed-back predictions.
Eigen::MatrixXd noe_jacobian(const NoeModel& model, const std::vector<double>& u,
                             const std::vector<double>& y_init);

struct TrainResult {
    NoeModel model;
    std::vector<double> cost_trace;  // mean squared simulation error per iteration
    double final_cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt on the simulation error (1/N) sum (y - yhat)^2.
/// Accepted steps never increase the cost. Without an initial model,
/// `restarts` random initializations are fitted and the best kept.
TrainResult train_lm(const std::vector<double>& u, const std::vector<double>& y,
                     const TrainConfig& config, std::uint64_t seed,
                     const std::optional<NoeModel>& initial = std::nullopt);

/// sqrt((1/N) sum (y - yhat)^2); sequences must have equal nonzero length.
double rmse(const std::vector<double>& reference, const std::vector<double>& simulated);

} // namespace lcsf
