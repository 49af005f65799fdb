#pragma once

#include "lcsf/plant.hpp"
#include "lcsf/spacefill.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace lcsf {

/// Squared-exponential kernel hyperparameters. lambda_diag holds the diagonal
/// of the length-scale matrix as supplied (entries enter the quadratic form
/// directly as divisors).
struct GpConfig {
    double sigma_f2 = 3.1622776601683795;  // sqrt(10)
    std::vector<double> lambda_diag{0.05, 0.40};
    double sigma_eps2 = 1.0;
    double jitter_initial_rel = 1e-10;  // relative to sigma_f2
    double jitter_max_rel = 1e-6;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(lambda_diag.size()); }
    void validate() const;
};

/// Cholesky factorization of the noise-regularized Gram matrix
/// K_N + (sigma_eps2 + jitter) I, reusable across posterior queries.
/// Queries verify that the supplied feature matrix is the factor's source.
struct GramFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter_used = 0.0;
    std::uint64_t source_hash = 0;
    Eigen::Index n = 0;
};

/// sigma_f2 * exp(-1/2 (x - x')^T Lambda^{-1} (x - x')).
double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const GpConfig& config);

/// Fingerprint used to detect stale factors (FNV-1a over the raw entries).
std::uint64_t feature_hash(const Eigen::MatrixXd& features);

/// Factorizes the regularized Gram of the feature rows. Escalates jitter by
/// factors of 10 from jitter_initial_rel*sigma_f2 up to jitter_max_rel*sigma_f2
/// before failing with a conditioning error.
GramFactor gram_factorize(const Eigen::MatrixXd& features, const GpConfig& config);

/// Posterior variance at x_star via triangular solves; clamped to [0, sigma_f2].
double posterior_variance(const Eigen::VectorXd& x_star, const Eigen::MatrixXd& features,
                          const GramFactor& factor, const GpConfig& config);

/// Posterior variance at each row of queries (one factorization, many solves).
Eigen::VectorXd posterior_variance_batch(const Eigen::MatrixXd& queries,
                                         const Eigen::MatrixXd& features,
                                         const GramFactor& factor, const GpConfig& config);

/// Posterior mean at x_star under the zero prior mean.
double posterior_mean(const Eigen::VectorXd& x_star, const Eigen::MatrixXd& features,
                      const Eigen::VectorXd& outputs, const GramFactor& factor,
                      const GpConfig& config);

/// Average posterior variance over the anchor points. An empty dataset gives
/// the prior variance sigma_f2.
double v_cost(const Eigen::MatrixXd& features, const AnchorGrid& anchors,
              const GpConfig& config);
double v_cost(const Dataset& dataset, const AnchorGrid& anchors, const GpConfig& config);

} // namespace lcsf
