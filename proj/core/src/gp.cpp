#include "lcsf/gp.hpp"

#include "lcsf/errors.hpp"

#include <cmath>
#include <cstring>

namespace lcsf {

void GpConfig::validate() const {
    if (sigma_f2 <= 0.0) throw ConfigError("kernel variance sigma_f2 must be positive");
    if (lambda_diag.empty()) throw ConfigError("kernel width diagonal is empty");
    for (double d : lambda_diag)
        if (d <= 0.0) throw ConfigError("kernel width entries must be positive");
    if (sigma_eps2 < 0.0) throw ConfigError("noise variance must be non-negative");
    if (jitter_initial_rel <= 0.0 || jitter_max_rel < jitter_initial_rel)
        throw ConfigError("jitter policy requires 0 < initial <= max");
}

double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const GpConfig& config) {
    if (x.size() != x_prime.size() || x.size() != config.dim())
        throw ConfigError("kernel arguments do not match the configured dimension");
    double quad = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double diff = x[i] - x_prime[i];
        quad += diff * diff / config.lambda_diag[static_cast<std::size_t>(i)];
    }
    return config.sigma_f2 * std::exp(-0.5 * quad);
}

std::uint64_t feature_hash(const Eigen::MatrixXd& features) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto mix_u64 = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001B3ull;
    };
    mix_u64(static_cast<std::uint64_t>(features.rows()));
    mix_u64(static_cast<std::uint64_t>(features.cols()));
    const double* data = features.data();
    const Eigen::Index n = features.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, data + i, sizeof(bits));
        mix_u64(bits);
    }
    return h;
}

namespace {

/// Dense kernel matrix between row sets A (n x d) and B (m x d).
Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const GpConfig& config) {
    const Eigen::Index d = config.dim();
    Eigen::MatrixXd as = a;
    Eigen::MatrixXd bs = b;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double inv = 1.0 / std::sqrt(config.lambda_diag[static_cast<std::size_t>(j)]);
        as.col(j) *= inv;
        bs.col(j) *= inv;
    }
    const Eigen::VectorXd an = as.rowwise().squaredNorm();
    const Eigen::VectorXd bn = bs.rowwise().squaredNorm();
    Eigen::MatrixXd quad = -2.0 * (as * bs.transpose());
    quad.colwise() += an;
    quad.rowwise() += bn.transpose();
    return config.sigma_f2 * (-0.5 * quad.array()).max(-745.0).exp().matrix();
}

void check_features(const Eigen::MatrixXd& features, const GpConfig& config) {
    if (features.cols() != config.dim())
        throw ConfigError("feature dimension does not match the kernel configuration");
    if (!features.allFinite()) throw ConfigError("non-finite feature entries");
}

void check_factor(const Eigen::MatrixXd& features, const GramFactor& factor) {
    if (factor.n != features.rows() || factor.source_hash != feature_hash(features))
        throw ConfigError("stale Gram factor: features changed since factorization");
}

} // namespace

GramFactor gram_factorize(const Eigen::MatrixXd& features, const GpConfig& config) {
    config.validate();
    check_features(features, config);
    if (features.rows() < 1) throw ConfigError("Gram factorization needs at least one row");

    const Eigen::MatrixXd gram = kernel_cross(features, features, config);
    GramFactor factor;
    factor.n = features.rows();
    factor.source_hash = feature_hash(features);

    double jitter = config.jitter_initial_rel * config.sigma_f2;
    const double jitter_max = config.jitter_max_rel * config.sigma_f2;
    while (true) {
        Eigen::MatrixXd regularized = gram;
        regularized.diagonal().array() += config.sigma_eps2 + jitter;
        factor.llt.compute(regularized);
        if (factor.llt.info() == Eigen::Success) {
            factor.jitter_used = jitter;
            return factor;
        }
        if (jitter >= jitter_max)
            throw NumericError("Gram factorization failed after jitter escalation");
        jitter *= 10.0;
    }
}

double posterior_variance(const Eigen::VectorXd& x_star, const Eigen::MatrixXd& features,
                          const GramFactor& factor, const GpConfig& config) {
    if (features.rows() == 0) return config.sigma_f2;
    check_features(features, config);
    check_factor(features, factor);
    if (x_star.size() != config.dim())
        throw ConfigError("query dimension does not match the kernel configuration");

    Eigen::VectorXd k_star = kernel_cross(features, x_star.transpose(), config).col(0);
    factor.llt.matrixL().solveInPlace(k_star);
    const double variance = config.sigma_f2 - k_star.squaredNorm();
    return std::max(0.0, std::min(variance, config.sigma_f2));
}

Eigen::VectorXd posterior_variance_batch(const Eigen::MatrixXd& queries,
                                         const Eigen::MatrixXd& features,
                                         const GramFactor& factor, const GpConfig& config) {
    if (features.rows() == 0)
        return Eigen::VectorXd::Constant(queries.rows(), config.sigma_f2);
    check_features(features, config);
    check_factor(features, factor);
    if (queries.cols() != config.dim())
        throw ConfigError("query dimension does not match the kernel configuration");

    Eigen::MatrixXd k_star = kernel_cross(features, queries, config);  // n x m
    factor.llt.matrixL().solveInPlace(k_star);
    Eigen::VectorXd variance =
        (config.sigma_f2 - k_star.colwise().squaredNorm().array()).matrix();
    return variance.cwiseMax(0.0).cwiseMin(config.sigma_f2);
}

double posterior_mean(const Eigen::VectorXd& x_star, const Eigen::MatrixXd& features,
                      const Eigen::VectorXd& outputs, const GramFactor& factor,
                      const GpConfig& config) {
    if (features.rows() == 0) return 0.0;  // zero prior mean
    check_features(features, config);
    check_factor(features, factor);
    if (outputs.size() != features.rows())
        throw ConfigError("output vector length does not match the feature rows");

    const Eigen::VectorXd k_star = kernel_cross(features, x_star.transpose(), config).col(0);
    const Eigen::VectorXd alpha = factor.llt.solve(outputs);
    return k_star.dot(alpha);
}

double v_cost(const Eigen::MatrixXd& features, const AnchorGrid& anchors,
              const GpConfig& config) {
    if (anchors.size() == 0) throw ConfigError("V-cost needs a non-empty anchor grid");
    if (features.rows() == 0) return config.sigma_f2;
    const GramFactor factor = gram_factorize(features, config);
    return posterior_variance_batch(anchors.points, features, factor, config).mean();
}

double v_cost(const Dataset& dataset, const AnchorGrid& anchors, const GpConfig& config) {
    return v_cost(dataset.features, anchors, config);
}

} // namespace lcsf
