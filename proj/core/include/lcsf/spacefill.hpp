#pragma once

#include <Eigen/Dense>

#include <vector>

namespace lcsf {

/// Axis-aligned rectangular region of the feature space where coverage is
/// required. Default: y in [-0.1, 0.1], dy in [-0.8, 0.8].
struct RegionOfInterest {
    Eigen::VectorXd lower = (Eigen::VectorXd(2) << -0.1, -0.8).finished();
    Eigen::VectorXd upper = (Eigen::VectorXd(2) << 0.1, 0.8).finished();

    Eigen::Index dim() const { return lower.size(); }
    void validate() const;
    bool contains(const Eigen::VectorXd& point) const;
};

/// Finite discretization of the region of interest: the points where the
/// posterior variance is averaged.
struct AnchorGrid {
    Eigen::MatrixXd points;   // M x d
    std::vector<int> counts;  // per-dimension counts

    Eigen::Index size() const { return points.rows(); }
};

/// Cartesian product of per-dimension equally spaced points including both
/// endpoints; spacing_i = width_i / (counts_i - 1). Requires counts >= 2.
AnchorGrid build_anchor_grid(const RegionOfInterest& region,
                             const std::vector<int>& counts);

/// Radius of the largest data-free ball centered in the region, together with
/// the maximizing center.
struct CoveringRadius {
    double radius = 0.0;
    Eigen::VectorXd center;
};

/// Discretizes the max over the region on a dense rectangular evaluation grid
/// (eval_counts per dimension) and scans min-Euclidean-distance-to-data.
CoveringRadius covering_radius(const Eigen::MatrixXd& data, const RegionOfInterest& region,
                               const std::vector<int>& eval_counts);

} // namespace lcsf
