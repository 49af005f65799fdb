#include "lcsf/spacefill.hpp"

#include "lcsf/errors.hpp"

#include <cmath>
#include <limits>

namespace lcsf {

void RegionOfInterest::validate() const {
    if (lower.size() != upper.size() || lower.size() == 0)
        throw ConfigError("region bounds must be non-empty and of equal dimension");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw ConfigError("region lower bound must be below upper bound");
}

bool RegionOfInterest::contains(const Eigen::VectorXd& point) const {
    if (point.size() != dim()) return false;
    for (Eigen::Index i = 0; i < dim(); ++i)
        if (point[i] < lower[i] || point[i] > upper[i]) return false;
    return true;
}

AnchorGrid build_anchor_grid(const RegionOfInterest& region,
                             const std::vector<int>& counts) {
    region.validate();
    if (static_cast<Eigen::Index>(counts.size()) != region.dim())
        throw ConfigError("anchor counts must match the region dimension");
    Eigen::Index total = 1;
    for (int c : counts) {
        if (c < 2) throw ConfigError("anchor grid needs at least 2 points per dimension");
        total *= c;
    }

    const Eigen::Index d = region.dim();
    AnchorGrid grid;
    grid.counts = counts;
    grid.points.resize(total, d);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Eigen::Index rest = idx;
        for (Eigen::Index j = 0; j < d; ++j) {
            const int c = counts[static_cast<std::size_t>(j)];
            const Eigen::Index pos = rest % c;
            rest /= c;
            const double step = (region.upper[j] - region.lower[j]) / (c - 1);
            grid.points(idx, j) = region.lower[j] + static_cast<double>(pos) * step;
        }
    }
    return grid;
}

CoveringRadius covering_radius(const Eigen::MatrixXd& data, const RegionOfInterest& region,
                               const std::vector<int>& eval_counts) {
    region.validate();
    if (data.rows() == 0) throw ConfigError("covering radius of an empty dataset");
    if (data.cols() != region.dim())
        throw ConfigError("dataset dimension does not match the region");
    if (static_cast<Eigen::Index>(eval_counts.size()) != region.dim())
        throw ConfigError("evaluation counts must match the region dimension");

    Eigen::Index total = 1;
    for (int c : eval_counts) {
        if (c < 2) throw ConfigError("evaluation grid needs at least 2 points per dimension");
        total *= c;
    }

    const Eigen::Index d = region.dim();
    const Eigen::Index n = data.rows();
    Eigen::VectorXd point(d);
    CoveringRadius result;
    result.center = Eigen::VectorXd::Zero(d);
    double best_sq = -1.0;
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Eigen::Index rest = idx;
        for (Eigen::Index j = 0; j < d; ++j) {
            const int c = eval_counts[static_cast<std::size_t>(j)];
            const Eigen::Index pos = rest % c;
            rest /= c;
            const double step = (region.upper[j] - region.lower[j]) / (c - 1);
            point[j] = region.lower[j] + static_cast<double>(pos) * step;
        }
        double min_sq = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < n; ++r) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                const double diff = point[j] - data(r, j);
                acc += diff * diff;
            }
            if (acc < min_sq) min_sq = acc;
        }
        if (min_sq > best_sq) {
            best_sq = min_sq;
            result.center = point;
        }
    }
    result.radius = std::sqrt(best_sq);
    return result;
}

} // namespace lcsf
