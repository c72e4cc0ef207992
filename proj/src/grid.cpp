#include "toadwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toadwave {

TraitGrid::TraitGrid(double theta_min, double theta_max, std::size_t n_nodes)
    : theta_min_(theta_min), theta_max_(theta_max) {
    if (!(theta_min > 0.0))
        throw std::invalid_argument("trait grid: theta_min must be positive");
    if (!(theta_max > theta_min))
        throw std::invalid_argument("trait grid: theta_max must exceed theta_min");
    if (n_nodes < 3)
        throw std::invalid_argument("trait grid: need at least 3 nodes");
    h_ = (theta_max - theta_min) / static_cast<double>(n_nodes - 1);
    nodes_.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        nodes_[i] = theta_min + h_ * static_cast<double>(i);
    nodes_.front() = theta_min;
    nodes_.back() = theta_max;
    weights_.assign(n_nodes, h_);
    weights_.front() = 0.5 * h_;
    weights_.back() = 0.5 * h_;
}

TraitGrid make_trait_grid(double theta_min, double theta_max, std::size_t n_nodes) {
    return TraitGrid(theta_min, theta_max, n_nodes);
}

double integrate_trait(std::span<const double> f, const TraitGrid& grid) {
    if (f.size() != grid.size())
        throw std::invalid_argument("integrate_trait: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += grid.weight(i) * f[i];
    return acc;
}

std::vector<double> second_derivative_neumann(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3)
        throw std::invalid_argument("second_derivative_neumann: need at least 3 entries");
    if (!(h > 0.0))
        throw std::invalid_argument("second_derivative_neumann: spacing must be positive");
    const double ih2 = 1.0 / (h * h);
    std::vector<double> d(n);
    d[0] = 2.0 * (f[1] - f[0]) * ih2;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * ih2;
    d[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * ih2;
    return d;
}

SlabGrid::SlabGrid(double half_width, std::size_t n_xi, TraitGrid trait)
    : a_(half_width), trait_(std::move(trait)) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("slab grid: half width must be positive");
    if (n_xi < 3)
        throw std::invalid_argument("slab grid: need at least 3 xi nodes");
    if (n_xi % 2 == 0)
        throw std::invalid_argument("slab grid: n_xi must be odd so xi = 0 is a node");
    h_xi_ = 2.0 * a_ / static_cast<double>(n_xi - 1);
    xi_.resize(n_xi);
    for (std::size_t i = 0; i < n_xi; ++i)
        xi_[i] = -a_ + h_xi_ * static_cast<double>(i);
    xi_[(n_xi - 1) / 2] = 0.0;
    xi_.front() = -a_;
    xi_.back() = a_;
}

double Array2D::min() const {
    return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double Array2D::max() const {
    return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

bool Array2D::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

std::vector<double> trait_marginal(const Array2D& mu, const TraitGrid& trait) {
    if (mu.cols() != trait.size())
        throw std::invalid_argument("trait_marginal: column count does not match trait grid");
    std::vector<double> nu(mu.rows());
    for (std::size_t i = 0; i < mu.rows(); ++i)
        nu[i] = integrate_trait(mu.row(i), trait);
    return nu;
}

} // namespace toadwave
