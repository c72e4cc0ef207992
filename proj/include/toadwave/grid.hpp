#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace toadwave {

/// Uniform discretization of the trait interval (theta_min, theta_max) with
/// trapezoid quadrature weights. Immutable after construction.
class TraitGrid {
public:
    TraitGrid(double theta_min, double theta_max, std::size_t n_nodes);

    double theta_min() const { return theta_min_; }
    double theta_max() const { return theta_max_; }
    double length() const { return theta_max_ - theta_min_; }
    double spacing() const { return h_; }
    std::size_t size() const { return nodes_.size(); }

    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

private:
    double theta_min_ = 0.0;
    double theta_max_ = 0.0;
    double h_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

TraitGrid make_trait_grid(double theta_min, double theta_max, std::size_t n_nodes);

/// Trapezoid quadrature over the trait grid; exact for affine integrands.
double integrate_trait(std::span<const double> f, const TraitGrid& grid);

/// Second difference with homogeneous-Neumann mirror closure: interior rows
/// are the central stencil, the endpoint rows use the ghost-node reflection
/// 2(f[1]-f[0])/h^2 (and symmetrically at the top). Together with the
/// trapezoid weights the operator is symmetric and its weighted row sums
/// vanish identically (discrete conservation through the mutation term).
std::vector<double> second_derivative_neumann(std::span<const double> f, double h);

/// Slab discretization of (-a, a) x Theta. n_xi is forced odd so xi = 0 is a
/// node (the renormalization reads nu(0) pointwise).
class SlabGrid {
public:
    SlabGrid(double half_width, std::size_t n_xi, TraitGrid trait);

    double half_width() const { return a_; }
    double spacing() const { return h_xi_; }
    std::size_t n_xi() const { return xi_.size(); }
    std::size_t center_index() const { return (xi_.size() - 1) / 2; }
    double xi(std::size_t i) const { return xi_[i]; }
    std::span<const double> xi_nodes() const { return xi_; }
    const TraitGrid& trait() const { return trait_; }

private:
    double a_ = 0.0;
    double h_xi_ = 0.0;
    std::vector<double> xi_;
    TraitGrid trait_;
};

/// Dense rectangular array, row-major by xi (or x) then theta. Field2D in the
/// slab sense is an Array2D whose row count matches a SlabGrid.
class Array2D {
public:
    Array2D() = default;
    Array2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    double min() const;
    double max() const;
    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Trait marginal nu(xi) = integral of mu(xi, .) over the trait interval.
std::vector<double> trait_marginal(const Array2D& mu, const TraitGrid& trait);

} // namespace toadwave
