#pragma once

#include "toadwave/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace toadwave {

struct SpectralParams {
    double alpha = 1.0;    // mutation diffusivity
    double r = 1.0;        // growth rate
};

/// Diffusivity homotopy g_tau(theta) = theta_min + tau (theta - theta_min);
/// tau = 0 is the constant-coefficient problem, tau = 1 the full model.
inline double g_tau(double theta, double tau, double theta_min) {
    return theta_min + tau * (theta - theta_min);
}

/// Discrete trait operator L u = -alpha u'' - (g_tau(theta) - theta_max) lambda^2 u
/// with Neumann mirror closure. Tridiagonal as a plain matrix, symmetric under
/// the trapezoid inner product.
struct TraitOperator {
    double lambda = 0.0;
    double tau = 1.0;
    std::vector<double> lower;       // lower[i] multiplies u[i-1]
    std::vector<double> diag;
    std::vector<double> upper;       // upper[i] multiplies u[i+1]
    std::vector<double> potential;   // (theta_max - g_tau(theta_i)) lambda^2 >= 0

    std::size_t size() const { return diag.size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    double inf_norm() const;
    double gershgorin_lower_bound() const;
};

TraitOperator assemble_trait_operator(double lambda, double tau,
                                      const SpectralParams& params,
                                      const TraitGrid& grid);

struct EigenPair {
    double gamma = 0.0;          // smallest eigenvalue
    std::vector<double> Q;       // positive eigenvector, unit trait integral
    int iterations = 0;
    double residual = 0.0;       // max-norm of L Q - gamma Q
};

/// Principal pair by shifted inverse power iteration (shift below the
/// Gershgorin lower bound, start vector 1/|Theta|); the eigenvalue is the
/// energy-form Rayleigh quotient, which stays accurate on stiff grids.
EigenPair principal_eigenpair(const TraitOperator& op, const TraitGrid& grid);

struct SpectralSolution {
    double lambda = 0.0;
    double gamma = 0.0;
    double c = 0.0;              // lambda c = r + lambda^2 theta_max - gamma
    double tau = 1.0;
    double r = 1.0;
    double alpha = 1.0;
    std::vector<double> Q;
    int iterations = 0;
    double residual = 0.0;
};

SpectralSolution dispersion_c(double lambda, double tau,
                              const SpectralParams& params,
                              const TraitGrid& grid);

struct RelationResiduals {
    double r1 = 0.0;         // |-lambda c + lambda^2 <g_tau theta> + r|
    double r1_oracle = 0.0;  // same, mean trait from the end-corrected quadrature
    double r2 = 0.0;         // <g_tau theta> - (theta_min + theta_max)/2
    double r3 = 0.0;         // |c* - 2 lambda* int g_tau Q*^2 / int Q*^2|
    double r4 = 0.0;         // c* - lambda* (theta_min + theta_max)
    double r6 = 0.0;         // c* - 2 sqrt(r <theta*>)
};

struct LocalMinimum {
    double lambda = 0.0;
    double c = 0.0;
};

struct MinSpeedResult {
    double c_star = 0.0;
    double lambda_star = 0.0;
    double mean_trait = 0.0;             // int g_tau(theta) Q* dtheta
    double theta0 = 0.0;                 // (lambda* c* - r) / lambda*^2
    double tau = 1.0;
    std::vector<double> Q_star;
    RelationResiduals residuals;
    std::vector<LocalMinimum> minima;    // every refined interior minimum of the scan
};

struct SpeedSearch {
    double lambda_lo = 0.05;
    double lambda_hi = 20.0;
    double tol = 1e-8;       // golden-section lambda tolerance
};

/// Coarse 64-sample log-spaced scan, golden-section refinement of each
/// interior local minimum, then a parabolic-vertex polish. Throws
/// BracketError when the scan minimum sits at an edge.
MinSpeedResult minimize_speed(double tau, const SpectralParams& params,
                              const TraitGrid& grid, const SpeedSearch& search);

RelationResiduals verify_relations(const MinSpeedResult& sol,
                                   const SpectralSolution& curve_point,
                                   const SpectralParams& params,
                                   const TraitGrid& grid);

struct ProfileShape {
    bool is_increasing = false;
    double theta0_empirical = 0.0;   // NaN when no inflection is detected
    int crossings = 0;               // sign changes of the second derivative
};

ProfileShape profile_shape(std::span<const double> Q, const SpectralSolution& sol,
                           const TraitGrid& grid);

} // namespace toadwave
