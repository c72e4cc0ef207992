#pragma once

#include "toadwave/grid.hpp"

#include <cstddef>
#include <vector>

namespace toadwave {

struct SlabParams {
    double alpha = 1.0;
    double r = 1.0;
    double c_star = 0.0;        // spectral minimal speed at this tau (ceiling + initial guess)
    double lambda_star = 0.0;   // decay rate of the initial front profile
    double ceiling_tol = 1e-3;  // accepted overshoot of c above c_star
    double epsilon_cap = 0.1;   // precondition cap on the renormalization level
};

/// Solution of the slab travelling-wave problem with the renormalization
/// nu(0) = epsilon.
struct SlabSolution {
    explicit SlabSolution(SlabGrid g) : grid(std::move(g)) {}

    SlabGrid grid;
    double tau = 1.0;
    double epsilon = 0.0;
    double c = 0.0;
    Array2D mu;                  // rows follow the xi nodes, columns the trait nodes
    std::vector<double> nu;
    int iterations = 0;
    double residual = 0.0;
};

struct KppParams {
    double r = 1.0;
    double theta_min = 1.0;
};

struct KppSlabSolution {
    double a = 0.0;
    double c = 0.0;
    std::vector<double> nu;
    bool decreasing = false;
};

/// Solve -c Z_xi - g_tau(theta) Z_xixi - alpha Z_thth = rhs on the slab with
/// the boundary lift Z(-a,.) = 1/|Theta|, Z(a,.) = 0 and Neumann trait
/// closure. Advection by central differences; the mesh Peclet number
/// |c| h_xi / (2 theta_min) must stay below 1 so the system is an M-matrix.
Array2D solve_linear_slab(double c, double tau, const Array2D& rhs,
                          const SlabGrid& grid, const SlabParams& params);

/// One application of the fixed-point map: mu -> Z solving the linear slab
/// problem with source r mu (1 - nu), nu recomputed from mu.
Array2D picard_step(const Array2D& mu, double c, double tau,
                    const SlabGrid& grid, const SlabParams& params);

/// Solve the nonlinear slab system at a prescribed speed (no renormalization),
/// by damped Newton from a filled-slab initial iterate. Used for the epsilon
/// admissibility threshold and by the c = 0 diagnostics.
SlabSolution solve_slab_at_speed(double c, double tau, const SlabGrid& grid,
                                 const SlabParams& params);

/// Full slab solve: finds the pair (c, mu) with nu(0) = epsilon by Newton on
/// the speed-extended system (the renormalization enters as a bordering row).
/// Falls back to a tau homotopy (0 -> tau in 4 steps) if the direct solve
/// stalls. Throws BracketError when epsilon is not admissible and SolverError
/// when the iteration fails or the speed ceiling c <= c_star + tol breaks.
SlabSolution solve_slab(double tau, double epsilon, const SlabGrid& grid,
                        const SlabParams& params);

/// Scalar Fisher-KPP slab problem -c nu' - theta_min nu'' = r nu (1 - nu),
/// nu(-a) = 1, nu(a) = 0, at a prescribed speed. n_xi must be odd. Damped
/// Newton from two deterministic starts (filled slab, decaying boundary
/// layer); of the converged candidates that are nonnegative and nonincreasing
/// the one with the smaller nu(0) is returned.
KppSlabSolution solve_kpp_slab(double c, double a, std::size_t n_xi,
                               const KppParams& params);

/// The unique speed c0 with nu_{c0}(0) = epsilon, from the speed-extended
/// scalar Newton. Requires epsilon below the measured c = 0 level
/// nu_{c=0}(0); the result is validated against [0, 2 sqrt(r theta_min)].
double find_c0(double a, double epsilon, std::size_t n_xi, const KppParams& params);

} // namespace toadwave
