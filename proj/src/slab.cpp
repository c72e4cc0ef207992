#include "toadwave/slab.hpp"

#include "toadwave/errors.hpp"
#include "toadwave/spectral.hpp"
#include "toadwave/tridiag.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toadwave {

namespace {

constexpr double kPecletLimit = 0.95;

void check_peclet(double c, const SlabGrid& grid) {
    const double pe = std::abs(c) * grid.spacing() / (2.0 * grid.trait().theta_min());
    if (pe >= kPecletLimit)
        throw std::invalid_argument(
            "slab: mesh Peclet number " + std::to_string(pe) +
            " too large for the central advection stencil; refine the xi grid");
}

/// Block-tridiagonal solver for systems whose off-diagonal blocks are
/// diagonal matrices (the xi coupling acts trait-by-trait). Dense diagonal
/// blocks are factored with Eigen.
class BlockTridiagSolver {
public:
    // D[i] is consumed; L and U hold the per-row diagonal couplings packed as
    // coupling(i, j) = band[i * m + j]; L of row 0 and U of the last row unused.
    void factor(std::vector<Eigen::MatrixXd> D, std::vector<double> L,
                std::vector<double> U, std::size_t m) {
        m_ = m;
        n_ = D.size();
        L_ = std::move(L);
        U_ = std::move(U);
        lu_.clear();
        lu_.reserve(n_);
        inv_next_.assign(n_, Eigen::MatrixXd());
        Eigen::MatrixXd work;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i > 0) {
                // D[i] -= diag(L_i) * Dtilde_{i-1}^{-1} * diag(U_{i-1})
                work = inv_next_[i - 1];
                for (std::size_t rr = 0; rr < m_; ++rr)
                    work.row(static_cast<Eigen::Index>(rr)) *= L_[i * m_ + rr];
                D[i].noalias() -= work;
            }
            lu_.emplace_back(D[i]);
            if (i + 1 < n_) {
                // Dtilde_i^{-1} * diag(U_i), needed by the next elimination row
                Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                                            static_cast<Eigen::Index>(m_));
                for (std::size_t rr = 0; rr < m_; ++rr)
                    rhs(static_cast<Eigen::Index>(rr), static_cast<Eigen::Index>(rr)) =
                        U_[i * m_ + rr];
                inv_next_[i] = lu_.back().solve(rhs);
            }
        }
    }

    void solve(std::span<double> x) const {
        Eigen::Map<Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::VectorXd tmp(static_cast<Eigen::Index>(m_));
        // forward sweep: y_i = b_i - diag(L_i) Dtilde_{i-1}^{-1} y_{i-1}
        for (std::size_t i = 1; i < n_; ++i) {
            tmp = lu_[i - 1].solve(v.segment(static_cast<Eigen::Index>((i - 1) * m_),
                                             static_cast<Eigen::Index>(m_)));
            for (std::size_t rr = 0; rr < m_; ++rr)
                v[static_cast<Eigen::Index>(i * m_ + rr)] -=
                    L_[i * m_ + rr] * tmp[static_cast<Eigen::Index>(rr)];
        }
        // back substitution
        auto seg = [&](std::size_t i) {
            return v.segment(static_cast<Eigen::Index>(i * m_), static_cast<Eigen::Index>(m_));
        };
        seg(n_ - 1) = lu_[n_ - 1].solve(seg(n_ - 1).eval());
        for (std::size_t i = n_ - 1; i-- > 0;) {
            tmp = seg(i);
            for (std::size_t rr = 0; rr < m_; ++rr)
                tmp[static_cast<Eigen::Index>(rr)] -=
                    U_[i * m_ + rr] * v[static_cast<Eigen::Index>((i + 1) * m_ + rr)];
            seg(i) = lu_[i].solve(tmp);
        }
    }

private:
    std::size_t n_ = 0, m_ = 0;
    std::vector<double> L_, U_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    std::vector<Eigen::MatrixXd> inv_next_;
};

struct Stencil {
    const SlabGrid& grid;
    const SlabParams& params;
    double tau;
    double lift;
    std::vector<double> g;        // g_tau at the trait nodes
    double ihx2, ihx_half, ith2;

    Stencil(double tau_, const SlabGrid& grid_, const SlabParams& params_)
        : grid(grid_), params(params_), tau(tau_), lift(1.0 / grid_.trait().length()) {
        const auto& tr = grid.trait();
        g.resize(tr.size());
        for (std::size_t j = 0; j < tr.size(); ++j)
            g[j] = g_tau(tr.node(j), tau, tr.theta_min());
        ihx2 = 1.0 / (grid.spacing() * grid.spacing());
        ihx_half = 1.0 / (2.0 * grid.spacing());
        ith2 = params.alpha / (tr.spacing() * tr.spacing());
    }

    std::size_t n_xi() const { return grid.n_xi(); }
    std::size_t m() const { return grid.trait().size(); }

    // -c mu_xi - g mu_xixi - alpha mu_thth applied at interior row i
    void apply_row(double c, const Array2D& mu, std::size_t i, std::span<double> out) const {
        const auto up = mu.row(i + 1);
        const auto lo = mu.row(i - 1);
        const auto mid = mu.row(i);
        const std::size_t mm = m();
        for (std::size_t j = 0; j < mm; ++j) {
            double v = -c * (up[j] - lo[j]) * ihx_half -
                       g[j] * (lo[j] - 2.0 * mid[j] + up[j]) * ihx2;
            if (j == 0)
                v -= 2.0 * ith2 * (mid[1] - mid[0]);
            else if (j + 1 == mm)
                v -= 2.0 * ith2 * (mid[mm - 2] - mid[mm - 1]);
            else
                v -= ith2 * (mid[j - 1] - 2.0 * mid[j] + mid[j + 1]);
            out[j] = v;
        }
    }

    // residual of the nonlinear system; boundary rows carry the Dirichlet data
    double residual(double c, const Array2D& mu, Array2D& F,
                    std::vector<double>& nu) const {
        const std::size_t n = n_xi(), mm = m();
        nu = trait_marginal(mu, grid.trait());
        for (std::size_t j = 0; j < mm; ++j) {
            F(0, j) = mu(0, j) - lift;
            F(n - 1, j) = mu(n - 1, j);
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            apply_row(c, mu, i, F.row(i));
            const double growth = params.r * (1.0 - nu[i]);
            for (std::size_t j = 0; j < mm; ++j) F(i, j) -= growth * mu(i, j);
        }
        double rmax = 0.0;
        for (double v : F.flat()) rmax = std::max(rmax, std::abs(v));
        return rmax;
    }

    double op_scale() const {
        return 2.0 * ith2 + 2.0 * g.back() * ihx2 + params.r;
    }

    Eigen::MatrixXd theta_block() const {
        const std::size_t mm = m();
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mm),
                                                  static_cast<Eigen::Index>(mm));
        for (std::size_t j = 0; j < mm; ++j) {
            B(j, j) = 2.0 * ith2;
            if (j == 0)
                B(0, 1) = -2.0 * ith2;
            else if (j + 1 == mm)
                B(mm - 1, mm - 2) = -2.0 * ith2;
            else {
                B(j, j - 1) = -ith2;
                B(j, j + 1) = -ith2;
            }
        }
        return B;
    }

    // couplings of interior row i; boundary rows decouple
    void couplings(double c, std::size_t i, std::span<double> L, std::span<double> U) const {
        const std::size_t n = n_xi(), mm = m();
        for (std::size_t j = 0; j < mm; ++j) {
            if (i == 0 || i + 1 == n) {
                L[j] = 0.0;
                U[j] = 0.0;
            } else {
                L[j] = -g[j] * ihx2 + c * ihx_half;
                U[j] = -g[j] * ihx2 - c * ihx_half;
            }
        }
    }
};

// Factor the Jacobian of the nonlinear system (or the bare linear operator
// when `linearized` and mu/nu are ignored).
void factor_system(const Stencil& st, double c, const Array2D* mu,
                   const std::vector<double>* nu, BlockTridiagSolver& solver) {
    const std::size_t n = st.n_xi(), mm = st.m();
    const Eigen::MatrixXd base = st.theta_block();
    const auto& w = st.grid.trait();

    std::vector<Eigen::MatrixXd> D(n);
    std::vector<double> L(n * mm), U(n * mm);
    for (std::size_t i = 0; i < n; ++i) {
        st.couplings(c, i, {L.data() + i * mm, mm}, {U.data() + i * mm, mm});
        if (i == 0 || i + 1 == n) {
            D[i] = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(mm),
                                             static_cast<Eigen::Index>(mm));
            continue;
        }
        D[i] = base;
        for (std::size_t j = 0; j < mm; ++j)
            D[i](j, j) += 2.0 * st.g[j] * st.ihx2;
        if (mu != nullptr) {
            const double growth = st.params.r * (1.0 - (*nu)[i]);
            for (std::size_t j = 0; j < mm; ++j) {
                D[i](j, j) -= growth;
                for (std::size_t j2 = 0; j2 < mm; ++j2)
                    D[i](j, j2) += st.params.r * (*mu)(i, j) * w.weight(j2);
            }
        }
    }
    solver.factor(std::move(D), std::move(L), std::move(U), mm);
}

Array2D filled_slab_guess(const Stencil& st) {
    Array2D mu(st.n_xi(), st.m(), st.lift);
    for (std::size_t j = 0; j < st.m(); ++j) mu(st.n_xi() - 1, j) = 0.0;
    return mu;
}

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Damped Newton for the fixed-speed system.
NewtonReport newton_fixed_speed(const Stencil& st, double c, Array2D& mu) {
    const std::size_t n = st.n_xi(), mm = st.m();
    Array2D F(n, mm), Ftrial(n, mm);
    std::vector<double> nu, nutrial;
    BlockTridiagSolver solver;
    const double target = 50.0 * 1e-16 * st.op_scale();
    const double accept = 1e-13 * st.op_scale() * 100.0;

    NewtonReport rep;
    double res = 0.0;
    for (int it = 1; it <= 120; ++it) {
        rep.iterations = it;
        res = st.residual(c, mu, F, nu);
        if (res <= target) break;
        factor_system(st, c, &mu, &nu, solver);
        Array2D delta = F;
        solver.solve(delta.flat());
        double s = 1.0;
        bool stepped = false;
        while (s > 1e-12) {
            Array2D trial = mu;
            for (std::size_t k = 0; k < trial.flat().size(); ++k)
                trial.flat()[k] -= s * delta.flat()[k];
            const double rtrial = st.residual(c, trial, Ftrial, nutrial);
            if (rtrial < res) {
                mu = std::move(trial);
                res = rtrial;
                stepped = true;
                break;
            }
            s *= 0.5;
        }
        if (!stepped) break;   // stagnated at the roundoff floor
    }
    rep.residual = res;
    rep.converged = res <= std::max(target, accept);
    return rep;
}

// Newton on the speed-extended system: unknowns (mu, c), the renormalization
// nu(0) = epsilon appended as a bordering row. Two block solves per step.
NewtonReport newton_wave(const Stencil& st, double epsilon, Array2D& mu, double& c,
                         double c_hi) {
    const std::size_t n = st.n_xi(), mm = st.m();
    const std::size_t mid = st.grid.center_index();
    const auto& tr = st.grid.trait();
    Array2D F(n, mm), Ftrial(n, mm);
    std::vector<double> nu, nutrial;
    BlockTridiagSolver solver;
    const double target = 50.0 * 1e-16 * st.op_scale();
    const double accept = 1e-11 * st.op_scale();

    auto merit = [&](const Array2D& m2, double c2, Array2D& Fbuf,
                     std::vector<double>& nubuf) {
        const double r = st.residual(c2, m2, Fbuf, nubuf);
        return std::max(r, std::abs(nubuf[mid] - epsilon));
    };

    NewtonReport rep;
    double res = 0.0;
    std::vector<double> Fc(n * mm, 0.0);
    for (int it = 1; it <= 200; ++it) {
        rep.iterations = it;
        res = merit(mu, c, F, nu);
        if (res <= target) break;
        factor_system(st, c, &mu, &nu, solver);

        // dF/dc = -(mu_{i+1} - mu_{i-1}) / (2 h) on interior rows
        for (std::size_t i = 1; i + 1 < n; ++i)
            for (std::size_t j = 0; j < mm; ++j)
                Fc[i * mm + j] = -(mu(i + 1, j) - mu(i - 1, j)) * st.ihx_half;

        std::vector<double> z1(F.flat().begin(), F.flat().end());
        std::vector<double> z2 = Fc;
        solver.solve(z1);
        solver.solve(z2);

        double w_z1 = 0.0, w_z2 = 0.0;
        for (std::size_t j = 0; j < mm; ++j) {
            w_z1 += tr.weight(j) * z1[mid * mm + j];
            w_z2 += tr.weight(j) * z2[mid * mm + j];
        }
        const double phi = nu[mid] - epsilon;
        if (w_z2 == 0.0 || !std::isfinite(w_z2)) break;
        const double dc = (phi - w_z1) / w_z2;

        double s = 1.0;
        bool stepped = false;
        while (s > 1e-12) {
            const double ctrial = c + s * dc;
            if (ctrial > 0.0 && ctrial < c_hi) {
                Array2D trial = mu;
                for (std::size_t k = 0; k < trial.flat().size(); ++k)
                    trial.flat()[k] += s * (-z1[k] - dc * z2[k]);
                const double rtrial = merit(trial, ctrial, Ftrial, nutrial);
                if (rtrial < res) {
                    mu = std::move(trial);
                    c = ctrial;
                    res = rtrial;
                    stepped = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!stepped) break;
    }
    rep.residual = res;
    rep.converged = res <= std::max(target, accept);
    return rep;
}

Array2D wave_guess(const Stencil& st, double epsilon, double lambda_star) {
    const std::size_t n = st.n_xi(), mm = st.m();
    Array2D mu(n, mm);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::min(1.0, epsilon * std::exp(-lambda_star * st.grid.xi(i)));
        for (std::size_t j = 0; j < mm; ++j) mu(i, j) = v * st.lift;
    }
    for (std::size_t j = 0; j < mm; ++j) {
        mu(0, j) = st.lift;
        mu(n - 1, j) = 0.0;
    }
    return mu;
}

} // namespace

Array2D solve_linear_slab(double c, double tau, const Array2D& rhs,
                          const SlabGrid& grid, const SlabParams& params) {
    if (rhs.rows() != grid.n_xi() || rhs.cols() != grid.trait().size())
        throw std::invalid_argument("solve_linear_slab: rhs does not match the grid");
    if (!rhs.all_finite())
        throw std::invalid_argument("solve_linear_slab: rhs must be finite");
    check_peclet(c, grid);

    Stencil st(tau, grid, params);
    BlockTridiagSolver solver;
    factor_system(st, c, nullptr, nullptr, solver);

    Array2D Z = rhs;
    for (std::size_t j = 0; j < grid.trait().size(); ++j) {
        Z(0, j) = st.lift;
        Z(grid.n_xi() - 1, j) = 0.0;
    }
    solver.solve(Z.flat());
    return Z;
}

Array2D picard_step(const Array2D& mu, double c, double tau,
                    const SlabGrid& grid, const SlabParams& params) {
    if (mu.min() < -1e-12)
        throw std::invalid_argument("picard_step: iterate must be nonnegative");
    const std::vector<double> nu = trait_marginal(mu, grid.trait());
    Array2D rhs(mu.rows(), mu.cols());
    for (std::size_t i = 0; i < mu.rows(); ++i)
        for (std::size_t j = 0; j < mu.cols(); ++j)
            rhs(i, j) = params.r * mu(i, j) * (1.0 - nu[i]);
    return solve_linear_slab(c, tau, rhs, grid, params);
}

SlabSolution solve_slab_at_speed(double c, double tau, const SlabGrid& grid,
                                 const SlabParams& params) {
    check_peclet(c, grid);
    Stencil st(tau, grid, params);
    Array2D mu = filled_slab_guess(st);
    NewtonReport rep = newton_fixed_speed(st, c, mu);
    if (!rep.converged)
        throw SolverError("solve_slab_at_speed: Newton stalled", rep.iterations,
                          rep.residual);
    SlabSolution sol(grid);
    sol.tau = tau;
    sol.epsilon = 0.0;
    sol.c = c;
    sol.nu = trait_marginal(mu, grid.trait());
    sol.mu = std::move(mu);
    sol.iterations = rep.iterations;
    sol.residual = rep.residual;
    return sol;
}

SlabSolution solve_slab(double tau, double epsilon, const SlabGrid& grid,
                        const SlabParams& params) {
    if (!(epsilon > 0.0 && epsilon <= params.epsilon_cap))
        throw std::invalid_argument("solve_slab: epsilon must lie in (0, " +
                                    std::to_string(params.epsilon_cap) + "]");
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("solve_slab: tau must lie in [0, 1]");
    if (!(params.c_star > 0.0) || !(params.lambda_star > 0.0))
        throw std::invalid_argument("solve_slab: params need the spectral c_star and lambda_star");

    const double c_hi = params.c_star + 1.0;
    check_peclet(c_hi, grid);
    Stencil st(tau, grid, params);

    // admissibility: epsilon must lie below the measured c = 0 level of nu(0)
    SlabSolution rest = solve_slab_at_speed(0.0, tau, grid, params);
    const double eps_threshold = rest.nu[grid.center_index()];
    if (!(epsilon < eps_threshold))
        throw BracketError("solve_slab: epsilon " + std::to_string(epsilon) +
                           " is not below the measured c = 0 threshold " +
                           std::to_string(eps_threshold) +
                           "; the renormalization admits no positive-speed root");

    double c = std::min(0.999 * params.c_star, c_hi - 1e-3);
    Array2D mu = wave_guess(st, epsilon, params.lambda_star);
    NewtonReport rep = newton_wave(st, epsilon, mu, c, c_hi);

    if (!rep.converged) {
        // tau homotopy fallback, warm-started from the tau = 0 reduction
        c = std::min(0.999 * params.c_star, c_hi - 1e-3);
        mu = wave_guess(st, epsilon, params.lambda_star);
        int total_its = rep.iterations;
        for (double t2 : {0.0, 0.25 * tau, 0.5 * tau, 0.75 * tau, tau}) {
            Stencil st2(t2, grid, params);
            rep = newton_wave(st2, epsilon, mu, c, c_hi);
            total_its += rep.iterations;
            if (!rep.converged) break;
        }
        rep.iterations = total_its;
        if (!rep.converged)
            throw SolverError("solve_slab: speed-extended Newton stalled",
                              rep.iterations, rep.residual);
    }

    if (!(c > 0.0))
        throw SolverError("solve_slab: converged to a nonpositive speed",
                          rep.iterations, rep.residual);
    if (c > params.c_star + params.ceiling_tol)
        throw SolverError("solve_slab: speed " + std::to_string(c) +
                          " exceeds the spectral ceiling " +
                          std::to_string(params.c_star), rep.iterations, rep.residual);

    SlabSolution sol(grid);
    sol.tau = tau;
    sol.epsilon = epsilon;
    sol.c = c;
    sol.nu = trait_marginal(mu, grid.trait());
    sol.mu = std::move(mu);
    sol.iterations = rep.iterations;
    sol.residual = rep.residual;
    return sol;
}

namespace {

// scalar residual of the KPP slab system at speed c
double kpp_residual(double c, double theta, double r, double h,
                    std::span<const double> nu, std::span<double> F) {
    const std::size_t n = nu.size();
    F[0] = nu[0] - 1.0;
    F[n - 1] = nu[n - 1];
    const double ih2 = theta / (h * h), ihh = c / (2.0 * h);
    double rmax = std::max(std::abs(F[0]), std::abs(F[n - 1]));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        F[i] = -ihh * (nu[i + 1] - nu[i - 1]) -
               ih2 * (nu[i - 1] - 2.0 * nu[i] + nu[i + 1]) -
               r * nu[i] * (1.0 - nu[i]);
        rmax = std::max(rmax, std::abs(F[i]));
    }
    return rmax;
}

struct KppNewtonResult {
    std::vector<double> nu;
    bool converged = false;
};

KppNewtonResult kpp_newton(double c, double theta, double r, double h,
                           std::vector<double> nu) {
    const std::size_t n = nu.size();
    std::vector<double> F(n), Ftrial(n), lo(n), di(n), up(n);
    const double scale = 2.0 * theta / (h * h) + r;
    const double target = 100.0 * 1e-16 * scale;
    double res = 0.0;
    for (int it = 0; it < 200; ++it) {
        res = kpp_residual(c, theta, r, h, nu, F);
        if (res <= target) break;
        di[0] = 1.0; up[0] = 0.0; lo[0] = 0.0;
        di[n - 1] = 1.0; lo[n - 1] = 0.0; up[n - 1] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            lo[i] = c / (2.0 * h) - theta / (h * h);
            di[i] = 2.0 * theta / (h * h) - r * (1.0 - 2.0 * nu[i]);
            up[i] = -c / (2.0 * h) - theta / (h * h);
        }
        TridiagonalFactor J(lo, di, up);
        std::vector<double> d = F;
        J.solve(d);
        double s = 1.0;
        bool stepped = false;
        while (s > 1e-12) {
            std::vector<double> trial = nu;
            for (std::size_t i = 0; i < n; ++i) trial[i] -= s * d[i];
            const double rt = kpp_residual(c, theta, r, h, trial, Ftrial);
            if (rt < res) {
                nu = std::move(trial);
                res = rt;
                stepped = true;
                break;
            }
            s *= 0.5;
        }
        if (!stepped) break;
    }
    return {std::move(nu), res <= std::max(target, 1e-11 * scale)};
}

bool kpp_valid(std::span<const double> nu) {
    for (double v : nu)
        if (v < -1e-9) return false;
    for (std::size_t i = 0; i + 1 < nu.size(); ++i)
        if (nu[i + 1] - nu[i] > 1e-9) return false;
    return true;
}

} // namespace

KppSlabSolution solve_kpp_slab(double c, double a, std::size_t n_xi,
                               const KppParams& params) {
    if (!(c >= 0.0)) throw std::invalid_argument("solve_kpp_slab: need c >= 0");
    if (!(a > 0.0)) throw std::invalid_argument("solve_kpp_slab: need a > 0");
    if (n_xi < 3 || n_xi % 2 == 0)
        throw std::invalid_argument("solve_kpp_slab: n_xi must be odd and >= 3");
    const double h = 2.0 * a / static_cast<double>(n_xi - 1);
    if (c * h / (2.0 * params.theta_min) >= kPecletLimit)
        throw std::invalid_argument("solve_kpp_slab: mesh Peclet number too large; "
                                    "increase n_xi for this speed");

    // filled slab
    std::vector<double> plateau(n_xi, 1.0);
    plateau.back() = 0.0;
    // decaying boundary layer at the left
    const double disc = c * c - 4.0 * params.theta_min * params.r;
    const double kappa = disc > 0.0
                             ? (c + std::sqrt(disc)) / (2.0 * params.theta_min)
                             : std::max(c / (2.0 * params.theta_min),
                                        std::sqrt(params.r / params.theta_min));
    std::vector<double> layer(n_xi);
    for (std::size_t i = 0; i < n_xi; ++i)
        layer[i] = std::exp(-kappa * (-a + h * static_cast<double>(i) + a));
    layer.front() = 1.0;
    layer.back() = 0.0;

    const std::size_t mid = (n_xi - 1) / 2;
    std::vector<std::vector<double>> valid;
    for (auto* guess : {&plateau, &layer}) {
        KppNewtonResult out = kpp_newton(c, params.theta_min, params.r, h, *guess);
        if (out.converged && kpp_valid(out.nu)) valid.push_back(std::move(out.nu));
    }
    if (valid.empty())
        throw SolverError("solve_kpp_slab: no admissible solution found", 200, 1.0);
    std::vector<double>* pick = &valid.front();
    for (auto& cand : valid)
        if (cand[mid] < (*pick)[mid]) pick = &cand;

    KppSlabSolution sol;
    sol.a = a;
    sol.c = c;
    sol.nu = std::move(*pick);
    sol.decreasing = true;
    for (std::size_t i = 0; i + 1 < sol.nu.size(); ++i)
        if (sol.nu[i + 1] > sol.nu[i] + 1e-12) sol.decreasing = false;
    return sol;
}

double find_c0(double a, double epsilon, std::size_t n_xi, const KppParams& params) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("find_c0: need epsilon > 0");
    if (n_xi < 3 || n_xi % 2 == 0)
        throw std::invalid_argument("find_c0: n_xi must be odd and >= 3");
    const double h = 2.0 * a / static_cast<double>(n_xi - 1);
    const std::size_t mid = (n_xi - 1) / 2;

    const KppSlabSolution rest = solve_kpp_slab(0.0, a, n_xi, params);
    if (!(epsilon < rest.nu[mid]))
        throw BracketError("find_c0: epsilon " + std::to_string(epsilon) +
                           " is not below the measured c = 0 level " +
                           std::to_string(rest.nu[mid]));

    const double c_kpp = 2.0 * std::sqrt(params.r * params.theta_min);
    double c = 0.999 * c_kpp;
    const double lam = std::sqrt(params.r / params.theta_min);
    std::vector<double> nu(n_xi);
    for (std::size_t i = 0; i < n_xi; ++i) {
        const double xi = -a + h * static_cast<double>(i);
        nu[i] = std::min(1.0, epsilon * std::exp(-lam * xi));
    }
    nu.front() = 1.0;
    nu.back() = 0.0;

    // speed-extended Newton with the bordering row nu(0) = epsilon
    const std::size_t n = n_xi;
    std::vector<double> F(n), Ftrial(n), Fc(n), lo(n), di(n), up(n);
    const double scale = 2.0 * params.theta_min / (h * h) + params.r;
    const double target = 100.0 * 1e-16 * scale;
    auto merit = [&](std::span<const double> v, double cc, std::span<double> buf) {
        const double rr = kpp_residual(cc, params.theta_min, params.r, h, v, buf);
        return std::max(rr, std::abs(v[mid] - epsilon));
    };
    double res = 0.0;
    int it = 0;
    for (it = 1; it <= 200; ++it) {
        res = merit(nu, c, F);
        if (res <= target) break;
        di[0] = 1.0; up[0] = 0.0; lo[0] = 0.0;
        di[n - 1] = 1.0; lo[n - 1] = 0.0; up[n - 1] = 0.0;
        Fc[0] = Fc[n - 1] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            lo[i] = c / (2.0 * h) - params.theta_min / (h * h);
            di[i] = 2.0 * params.theta_min / (h * h) - params.r * (1.0 - 2.0 * nu[i]);
            up[i] = -c / (2.0 * h) - params.theta_min / (h * h);
            Fc[i] = -(nu[i + 1] - nu[i - 1]) / (2.0 * h);
        }
        TridiagonalFactor J(lo, di, up);
        std::vector<double> z1 = F, z2 = Fc;
        J.solve(z1);
        J.solve(z2);
        if (z2[mid] == 0.0 || !std::isfinite(z2[mid])) break;
        const double dc = ((nu[mid] - epsilon) - z1[mid]) / z2[mid];
        double s = 1.0;
        bool stepped = false;
        while (s > 1e-12) {
            const double ct = c + s * dc;
            if (ct > 0.0 && ct * h / (2.0 * params.theta_min) < kPecletLimit) {
                std::vector<double> trial = nu;
                for (std::size_t i = 0; i < n; ++i)
                    trial[i] += s * (-z1[i] - dc * z2[i]);
                const double rt = merit(trial, ct, Ftrial);
                if (rt < res) {
                    nu = std::move(trial);
                    c = ct;
                    res = rt;
                    stepped = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!stepped) break;
    }
    if (res > 1e-10 * scale)
        throw SolverError("find_c0: speed-extended Newton stalled", it, res);
    if (!(c >= 0.0 && c <= c_kpp))
        throw BracketError("find_c0: root " + std::to_string(c) +
                           " escaped [0, 2 sqrt(r theta_min)]");
    return c;
}

} // namespace toadwave
