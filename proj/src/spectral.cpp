#include "toadwave/spectral.hpp"

#include "toadwave/errors.hpp"
#include "toadwave/parallel.hpp"
#include "toadwave/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace toadwave {

namespace {

// Trapezoid with the Euler-Maclaurin endpoint correction, boundary slopes from
// one-sided second-order differences. Third-order accurate; serves as the
// independent quadrature in the rel1 refinement check.
double corrected_trapezoid(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    double trap = 0.5 * (f[0] + f[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) trap += f[i];
    trap *= h;
    const double d_left = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    const double d_right = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return trap - h * h / 12.0 * (d_right - d_left);
}

double quadrature_mean(std::span<const double> g, std::span<const double> Q,
                       const TraitGrid& grid) {
    double num = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        num += grid.weight(i) * g[i] * Q[i];
    return num;
}

} // namespace

void TraitOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag.size();
    y[0] = diag[0] * x[0] + upper[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i)
        y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
    y[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
}

double TraitOperator::inf_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i)
        m = std::max(m, std::abs(lower[i]) + std::abs(diag[i]) + std::abs(upper[i]));
    return m;
}

double TraitOperator::gershgorin_lower_bound() const {
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag.size(); ++i)
        b = std::min(b, diag[i] - std::abs(lower[i]) - std::abs(upper[i]));
    return b;
}

TraitOperator assemble_trait_operator(double lambda, double tau,
                                      const SpectralParams& params,
                                      const TraitGrid& grid) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("trait operator: lambda must be positive");
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("trait operator: tau must lie in [0, 1]");
    if (!(params.alpha > 0.0))
        throw std::invalid_argument("trait operator: alpha must be positive");

    const std::size_t n = grid.size();
    const double k = params.alpha / (grid.spacing() * grid.spacing());
    TraitOperator op;
    op.lambda = lambda;
    op.tau = tau;
    op.lower.assign(n, -k);
    op.upper.assign(n, -k);
    op.diag.assign(n, 0.0);
    op.potential.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        op.potential[i] =
            (grid.theta_max() - g_tau(grid.node(i), tau, grid.theta_min())) * lambda * lambda;
        op.diag[i] = 2.0 * k + op.potential[i];
    }
    // mirror closure rows
    op.lower[0] = 0.0;
    op.upper[0] = -2.0 * k;
    op.upper[n - 1] = 0.0;
    op.lower[n - 1] = -2.0 * k;
    return op;
}

EigenPair principal_eigenpair(const TraitOperator& op, const TraitGrid& grid) {
    const std::size_t n = op.size();
    if (n != grid.size())
        throw std::invalid_argument("principal_eigenpair: operator/grid size mismatch");

    const double op_norm = op.inf_norm();
    const double glb = op.gershgorin_lower_bound();
    const double shift = glb - 1e-6 * std::max(1.0, std::abs(glb));

    std::vector<double> lo_s(op.lower), di_s(op.diag), up_s(op.upper);
    for (std::size_t i = 0; i < n; ++i) di_s[i] -= shift;
    TridiagonalFactor factor(lo_s, di_s, up_s);

    std::vector<double> Q(n, 1.0 / grid.length());
    std::vector<double> LQ(n);
    const double k = std::abs(op.upper[1]);   // alpha / h^2
    const double accept_tol = 1e-10 * std::max(op_norm, 1.0);
    const double target_tol = 1e-13 * std::max(op_norm, 1.0);

    double gamma = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    double best_residual = residual;
    int stall = 0;
    int it = 0;
    for (it = 1; it <= 500; ++it) {
        factor.solve(Q);
        const double mass = integrate_trait(Q, grid);
        if (mass == 0.0 || !std::isfinite(mass))
            throw SolverError("principal_eigenpair: iteration degenerated", it, residual);
        const double s = 1.0 / mass;
        for (auto& q : Q) q *= s;

        // energy-form Rayleigh quotient: alpha/h * sum (dQ)^2 + sum w pot Q^2,
        // over sum w Q^2 -- positive terms only, no cancellation on stiff grids
        double grad = 0.0, pot = 0.0, nrm = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double d = Q[i + 1] - Q[i];
            grad += d * d;
        }
        grad *= k * grid.spacing();
        for (std::size_t i = 0; i < n; ++i) {
            pot += grid.weight(i) * op.potential[i] * Q[i] * Q[i];
            nrm += grid.weight(i) * Q[i] * Q[i];
        }
        gamma = (grad + pot) / nrm;

        op.apply(Q, LQ);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(LQ[i] - gamma * Q[i]));
        if (residual <= target_tol) break;
        if (residual >= 0.5 * best_residual) {
            if (++stall >= 4) break;
        } else {
            stall = 0;
        }
        best_residual = std::min(best_residual, residual);
    }
    if (residual > accept_tol)
        throw SolverError("principal_eigenpair: no convergence", it, residual);

    double qmin = *std::min_element(Q.begin(), Q.end());
    if (!(qmin > 0.0))
        throw SolverError("principal_eigenpair: eigenvector lost positivity", it, residual);
    return {gamma, std::move(Q), it, residual};
}

SpectralSolution dispersion_c(double lambda, double tau,
                              const SpectralParams& params, const TraitGrid& grid) {
    TraitOperator op = assemble_trait_operator(lambda, tau, params, grid);
    EigenPair pair = principal_eigenpair(op, grid);
    SpectralSolution sol;
    sol.lambda = lambda;
    sol.gamma = pair.gamma;
    sol.c = (params.r + lambda * lambda * grid.theta_max() - pair.gamma) / lambda;
    sol.tau = tau;
    sol.r = params.r;
    sol.alpha = params.alpha;
    sol.Q = std::move(pair.Q);
    sol.iterations = pair.iterations;
    sol.residual = pair.residual;
    return sol;
}

namespace {

double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c;
            c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// One parabolic-vertex step through (x-d, x, x+d); pulls the minimizer out of
// the flat noise basin the golden section cannot resolve.
double parabolic_polish(const std::function<double(double)>& f, double x, double d) {
    const double f0 = f(x - d), f1 = f(x), f2 = f(x + d);
    const double denom = f0 - 2.0 * f1 + f2;
    if (!(denom > 0.0)) return x;
    const double step = 0.5 * d * (f0 - f2) / denom;
    if (std::abs(step) > d) return x;
    return x + step;
}

} // namespace

MinSpeedResult minimize_speed(double tau, const SpectralParams& params,
                              const TraitGrid& grid, const SpeedSearch& search) {
    if (!(search.lambda_lo > 0.0 && search.lambda_lo < search.lambda_hi))
        throw std::invalid_argument("minimize_speed: need 0 < lambda_lo < lambda_hi");

    constexpr std::size_t kScanSize = 64;
    std::vector<double> lams(kScanSize), cs(kScanSize);
    const double ratio = std::log(search.lambda_hi / search.lambda_lo);
    for (std::size_t i = 0; i < kScanSize; ++i)
        lams[i] = search.lambda_lo *
                  std::exp(ratio * static_cast<double>(i) / (kScanSize - 1));
    parallel_for(kScanSize, [&](std::size_t i) {
        cs[i] = dispersion_c(lams[i], tau, params, grid).c;
    });

    const std::size_t imin =
        static_cast<std::size_t>(std::min_element(cs.begin(), cs.end()) - cs.begin());
    if (imin == 0 || imin == kScanSize - 1)
        throw BracketError("minimize_speed: scan minimum at the edge of "
                           "[lambda_lo, lambda_hi]; widen the search interval");

    auto cval = [&](double l) { return dispersion_c(l, tau, params, grid).c; };

    MinSpeedResult out;
    out.tau = tau;
    for (std::size_t i = 1; i + 1 < kScanSize; ++i) {
        if (cs[i] <= cs[i - 1] && cs[i] <= cs[i + 1]) {
            double l = golden_section(cval, lams[i - 1], lams[i + 1], search.tol);
            l = parabolic_polish(cval, l, 1e-4 * l);
            out.minima.push_back({l, cval(l)});
        }
    }

    const auto best = std::min_element(
        out.minima.begin(), out.minima.end(), [](const LocalMinimum& a, const LocalMinimum& b) {
            if (a.c != b.c) return a.c < b.c;
            return a.lambda < b.lambda;   // smallest positive minimizer on ties
        });
    out.lambda_star = best->lambda;
    out.c_star = best->c;

    SpectralSolution star = dispersion_c(out.lambda_star, tau, params, grid);
    out.Q_star = star.Q;
    std::vector<double> gth(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        gth[i] = g_tau(grid.node(i), tau, grid.theta_min());
    out.mean_trait = quadrature_mean(gth, out.Q_star, grid);
    out.theta0 = (out.lambda_star * out.c_star - params.r) /
                 (out.lambda_star * out.lambda_star);
    out.residuals = verify_relations(out, star, params, grid);
    return out;
}

RelationResiduals verify_relations(const MinSpeedResult& sol,
                                   const SpectralSolution& curve_point,
                                   const SpectralParams& params,
                                   const TraitGrid& grid) {
    RelationResiduals res;
    const std::size_t n = grid.size();
    std::vector<double> gthQ(n);
    for (std::size_t i = 0; i < n; ++i)
        gthQ[i] = g_tau(grid.node(i), curve_point.tau, grid.theta_min()) * curve_point.Q[i];

    const double l = curve_point.lambda;
    const double mean_curve = integrate_trait(gthQ, grid);
    res.r1 = std::abs(-l * curve_point.c + l * l * mean_curve + params.r);
    res.r1_oracle = std::abs(-l * curve_point.c +
                             l * l * corrected_trapezoid(gthQ, grid.spacing()) + params.r);
    res.r2 = mean_curve - 0.5 * (grid.theta_min() + grid.theta_max());

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q2 = grid.weight(i) * sol.Q_star[i] * sol.Q_star[i];
        num += q2 * g_tau(grid.node(i), sol.tau, grid.theta_min());
        den += q2;
    }
    res.r3 = std::abs(sol.c_star - 2.0 * sol.lambda_star * num / den);
    res.r4 = sol.c_star - sol.lambda_star * (grid.theta_min() + grid.theta_max());
    res.r6 = sol.c_star - 2.0 * std::sqrt(params.r * sol.mean_trait);
    return res;
}

ProfileShape profile_shape(std::span<const double> Q, const SpectralSolution& sol,
                           const TraitGrid& grid) {
    (void)sol;
    ProfileShape shape;
    const std::size_t n = Q.size();
    double qmax = 0.0;
    for (double q : Q) qmax = std::max(qmax, std::abs(q));

    shape.is_increasing = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (Q[i + 1] - Q[i] < -1e-10 * qmax) {
            shape.is_increasing = false;
            break;
        }
    }

    const std::vector<double> d2 = second_derivative_neumann(Q, grid.spacing());
    double dmax = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) dmax = std::max(dmax, std::abs(d2[i]));
    // curvature below this floor is eigensolver noise, not structure; the
    // absolute part keeps constant profiles (tau = 0) crossing-free
    const double floor =
        std::max(1e-8 * dmax, 1e-6 * qmax / (grid.length() * grid.length()));

    shape.theta0_empirical = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i + 2 < n; ++i) {
        if (std::abs(d2[i]) <= floor || std::abs(d2[i + 1]) <= floor) continue;
        if ((d2[i] > 0.0) != (d2[i + 1] > 0.0)) {
            ++shape.crossings;
            if (std::isnan(shape.theta0_empirical)) {    // leftmost crossing wins
                const double t = d2[i] / (d2[i] - d2[i + 1]);
                shape.theta0_empirical = grid.node(i) + t * grid.spacing();
            }
        }
    }
    return shape;
}

} // namespace toadwave
