#include "toadwave/verify.hpp"

#include "toadwave/analysis.hpp"
#include "toadwave/evolution.hpp"
#include "toadwave/io.hpp"
#include "toadwave/slab.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace toadwave {

double dense_principal_eigenvalue(const TraitOperator& op, const TraitGrid& grid) {
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        L(i, i) = op.diag[static_cast<std::size_t>(i)];
        if (i > 0) L(i, i - 1) = op.lower[static_cast<std::size_t>(i)];
        if (i + 1 < n) L(i, i + 1) = op.upper[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd sqw(n);
    for (Eigen::Index i = 0; i < n; ++i)
        sqw(i) = std::sqrt(grid.weight(static_cast<std::size_t>(i)));
    Eigen::MatrixXd S = sqw.asDiagonal() * L * sqw.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

namespace {

class Runner {
public:
    Runner(const RunConfig& config, std::string only, std::string inject)
        : cfg_(config), only_(std::move(only)), inject_(std::move(inject)) {}

    bool wants(const std::string& suite) const {
        return only_.empty() || only_ == suite;
    }

    void check(const std::string& id, const std::function<bool(std::string&)>& body) {
        if (!only_.empty() && id.rfind(only_ + ".", 0) != 0) return;
        CheckResult res;
        res.id = id;
        try {
            res.pass = body(res.detail);
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        if (id == inject_) {
            res.pass = !res.pass;
            res.detail += " [fault injected]";
        }
        report_.checks.push_back(std::move(res));
    }

    VerifyReport finish() {
        report_.all_passed =
            std::all_of(report_.checks.begin(), report_.checks.end(),
                        [](const CheckResult& c) { return c.pass; });
        return std::move(report_);
    }

    const RunConfig& cfg_;

private:
    std::string only_;
    std::string inject_;
    VerifyReport report_;
};

std::string fmt(double v) { return format_double(v); }

TraitGrid desk_trait(const RunConfig& cfg, std::size_t n) {
    return make_trait_grid(cfg.params.theta_min, cfg.params.theta_max, n);
}

void grid_checks(Runner& R) {
    if (!R.wants("grid")) return;
    const auto& p = R.cfg_.params;

    R.check("grid.quadrature-affine", [&](std::string& d) {
        double worst = 0.0;
        DeterministicRng rng(11);
        for (int t = 0; t < 20; ++t) {
            const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 60);
            TraitGrid g = make_trait_grid(p.theta_min, p.theta_max, n);
            const double a = rng.normal(), b = rng.normal();
            std::vector<double> f(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) f[i] = a + b * g.node(i);
            const double exact = a * g.length() +
                                 0.5 * b * (g.theta_max() * g.theta_max() -
                                            g.theta_min() * g.theta_min());
            worst = std::max(worst, std::abs(integrate_trait(f, g) - exact));
        }
        d = "max residual " + fmt(worst);
        return worst <= 1e-12;
    });

    R.check("grid.integration-by-parts", [&](std::string& d) {
        TraitGrid g = desk_trait(R.cfg_, 101);
        DeterministicRng rng(12);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            std::vector<double> f(g.size());
            for (auto& v : f) v = rng.normal();
            const auto df = second_derivative_neumann(f, g.spacing());
            double total = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                total += g.weight(i) * df[i];
                scale += g.weight(i) * std::abs(df[i]);
            }
            worst = std::max(worst, std::abs(total) / std::max(scale, 1.0));
        }
        d = "max weighted row-sum " + fmt(worst);
        return worst <= 1e-12;
    });

    R.check("grid.operator-symmetry", [&](std::string& d) {
        TraitGrid g = desk_trait(R.cfg_, 87);
        DeterministicRng rng(13);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            std::vector<double> f(g.size()), h(g.size());
            for (auto& v : f) v = rng.normal();
            for (auto& v : h) v = rng.normal();
            const auto df = second_derivative_neumann(f, g.spacing());
            const auto dh = second_derivative_neumann(h, g.spacing());
            double lhs = 0.0, rhs = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                lhs += g.weight(i) * df[i] * h[i];
                rhs += g.weight(i) * f[i] * dh[i];
                scale += g.weight(i) * std::abs(df[i] * h[i]);
            }
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(scale, 1e-300));
        }
        d = "max relative asymmetry " + fmt(worst);
        return worst <= 1e-12;
    });

    R.check("grid.refinement-order", [&](std::string& d) {
        // interior error of D on a smooth non-polynomial profile
        auto err = [&](std::size_t n) {
            TraitGrid g = make_trait_grid(p.theta_min, p.theta_max, n);
            std::vector<double> f(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(3.0 * g.node(i));
            const auto df = second_derivative_neumann(f, g.spacing());
            double e = 0.0;
            for (std::size_t i = g.size() / 4; i < 3 * g.size() / 4; ++i)
                e = std::max(e, std::abs(df[i] + 9.0 * std::sin(3.0 * g.node(i))));
            return e;
        };
        const double r1 = err(101) / err(201);
        const double r2 = err(201) / err(401);
        d = "error ratios " + fmt(r1) + ", " + fmt(r2);
        return r1 > 3.5 && r1 < 4.5 && r2 > 3.5 && r2 < 4.5;
    });
}

void spectral_checks(Runner& R) {
    if (!R.wants("spectral")) return;
    const SpectralParams sp{R.cfg_.params.alpha, R.cfg_.params.r};
    const TraitGrid grid = desk_trait(R.cfg_, 201);
    const SpeedSearch search{R.cfg_.spectral.lambda_lo, R.cfg_.spectral.lambda_hi, 1e-8};

    R.check("spectral.normalization", [&](std::string& d) {
        double worst = 0.0;
        for (double l : {0.2, 0.5, 1.0, 2.0, 5.0}) {
            for (double tau : {0.0, 0.5, 1.0}) {
                const auto sol = dispersion_c(l, tau, sp, grid);
                worst = std::max(worst,
                                 std::abs(integrate_trait(sol.Q, grid) - 1.0));
            }
        }
        d = "max |int Q - 1| = " + fmt(worst);
        return worst <= 1e-10;
    });

    R.check("spectral.positivity", [&](std::string& d) {
        double worst = 1e300;
        for (double l : {0.2, 1.0, 5.0, 15.0})
            for (double tau : {0.0, 0.5, 1.0}) {
                const auto sol = dispersion_c(l, tau, sp, grid);
                worst = std::min(worst,
                                 *std::min_element(sol.Q.begin(), sol.Q.end()));
            }
        d = "min Q = " + fmt(worst);
        return worst > 0.0;
    });

    R.check("spectral.dispersion-bounds", [&](std::string& d) {
        double slack = 1e300;
        for (double l : {0.1, 0.3, 1.0, 3.0, 10.0})
            for (double tau : {0.0, 0.5, 1.0}) {
                const auto sol = dispersion_c(l, tau, sp, grid);
                const double lc = l * sol.c;
                slack = std::min(slack, lc - (l * l * grid.theta_min() + sp.r));
                slack = std::min(slack, (l * l * grid.theta_max() + sp.r) - lc);
            }
        d = "min bound slack = " + fmt(slack);
        return slack >= -1e-9;
    });

    R.check("spectral.tau-monotone", [&](std::string& d) {
        double prev = -1e300, worst = 1e300;
        for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const double c = dispersion_c(1.0, tau, sp, grid).c;
            worst = std::min(worst, c - prev);
            prev = c;
        }
        d = "min c increment over tau = " + fmt(worst);
        return worst >= -1e-10;
    });

    const MinSpeedResult ms = minimize_speed(1.0, sp, grid, search);
    const SpectralSolution star = dispersion_c(ms.lambda_star, 1.0, sp, grid);
    const RelationResiduals rr = verify_relations(ms, star, sp, grid);

    R.check("spectral.relations.rel1", [&](std::string& d) {
        d = "R1 = " + fmt(rr.r1);
        return rr.r1 <= 1e-6;
    });
    R.check("spectral.relations.rel2", [&](std::string& d) {
        d = "R2 = " + fmt(rr.r2);
        return rr.r2 > 0.0;
    });
    R.check("spectral.relations.rel3", [&](std::string& d) {
        d = "R3 = " + fmt(rr.r3) + ", bound " + fmt(1e-5 * ms.c_star);
        return rr.r3 <= 1e-5 * ms.c_star;
    });
    R.check("spectral.relations.rel4", [&](std::string& d) {
        d = "R4 = " + fmt(rr.r4);
        return rr.r4 >= -1e-8;
    });
    R.check("spectral.relations.rel6", [&](std::string& d) {
        d = "R6 = " + fmt(rr.r6);
        return rr.r6 > 0.0;
    });

    R.check("spectral.rel1-refinement", [&](std::string& d) {
        std::vector<double> res;
        for (std::size_t n : {101u, 201u, 401u}) {
            TraitGrid g = desk_trait(R.cfg_, n);
            const auto sol = dispersion_c(1.0, 1.0, sp, g);
            MinSpeedResult dummy;
            dummy.tau = 1.0;
            dummy.c_star = sol.c;
            dummy.lambda_star = 1.0;
            dummy.Q_star = sol.Q;
            res.push_back(verify_relations(dummy, sol, sp, g).r1_oracle);
        }
        const double q1 = res[0] / res[1], q2 = res[1] / res[2];
        d = "oracle-residual ratios " + fmt(q1) + ", " + fmt(q2);
        return q1 > 3.0 && q1 < 5.5 && q2 > 3.0 && q2 < 5.5;
    });

    R.check("spectral.rel3-stationarity", [&](std::string& d) {
        SpeedSearch loose = search;
        loose.tol = 1e-6;
        const MinSpeedResult m2 = minimize_speed(1.0, sp, grid, loose);
        const double delta = 1e-5;
        const double cp = dispersion_c(m2.lambda_star + delta, 1.0, sp, grid).c;
        const double cm = dispersion_c(m2.lambda_star - delta, 1.0, sp, grid).c;
        const double fd = (cp - cm) / (2.0 * delta);
        d = "|c'(lambda*)| = " + fmt(std::abs(fd)) + ", bound " + fmt(10.0 * loose.tol);
        return std::abs(fd) <= 10.0 * loose.tol;
    });

    R.check("spectral.oracle-equivalence", [&](std::string& d) {
        TraitGrid g = desk_trait(R.cfg_, 400);
        const auto op = assemble_trait_operator(1.0, 1.0, sp, g);
        const double dense = dense_principal_eigenvalue(op, g);
        const double mine = principal_eigenpair(op, g).gamma;
        const double rel = std::abs(mine - dense) / std::abs(dense);
        d = "relative gap " + fmt(rel);
        return rel <= 1e-8;
    });

    R.check("spectral.profile-shape", [&](std::string& d) {
        const ProfileShape shape = profile_shape(ms.Q_star, star, grid);
        const double gap = std::abs(shape.theta0_empirical - ms.theta0);
        d = "increasing=" + std::string(shape.is_increasing ? "yes" : "no") +
            ", |theta0_gap| = " + fmt(gap) + " vs 2h = " + fmt(2.0 * grid.spacing());
        return shape.is_increasing && shape.crossings == 1 &&
               gap <= 2.0 * grid.spacing();
    });
}

void slab_checks(Runner& R) {
    if (!R.wants("slab")) return;
    const auto& p = R.cfg_.params;
    const SpectralParams sp{p.alpha, p.r};
    const TraitGrid strait = desk_trait(R.cfg_, 21);
    const SpeedSearch search{R.cfg_.spectral.lambda_lo, R.cfg_.spectral.lambda_hi, 1e-8};
    const MinSpeedResult ms1 = minimize_speed(1.0, sp, strait, search);
    SlabParams sparams{p.alpha, p.r, ms1.c_star, ms1.lambda_star, 1e-3};

    auto slab_grid = [&](double a) {
        return SlabGrid(a, static_cast<std::size_t>(2 * a * 4) + 1, strait);
    };

    R.check("slab.linear-max-principle", [&](std::string& d) {
        const SlabGrid g = slab_grid(10.0);
        const double lift = 1.0 / strait.length();
        Array2D zero(g.n_xi(), strait.size(), 0.0);
        const Array2D z0 = solve_linear_slab(0.0, 0.0, zero, g, sparams);
        const Array2D z1 = solve_linear_slab(1.5, 1.0, zero, g, sparams);
        const double mid = z0(g.center_index(), strait.size() / 2);
        d = "Z(0) = " + fmt(mid) + ", min " + fmt(std::min(z0.min(), z1.min())) +
            ", max-lift " + fmt(std::max(z0.max(), z1.max()) - lift);
        return mid > 0.0 && mid < lift && std::min(z0.min(), z1.min()) >= -1e-12 &&
               std::max(z0.max(), z1.max()) <= lift + 1e-12;
    });

    R.check("slab.manufactured-solution", [&](std::string& d) {
        const SlabGrid g = slab_grid(10.0);
        const double a = g.half_width(), lift = 1.0 / strait.length();
        const double c = 0.7;
        Array2D rhs(g.n_xi(), strait.size());
        for (std::size_t i = 0; i < g.n_xi(); ++i)
            for (std::size_t j = 0; j < strait.size(); ++j)
                rhs(i, j) = c * lift / (2.0 * a);   // -c d/dxi of (a-xi)/(2a|Th|)
        const Array2D z = solve_linear_slab(c, 1.0, rhs, g, sparams);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n_xi(); ++i)
            for (std::size_t j = 0; j < strait.size(); ++j)
                worst = std::max(worst,
                                 std::abs(z(i, j) - (a - g.xi(i)) / (2.0 * a) * lift));
        d = "max deviation " + fmt(worst);
        return worst <= 1e-8;
    });

    const SlabGrid g20 = slab_grid(20.0);
    const SlabSolution sol20 = solve_slab(1.0, R.cfg_.slab.epsilon, g20, sparams);

    R.check("slab.picard-nonnegativity", [&](std::string& d) {
        const Array2D z = picard_step(sol20.mu, sol20.c, 1.0, g20, sparams);
        d = "min after step " + fmt(z.min());
        return z.min() >= -1e-12;
    });

    R.check("slab.picard-fixed-point", [&](std::string& d) {
        const Array2D z = picard_step(sol20.mu, sol20.c, 1.0, g20, sparams);
        double worst = 0.0;
        for (std::size_t k = 0; k < z.flat().size(); ++k)
            worst = std::max(worst, std::abs(z.flat()[k] - sol20.mu.flat()[k]));
        d = "max |K(mu) - mu| = " + fmt(worst);
        return worst <= 1e-7;
    });

    R.check("slab.uniform-bound", [&](std::string& d) {
        std::vector<double> maxima{sol20.mu.max()};
        for (double a : {10.0, 40.0}) {
            const SlabGrid g = slab_grid(a);
            maxima.push_back(solve_slab(1.0, R.cfg_.slab.epsilon, g, sparams).mu.max());
        }
        const double lo = *std::min_element(maxima.begin(), maxima.end());
        const double hi = *std::max_element(maxima.begin(), maxima.end());
        d = "max mu range [" + fmt(lo) + ", " + fmt(hi) + "]";
        return hi / lo <= 1.05;
    });

    R.check("slab.c0-density-bound", [&](std::string& d) {
        const SlabGrid g = slab_grid(10.0);
        const SlabSolution rest = solve_slab_at_speed(0.0, 1.0, g, sparams);
        const double numax = *std::max_element(rest.nu.begin(), rest.nu.end());
        const double bound = (strait.theta_max() / strait.theta_min()) *
                             (1.0 + 10.0 * g.spacing());
        d = "max nu = " + fmt(numax) + ", bound " + fmt(bound);
        return numax <= bound;
    });

    R.check("slab.speed-ceiling", [&](std::string& d) {
        d = "c = " + fmt(sol20.c) + ", c* = " + fmt(ms1.c_star);
        return sol20.c > 0.0 && sol20.c <= ms1.c_star + 1e-3;
    });

    R.check("slab.tau0-reduction", [&](std::string& d) {
        const MinSpeedResult ms0 = minimize_speed(0.0, sp, strait, search);
        SlabParams sp0 = sparams;
        sp0.c_star = ms0.c_star;
        sp0.lambda_star = ms0.lambda_star;
        const SlabGrid g = slab_grid(10.0);
        const SlabSolution s2 = solve_slab(0.0, R.cfg_.slab.epsilon, g, sp0);
        const KppSlabSolution s1 =
            solve_kpp_slab(s2.c, g.half_width(), g.n_xi(), {p.r, p.theta_min});
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n_xi(); ++i)
            worst = std::max(worst, std::abs(s2.nu[i] - s1.nu[i]));
        d = "max |nu_2D - nu_scalar| = " + fmt(worst);
        return worst <= 1e-8;
    });

    R.check("slab.kpp-suite", [&](std::string& d) {
        const KppParams kp{p.r, p.theta_min};
        double prev = 1e300;
        bool ok = true;
        for (double c : {0.0, 1.0, 2.2}) {
            const KppSlabSolution s = solve_kpp_slab(c, 20.0, 321, kp);
            const double nu0 = s.nu[160];
            ok = ok && s.decreasing && s.nu.front() == 1.0 && s.nu.back() == 0.0;
            for (double v : s.nu) ok = ok && v >= -1e-9 && v <= 1.0 + 1e-9;
            ok = ok && nu0 <= prev + 1e-12;
            prev = nu0;
        }
        d = ok ? "nu in [0,1], decreasing in xi and in c" : "violated";
        return ok;
    });
}

void evolution_checks(Runner& R) {
    if (!R.wants("evolution")) return;
    const auto& p = R.cfg_.params;

    R.check("evolution.mass-conservation", [&](std::string& d) {
        EvolutionConfig cfg{-50.0, 50.0, 501,
                            make_trait_grid(p.theta_min, p.theta_max, 17),
                            p.alpha, 0.0, 0.02, 5.0, 0.0, {0.5}, 0.0};
        EvolutionSimulator sim(cfg);
        Array2D bump(cfg.n_x, cfg.trait.size(), 0.0);
        for (std::size_t i = 0; i < cfg.n_x; ++i) {
            const double x = -50.0 + 0.2 * static_cast<double>(i);
            const double v = std::exp(-0.1 * x * x);
            for (std::size_t j = 0; j < cfg.trait.size(); ++j) bump(i, j) = v;
        }
        sim.reset(std::move(bump));
        const double m0 = sim.total_mass();
        double worst = 0.0;
        for (int unit = 0; unit < 5; ++unit) {
            for (int k = 0; k < 50; ++k) sim.step();
            worst = std::max(worst, std::abs(sim.total_mass() - m0));
        }
        d = "max |mass - mass0| per 5 units = " + fmt(worst);
        return worst <= 1e-8 * 5.0;
    });

    R.check("evolution.nonnegativity", [&](std::string& d) {
        EvolutionConfig cfg{0.0, 60.0, 601,
                            make_trait_grid(p.theta_min, p.theta_max, 17),
                            p.alpha, p.r, 0.05, 15.0, 5.0, {0.01}, 0.0};
        EvolutionSimulator sim(cfg);
        double lowest = 0.0;
        for (int k = 0; k < 300; ++k) {
            sim.step();   // the instability detector throws below -1e-10
            lowest = std::min(lowest, sim.field().min());
        }
        d = "min value over the run = " + fmt(lowest);
        return lowest >= -1e-10;
    });

    R.check("evolution.theta-max-monotone", [&](std::string& d) {
        auto speed = [&](double tmax) {
            EvolutionConfig cfg{0.0, 120.0, 961,
                                make_trait_grid(p.theta_min, tmax, 13),
                                p.alpha, p.r, 0.05, 30.0, 8.0, {0.01}, 0.0};
            return simulate(cfg).trace.fitted_speed[0];
        };
        const double s1 = speed(p.theta_max);
        const double s2 = speed(p.theta_max + 0.5);
        d = "speed " + fmt(s1) + " -> " + fmt(s2);
        return s2 >= s1 * (1.0 - 0.02);
    });

    R.check("evolution.refinement-stability", [&](std::string& d) {
        auto speed = [&](std::size_t nx, double dt) {
            EvolutionConfig cfg{0.0, 120.0, nx,
                                make_trait_grid(p.theta_min, p.theta_max, 25),
                                p.alpha, p.r, dt, 40.0, 8.0, {0.01}, 0.0};
            return simulate(cfg).trace.fitted_speed[0];
        };
        const double coarse = speed(1201, 0.02);
        const double fine = speed(2401, 0.01);
        const double rel = std::abs(fine - coarse) / fine;
        d = "speeds " + fmt(coarse) + " vs " + fmt(fine) + ", rel gap " + fmt(rel);
        return rel < 0.01;
    });
}

void analysis_checks(Runner& R) {
    if (!R.wants("analysis") && !R.wants("appendixB")) return;
    const auto& p = R.cfg_.params;
    const double period = p.theta_max - p.theta_min;
    const std::uint64_t seed = R.cfg_.analysis.seed;

    R.check("analysis.harnack-scaling", [&](std::string& d) {
        Array2D mu(11, 7);
        DeterministicRng rng(31);
        for (auto& v : mu.flat()) v = 0.5 + rng.uniform();
        const HarnackReport a = harnack_ratios(mu);
        for (auto& v : mu.flat()) v *= 7.25;
        const HarnackReport b = harnack_ratios(mu);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.per_xi_ratio.size(); ++i)
            worst = std::max(worst, std::abs(a.per_xi_ratio[i] - b.per_xi_ratio[i]));
        d = "max ratio change under scaling = " + fmt(worst);
        return worst <= 1e-12 && a.global_ratio >= 1.0;
    });

    R.check("analysis.sobolev-triangle", [&](std::string& d) {
        DeterministicRng rng(32);
        double worst = -1e300;
        for (int t = 0; t < 25; ++t) {
            const auto f = TrigPolynomial::random(rng.next_u64(), 16, period);
            const auto g = TrigPolynomial::random(rng.next_u64(), 16, period);
            std::vector<std::complex<double>> sum(2 * 16 + 1);
            for (int k = -16; k <= 16; ++k)
                sum[static_cast<std::size_t>(k + 16)] =
                    f.coefficient(k) + g.coefficient(k);
            const double lhs = sobolev_norms(TrigPolynomial(sum, period)).h32;
            const double rhs =
                sobolev_norms(f).h32 + sobolev_norms(g).h32;
            worst = std::max(worst, lhs - rhs);
        }
        d = "max (|f+g| - |f| - |g|) = " + fmt(worst);
        return worst <= 1e-10;
    });

    R.check("analysis.interpolation-scale", [&](std::string& d) {
        const double C = default_interpolation_constant();
        // branch 1: a rough random polynomial
        const auto f = TrigPolynomial::random(41, 64, period);
        // branch 2: a gentle near-constant signal
        std::vector<std::complex<double>> cc(3);
        cc[1] = 5.0;
        cc[2] = {1e-4, 5e-5};
        const TrigPolynomial g(cc, period);
        bool ok = true;
        std::ostringstream os;
        for (const auto* poly : {&f, &g}) {
            const InterpolationCheck base = interpolation_check(*poly, C);
            std::vector<std::complex<double>> scaled;
            for (int k = -poly->k_max(); k <= poly->k_max(); ++k)
                scaled.push_back(3.7 * poly->coefficient(k));
            const InterpolationCheck two =
                interpolation_check(TrigPolynomial(scaled, poly->period()), C);
            ok = ok && two.branch == base.branch &&
                 std::abs(two.slack - base.slack) <= 1e-9 * base.slack;
            os << "branch " << base.branch << " slack drift "
               << fmt(std::abs(two.slack - base.slack)) << "; ";
        }
        d = os.str();
        return ok;
    });

    R.check("analysis.m-scan-recheck", [&](std::string& d) {
        const SpectralParams sp{p.alpha, p.r};
        const TraitGrid strait = desk_trait(R.cfg_, 21);
        const SpeedSearch search{R.cfg_.spectral.lambda_lo, R.cfg_.spectral.lambda_hi, 1e-8};
        const MinSpeedResult ms = minimize_speed(1.0, sp, strait, search);
        SlabParams sparams{p.alpha, p.r, ms.c_star, ms.lambda_star, 1e-3};
        const SlabGrid g(10.0, 81, strait);
        std::vector<SlabSolution> seq;
        seq.push_back(solve_slab(1.0, R.cfg_.slab.epsilon, g, sparams));
        const WaveLimitReport rep = wave_limit_checks(seq, ms);
        double m2 = 1e300;
        for (std::size_t j = 0; j < strait.size(); ++j)
            for (std::size_t i = g.center_index() + 1; i-- > 0;)
                m2 = std::min(m2, seq[0].mu(i, j) / ms.Q_star[j]);
        d = "m = " + fmt(rep.m_lower) + ", rescan " + fmt(m2);
        return rep.m_lower == m2 && rep.m_lower > 0.0;
    });

    R.check("appendixB.log-holder", [&](std::string& d) {
        DeterministicRng master(seed);
        double worst = 0.0;
        const int n_polys = R.cfg_.analysis.n_polys;
        for (int i = 0; i < n_polys; ++i) {
            const auto g =
                TrigPolynomial::random(master.next_u64(), R.cfg_.analysis.k_max, period);
            const HolderCheck chk = log_holder_check(g, seed ^ 0xABCDEFull, 100);
            worst = std::max(worst, chk.worst_ratio);
        }
        d = "worst ratio " + fmt(worst) + " over " + std::to_string(n_polys) +
            " polynomials x 100 pairs";
        return worst <= 1.0;
    });

    R.check("appendixB.interpolation", [&](std::string& d) {
        const double C = default_interpolation_constant();
        DeterministicRng master(seed);
        bool all = true;
        double min_slack = 1e300;
        for (int i = 0; i < R.cfg_.analysis.n_polys; ++i) {
            const auto g =
                TrigPolynomial::random(master.next_u64(), R.cfg_.analysis.k_max, period);
            const InterpolationCheck chk = interpolation_check(g, C);
            all = all && chk.pass;
            min_slack = std::min(min_slack, chk.slack);
        }
        d = "C = " + fmt(C) + ", min slack " + fmt(min_slack);
        return all;
    });
}

} // namespace

VerifyReport run_verify(const RunConfig& config, const std::string& only,
                        const std::string& inject_fault) {
    Runner R(config, only, inject_fault);
    grid_checks(R);
    spectral_checks(R);
    slab_checks(R);
    evolution_checks(R);
    analysis_checks(R);
    return R.finish();
}

} // namespace toadwave
