#include "toadwave/evolution.hpp"

#include "toadwave/errors.hpp"
#include "toadwave/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace toadwave {

void validate_evolution_config(const EvolutionConfig& config) {
    if (!(config.x_max > config.x_min))
        throw std::invalid_argument("evolution config: x_max must exceed x_min");
    if (config.n_x < 3)
        throw std::invalid_argument("evolution config: need at least 3 space nodes");
    if (!(config.alpha > 0.0))
        throw std::invalid_argument("evolution config: alpha must be positive");
    if (!(config.r >= 0.0))
        throw std::invalid_argument("evolution config: r must be nonnegative");
    if (!(config.dt > 0.0))
        throw std::invalid_argument("evolution config: dt must be positive");
    if (config.r > 0.0 && !(config.t_end >= 10.0 / config.r))
        throw std::invalid_argument(
            "evolution config: t_end below 10/r, too short for front formation");
    if (config.c_star_estimate > 0.0 &&
        !(config.x_max >= config.c_star_estimate * config.t_end * 1.2))
        throw std::invalid_argument(
            "evolution config: x window too small for the expected front travel");
    if (config.thresholds.empty())
        throw std::invalid_argument("evolution config: need at least one threshold");
    for (double t : config.thresholds)
        if (!(t > 0.0 && t < 1.0))
            throw std::invalid_argument("evolution config: thresholds must lie in (0, 1)");
}

EvolutionSimulator::EvolutionSimulator(EvolutionConfig config)
    : config_(std::move(config)) {
    validate_evolution_config(config_);
    const std::size_t nx = config_.n_x;
    x_.resize(nx);
    hx_ = (config_.x_max - config_.x_min) / static_cast<double>(nx - 1);
    for (std::size_t i = 0; i < nx; ++i)
        x_[i] = config_.x_min + hx_ * static_cast<double>(i);

    const auto& tr = config_.trait;
    const std::size_t nth = tr.size();

    // trait sweep: I - dt alpha D_theta with mirror closure, shared by all
    // columns; past this stiffness the solve equals the projection onto the
    // trait mean to double precision, so it is applied as one
    {
        const double k = config_.dt * config_.alpha / (tr.spacing() * tr.spacing());
        theta_projection_ = k > 1e12;
        if (!theta_projection_) {
            std::vector<double> lo(nth, -k), di(nth, 1.0 + 2.0 * k), up(nth, -k);
            lo[0] = 0.0;
            up[0] = -2.0 * k;
            up[nth - 1] = 0.0;
            lo[nth - 1] = -2.0 * k;
            theta_solve_.factor(lo, di, up);
        }
    }

    // space sweeps: I - dt theta_j D_xx, boundary rows pinned
    x_solves_.resize(nth);
    for (std::size_t j = 0; j < nth; ++j) {
        const double k = config_.dt * tr.node(j) / (hx_ * hx_);
        std::vector<double> lo(nx, -k), di(nx, 1.0 + 2.0 * k), up(nx, -k);
        lo[0] = up[0] = 0.0;
        di[0] = 1.0;
        lo[nx - 1] = up[nx - 1] = 0.0;
        di[nx - 1] = 1.0;
        x_solves_[j].factor(lo, di, up);
    }

    Array2D init(nx, nth, 0.0);
    const double lift = 1.0 / tr.length();
    for (std::size_t i = 0; i < nx; ++i)
        if (x_[i] <= config_.initial_mass_width)
            for (std::size_t j = 0; j < nth; ++j) init(i, j) = lift;
    reset(std::move(init));
}

void EvolutionSimulator::reset(Array2D initial) {
    if (initial.rows() != config_.n_x || initial.cols() != config_.trait.size())
        throw std::invalid_argument("evolution reset: field does not match the grids");
    field_ = std::move(initial);
    left_pin_.assign(field_.row(0).begin(), field_.row(0).end());
    right_pin_.assign(field_.row(config_.n_x - 1).begin(),
                      field_.row(config_.n_x - 1).end());
    time_ = 0.0;
    step_index_ = 0;
}

std::vector<double> EvolutionSimulator::density() const {
    return trait_marginal(field_, config_.trait);
}

double EvolutionSimulator::total_mass() const {
    const std::vector<double> rho = density();
    double m = 0.5 * (rho.front() + rho.back());
    for (std::size_t i = 1; i + 1 < rho.size(); ++i) m += rho[i];
    return m * hx_;
}

void EvolutionSimulator::step() {
    const std::size_t nx = config_.n_x;
    const std::size_t nth = config_.trait.size();
    const double dt = config_.dt;
    const double r = config_.r;
    const double inv_len = 1.0 / config_.trait.length();
    const std::vector<double> rho = density();

    // explicit reaction with rho frozen at the step start, then the trait
    // sweep; the trait mean is split off first so the solve stays accurate
    // when the trait interval is tiny (near-constant diffusivity control)
    parallel_for(nx, [&](std::size_t i) {
        auto row = field_.row(i);
        const double growth = 1.0 + dt * r * (1.0 - rho[i]);
        double mean = 0.0;
        for (std::size_t j = 0; j < nth; ++j) {
            row[j] *= growth;
            mean += config_.trait.weight(j) * row[j];
        }
        mean *= inv_len;
        if (theta_projection_) {
            for (std::size_t j = 0; j < nth; ++j) row[j] = mean;
        } else {
            for (std::size_t j = 0; j < nth; ++j) row[j] -= mean;
            theta_solve_.solve(row);
            for (std::size_t j = 0; j < nth; ++j) row[j] += mean;
        }
    });

    // space sweep, one tridiagonal per trait node, boundary rows pinned
    parallel_for(nth, [&](std::size_t j) {
        std::vector<double> col(nx);
        for (std::size_t i = 0; i < nx; ++i) col[i] = field_(i, j);
        col[0] = left_pin_[j];
        col[nx - 1] = right_pin_[j];
        x_solves_[j].solve(col);
        for (std::size_t i = 0; i < nx; ++i) field_(i, j) = col[i];
    });

    ++step_index_;
    time_ = static_cast<double>(step_index_) * dt;

    for (double v : field_.flat()) {
        if (!std::isfinite(v) || v < -1e-10)
            throw SolverError("evolution step " + std::to_string(step_index_) +
                                  ": instability detected (negative or non-finite value)",
                              static_cast<int>(step_index_), v);
    }
}

double front_position(std::span<const double> rho, std::span<const double> x,
                      double threshold) {
    for (std::size_t i = rho.size(); i-- > 0;) {
        if (rho[i] >= threshold) {
            if (i + 1 < rho.size() && rho[i] != rho[i + 1]) {
                const double t = (rho[i] - threshold) / (rho[i] - rho[i + 1]);
                return x[i] + t * (x[i + 1] - x[i]);
            }
            return x[i];
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

double lsq_slope(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double d = static_cast<double>(n) * stt - st * st;
    return (static_cast<double>(n) * sty - st * sy) / d;
}

} // namespace

SimulationResult simulate(const EvolutionConfig& config) {
    EvolutionSimulator sim(config);
    const long steps_per_unit =
        std::max<long>(1, static_cast<long>(std::llround(1.0 / config.dt)));
    const long n_steps = static_cast<long>(std::llround(config.t_end / config.dt));
    const double guard_x =
        sim.x_nodes()[config.n_x - 1] - 10.0 * sim.x_spacing();

    SimulationResult out;
    out.trace.thresholds = config.thresholds;
    out.trace.positions.resize(config.thresholds.size());
    out.mass_times.push_back(0.0);
    out.mass.push_back(sim.total_mass());

    for (long k = 1; k <= n_steps; ++k) {
        sim.step();
        if (k % steps_per_unit == 0 || k == n_steps) {
            const std::vector<double> rho = sim.density();
            out.trace.times.push_back(sim.time());
            for (std::size_t q = 0; q < config.thresholds.size(); ++q) {
                const double p =
                    front_position(rho, sim.x_nodes(), config.thresholds[q]);
                out.trace.positions[q].push_back(p);
                if (std::isfinite(p) && p > guard_x)
                    throw BracketError(
                        "simulate: front reached the window edge at t = " +
                        std::to_string(sim.time()) + "; widen the x window");
            }
            out.mass_times.push_back(sim.time());
            out.mass.push_back(sim.total_mass());
        }
    }

    out.trace.fit_t_lo = 0.5 * config.t_end;
    out.trace.fit_t_hi = config.t_end;
    out.trace.fitted_speed.assign(config.thresholds.size(), 0.0);
    for (std::size_t q = 0; q < config.thresholds.size(); ++q) {
        std::vector<double> ts, ps;
        for (std::size_t k = 0; k < out.trace.times.size(); ++k) {
            if (out.trace.times[k] >= out.trace.fit_t_lo &&
                std::isfinite(out.trace.positions[q][k])) {
                ts.push_back(out.trace.times[k]);
                ps.push_back(out.trace.positions[q][k]);
            }
        }
        if (ts.size() < 3)
            throw SolverError("simulate: not enough front samples to fit a speed",
                              static_cast<int>(ts.size()), 0.0);
        out.trace.fitted_speed[q] = lsq_slope(ts, ps);
    }

    double drift = 0.0;
    for (std::size_t k = 1; k < out.mass.size(); ++k) {
        const double dtk = out.mass_times[k] - out.mass_times[k - 1];
        if (dtk > 0.0)
            drift = std::max(drift, std::abs(out.mass[k] - out.mass[k - 1]) / dtk);
    }
    out.mass_drift_per_unit_time = drift;

    out.x_nodes = sim.x_nodes();
    out.final_field = sim.field();
    return out;
}

EdgeReport edge_profile_check(const Array2D& field, std::span<const double> x,
                              const TraitGrid& trait,
                              const MinSpeedResult& min_speed) {
    std::vector<double> rho(field.rows());
    for (std::size_t i = 0; i < field.rows(); ++i)
        rho[i] = integrate_trait(field.row(i), trait);

    EdgeReport rep;
    rep.x_edge = front_position(rho, x, 0.01);
    if (!std::isfinite(rep.x_edge))
        throw std::invalid_argument("edge_profile_check: density never reaches 0.01");

    // nearest node to the crossing
    std::size_t idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(x[i] - rep.x_edge);
        if (d < best) {
            best = d;
            idx = i;
        }
    }

    rep.slice.assign(field.row(idx).begin(), field.row(idx).end());
    const double mass = integrate_trait(rep.slice, trait);
    for (auto& v : rep.slice) v /= mass;

    double qmax = 0.0;
    for (double q : min_speed.Q_star) qmax = std::max(qmax, std::abs(q));
    for (std::size_t j = 0; j < trait.size(); ++j)
        rep.slice_distance_abs =
            std::max(rep.slice_distance_abs, std::abs(rep.slice[j] - min_speed.Q_star[j]));
    rep.slice_distance_rel = rep.slice_distance_abs / qmax;

    // decay rate of log rho over the window rho in [1e-6, 1e-3] ahead of the edge
    std::vector<double> xs, ls;
    for (std::size_t i = idx; i < x.size(); ++i) {
        if (rho[i] < 1e-6) break;
        if (rho[i] <= 1e-3) {
            xs.push_back(x[i]);
            ls.push_back(std::log(rho[i]));
        }
    }
    if (xs.size() < 5)
        throw std::invalid_argument(
            "edge_profile_check: decay window too short; widen the x window");
    rep.decay_rate = -lsq_slope(xs, ls);
    rep.decay_rel_err = rep.decay_rate / min_speed.lambda_star - 1.0;
    return rep;
}

} // namespace toadwave
