#pragma once

#include "toadwave/grid.hpp"
#include "toadwave/spectral.hpp"
#include "toadwave/tridiag.hpp"

#include <cstddef>
#include <vector>

namespace toadwave {

struct EvolutionConfig {
    double x_min = 0.0;
    double x_max = 200.0;
    std::size_t n_x = 2001;
    TraitGrid trait;
    double alpha = 1.0;
    double r = 1.0;
    double dt = 0.02;
    double t_end = 60.0;
    double initial_mass_width = 10.0;
    std::vector<double> thresholds = {0.1, 0.01, 0.001};
    double c_star_estimate = 0.0;   // enables the window-size check when > 0
};

/// Throws invalid_argument naming the violated constraint.
void validate_evolution_config(const EvolutionConfig& config);

struct FrontTrace {
    std::vector<double> times;
    std::vector<double> thresholds;
    std::vector<std::vector<double>> positions;   // positions[k][t] for thresholds[k]
    std::vector<double> fitted_speed;             // least-squares slope per threshold
    double fit_t_lo = 0.0;
    double fit_t_hi = 0.0;
};

/// IMEX integrator for the space-trait model: reaction explicit with the
/// density frozen at the step start, diffusion by dimensional splitting (trait
/// sweep with Neumann mirror closure, then space sweep with the boundary rows
/// pinned to the initial data's far-field values).
class EvolutionSimulator {
public:
    explicit EvolutionSimulator(EvolutionConfig config);

    // Replace the state (tests drive custom fields through the same stepper);
    // boundary pins are re-read from the supplied field.
    void reset(Array2D initial);

    void step();

    double time() const { return time_; }
    long step_index() const { return step_index_; }
    const EvolutionConfig& config() const { return config_; }
    const Array2D& field() const { return field_; }
    const std::vector<double>& x_nodes() const { return x_; }
    double x_spacing() const { return hx_; }

    std::vector<double> density() const;   // rho(x) = integral over traits
    double total_mass() const;

private:
    EvolutionConfig config_;
    std::vector<double> x_;
    double hx_ = 0.0;
    Array2D field_;
    std::vector<double> left_pin_, right_pin_;
    bool theta_projection_ = false;   // stiff limit: sweep = mean projection
    TridiagonalFactor theta_solve_;
    std::vector<TridiagonalFactor> x_solves_;
    double time_ = 0.0;
    long step_index_ = 0;
};

/// Rightmost crossing of the threshold, linearly interpolated; NaN when the
/// density never reaches it.
double front_position(std::span<const double> rho, std::span<const double> x,
                      double threshold);

struct SimulationResult {
    FrontTrace trace;
    Array2D final_field;
    std::vector<double> x_nodes;
    std::vector<double> mass_times;
    std::vector<double> mass;
    double mass_drift_per_unit_time = 0.0;
};

/// Initial data 1/|Theta| x indicator(x <= initial_mass_width), evolved to
/// t_end with front positions recorded every unit of time. Throws
/// BracketError when the front reaches within 10 nodes of x_max.
SimulationResult simulate(const EvolutionConfig& config);

struct EdgeReport {
    double x_edge = 0.0;
    double slice_distance_abs = 0.0;   // max-norm distance of the unit-integral slice to Q*
    double slice_distance_rel = 0.0;   // same, relative to max Q*
    double decay_rate = 0.0;           // log-slope of rho ahead of the front
    double decay_rel_err = 0.0;        // against lambda*
    std::vector<double> slice;
};

/// Trait structure at the rho = 0.01 front location against the spectral edge
/// profile, plus the measured spatial decay rate against lambda*.
EdgeReport edge_profile_check(const Array2D& field, std::span<const double> x,
                              const TraitGrid& trait, const MinSpeedResult& min_speed);

} // namespace toadwave
