#include "toadwave/analysis.hpp"
#include "toadwave/config.hpp"
#include "toadwave/errors.hpp"
#include "toadwave/evolution.hpp"
#include "toadwave/io.hpp"
#include "toadwave/slab.hpp"
#include "toadwave/spectral.hpp"
#include "toadwave/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace toadwave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBracket = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerifyFailed = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    double tau = -1.0;          // < 0 means "use the config value"
    std::string only;
    std::string inject_fault;
};

RunConfig resolve_config(const CliOptions& opt) {
    RunConfig cfg;
    if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.tau >= 0.0) cfg.slab.tau = opt.tau;
    validate_config(cfg);
    fs::create_directories(cfg.output_dir);
    return cfg;
}

TraitGrid spectral_grid(const RunConfig& cfg) {
    return make_trait_grid(cfg.params.theta_min, cfg.params.theta_max,
                           cfg.spectral.n_theta);
}

json residuals_to_json(const RelationResiduals& r) {
    return json{{"R1", r.r1},      {"R1_oracle", r.r1_oracle}, {"R2", r.r2},
                {"R3", r.r3},      {"R4", r.r4},               {"R6", r.r6}};
}

int cmd_spectral(const CliOptions& opt) {
    const RunConfig cfg = resolve_config(opt);
    const SpectralParams params{cfg.params.alpha, cfg.params.r};
    const TraitGrid grid = spectral_grid(cfg);
    const double tau = opt.tau >= 0.0 ? opt.tau : cfg.slab.tau;
    const SpeedSearch search{cfg.spectral.lambda_lo, cfg.spectral.lambda_hi,
                             cfg.spectral.tol};

    // dispersion curve over the scan window
    const std::vector<std::string> cols = {"lambda", "gamma", "c"};
    CsvBuilder csv(cols);
    const double lr = std::log(search.lambda_hi / search.lambda_lo);
    for (int i = 0; i < 64; ++i) {
        const double l = search.lambda_lo * std::exp(lr * i / 63.0);
        const SpectralSolution s = dispersion_c(l, tau, params, grid);
        const double row[] = {s.lambda, s.gamma, s.c};
        csv.add_row(row);
    }
    write_text_file(fs::path(cfg.output_dir) / "dispersion.csv", csv.str());

    const MinSpeedResult ms = minimize_speed(tau, params, grid, search);
    json rep = make_report(cfg);
    rep["tau"] = tau;
    rep["c_star"] = ms.c_star;
    rep["lambda_star"] = ms.lambda_star;
    rep["mean_trait"] = ms.mean_trait;
    rep["theta0"] = ms.theta0;
    rep["residuals"] = residuals_to_json(ms.residuals);
    json minima = json::array();
    for (const auto& m : ms.minima) minima.push_back({{"lambda", m.lambda}, {"c", m.c}});
    rep["minima"] = minima;
    rep["params"] = {{"alpha", cfg.params.alpha},
                     {"r", cfg.params.r},
                     {"theta_min", cfg.params.theta_min},
                     {"theta_max", cfg.params.theta_max}};
    write_text_file(fs::path(cfg.output_dir) / "minspeed.json", rep.dump(2) + "\n");
    std::cout << "c* = " << format_double(ms.c_star)
              << ", lambda* = " << format_double(ms.lambda_star) << "\n";
    return kExitOk;
}

int cmd_slab(const CliOptions& opt) {
    const RunConfig cfg = resolve_config(opt);
    const SpectralParams params{cfg.params.alpha, cfg.params.r};
    const double tau = opt.tau >= 0.0 ? opt.tau : cfg.slab.tau;
    const SpeedSearch search{cfg.spectral.lambda_lo, cfg.spectral.lambda_hi,
                             cfg.spectral.tol};
    const MinSpeedResult ms = minimize_speed(tau, params, spectral_grid(cfg), search);
    const TraitGrid strait = make_trait_grid(cfg.params.theta_min,
                                             cfg.params.theta_max, cfg.slab.n_theta);
    const MinSpeedResult ms_slabgrid = minimize_speed(tau, params, strait, search);
    const SlabParams sparams{cfg.params.alpha, cfg.params.r, ms.c_star,
                             ms.lambda_star, 1e-3};

    std::vector<double> a_sorted = cfg.slab.a_list;
    std::sort(a_sorted.begin(), a_sorted.end());
    std::vector<SlabSolution> solutions;
    json conv = json::array();
    for (double a : a_sorted) {
        std::size_t n_xi =
            static_cast<std::size_t>(std::llround(2.0 * a * cfg.slab.n_xi_per_unit)) + 1;
        if (n_xi % 2 == 0) ++n_xi;
        const SlabGrid grid(a, n_xi, strait);
        SlabSolution sol = solve_slab(tau, cfg.slab.epsilon, grid, sparams);

        const std::string tag = "slab_a" + format_double(a);
        json hdr = make_report(cfg);
        hdr["a"] = a;
        hdr["tau"] = tau;
        hdr["epsilon"] = sol.epsilon;
        hdr["c"] = sol.c;
        hdr["iterations"] = sol.iterations;
        hdr["residual"] = sol.residual;
        write_text_file(fs::path(cfg.output_dir) / (tag + ".json"), hdr.dump(2) + "\n");

        const std::vector<std::string> mu_cols = {"xi", "theta", "mu"};
        CsvBuilder mu_csv(mu_cols);
        for (std::size_t i = 0; i < grid.n_xi(); ++i)
            for (std::size_t j = 0; j < strait.size(); ++j) {
                const double row[] = {grid.xi(i), strait.node(j), sol.mu(i, j)};
                mu_csv.add_row(row);
            }
        write_text_file(fs::path(cfg.output_dir) / (tag + "_mu.csv"), mu_csv.str());

        const std::vector<std::string> nu_cols = {"xi", "nu"};
        CsvBuilder nu_csv(nu_cols);
        for (std::size_t i = 0; i < grid.n_xi(); ++i) {
            const double row[] = {grid.xi(i), sol.nu[i]};
            nu_csv.add_row(row);
        }
        write_text_file(fs::path(cfg.output_dir) / (tag + "_nu.csv"), nu_csv.str());

        conv.push_back({{"a", a}, {"c", sol.c}, {"gap_to_c_star", std::abs(sol.c - ms.c_star)}});
        std::cout << "a = " << format_double(a) << ": c = " << format_double(sol.c)
                  << "\n";
        solutions.push_back(std::move(sol));
    }

    json rep = make_report(cfg);
    rep["tau"] = tau;
    rep["c_star"] = ms.c_star;
    rep["lambda_star"] = ms.lambda_star;
    rep["speeds"] = conv;
    if (solutions.size() >= 2) {
        const WaveLimitReport wl = wave_limit_checks(solutions, ms_slabgrid);
        rep["limits"] = {{"gap_decreasing", wl.gap_decreasing},
                         {"extrapolated_c", wl.extrapolated_c},
                         {"m_lower", wl.m_lower},
                         {"nu_far", wl.nu_far},
                         {"far_bound", wl.far_bound},
                         {"decay_rate", wl.decay_rate},
                         {"decay_rel_err", wl.decay_rel_err}};
    }
    write_text_file(fs::path(cfg.output_dir) / "convergence.json", rep.dump(2) + "\n");
    return kExitOk;
}

int cmd_evolve(const CliOptions& opt) {
    const RunConfig cfg = resolve_config(opt);
    const SpectralParams params{cfg.params.alpha, cfg.params.r};
    const TraitGrid etrait = make_trait_grid(cfg.params.theta_min, cfg.params.theta_max,
                                             cfg.evolution.n_theta);
    const SpeedSearch search{cfg.spectral.lambda_lo, cfg.spectral.lambda_hi,
                             cfg.spectral.tol};
    // the conservative regime (r = 0) has no selected speed to compare against
    MinSpeedResult ms;
    if (cfg.params.r > 0.0) ms = minimize_speed(1.0, params, etrait, search);

    EvolutionConfig ecfg{cfg.evolution.x_min,
                         cfg.evolution.x_max,
                         cfg.evolution.n_x,
                         etrait,
                         cfg.params.alpha,
                         cfg.params.r,
                         cfg.evolution.dt,
                         cfg.evolution.t_end,
                         cfg.evolution.initial_mass_width,
                         cfg.evolution.thresholds,
                         ms.c_star};
    const SimulationResult sim = simulate(ecfg);

    const std::vector<std::string> front_cols = {"t", "threshold", "position"};
    CsvBuilder front_csv(front_cols);
    for (std::size_t q = 0; q < sim.trace.thresholds.size(); ++q)
        for (std::size_t k = 0; k < sim.trace.times.size(); ++k) {
            const double row[] = {sim.trace.times[k], sim.trace.thresholds[q],
                                  sim.trace.positions[q][k]};
            front_csv.add_row(row);
        }
    write_text_file(fs::path(cfg.output_dir) / "front_trace.csv", front_csv.str());

    const std::vector<std::string> field_cols = {"x", "theta", "n"};
    CsvBuilder field_csv(field_cols);
    for (std::size_t i = 0; i < sim.x_nodes.size(); ++i)
        for (std::size_t j = 0; j < etrait.size(); ++j) {
            const double row[] = {sim.x_nodes[i], etrait.node(j),
                                  sim.final_field(i, j)};
            field_csv.add_row(row);
        }
    write_text_file(fs::path(cfg.output_dir) / "final_field.csv", field_csv.str());

    json rep = make_report(cfg);
    rep["c_star"] = ms.c_star;
    rep["lambda_star"] = ms.lambda_star;
    json speeds = json::array();
    for (std::size_t q = 0; q < sim.trace.thresholds.size(); ++q) {
        const double s = sim.trace.fitted_speed[q];
        speeds.push_back({{"threshold", sim.trace.thresholds[q]},
                          {"fitted_speed", s},
                          {"rel_err_vs_c_star", s / ms.c_star - 1.0}});
    }
    rep["fitted_speeds"] = speeds;
    rep["fit_window"] = {sim.trace.fit_t_lo, sim.trace.fit_t_hi};
    rep["mass_drift_per_unit_time"] = sim.mass_drift_per_unit_time;
    if (cfg.params.r > 0.0) {
        const EdgeReport edge =
            edge_profile_check(sim.final_field, sim.x_nodes, etrait, ms);
        rep["edge"] = {{"x_edge", edge.x_edge},
                       {"slice_distance_abs", edge.slice_distance_abs},
                       {"slice_distance_rel", edge.slice_distance_rel},
                       {"decay_rate", edge.decay_rate},
                       {"decay_rel_err", edge.decay_rel_err}};
    }
    write_text_file(fs::path(cfg.output_dir) / "evolve_summary.json", rep.dump(2) + "\n");
    for (std::size_t q = 0; q < sim.trace.thresholds.size(); ++q)
        std::cout << "threshold " << format_double(sim.trace.thresholds[q])
                  << ": fitted speed " << format_double(sim.trace.fitted_speed[q])
                  << " (c* = " << format_double(ms.c_star) << ")\n";
    return kExitOk;
}

int cmd_verify(const CliOptions& opt) {
    const RunConfig cfg = resolve_config(opt);
    const VerifyReport rep = run_verify(cfg, opt.only, opt.inject_fault);
    json jrep = make_report(cfg);
    json checks = json::array();
    for (const CheckResult& c : rep.checks) {
        checks.push_back({{"id", c.id}, {"pass", c.pass}, {"detail", c.detail}});
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << " -- " << c.detail
                  << "\n";
    }
    jrep["checks"] = checks;
    jrep["all_passed"] = rep.all_passed;
    write_text_file(fs::path(cfg.output_dir) / "verify.json", jrep.dump(2) + "\n");
    if (!rep.all_passed) {
        std::cout << "failed checks:";
        for (const CheckResult& c : rep.checks)
            if (!c.pass) std::cout << " " << c.id;
        std::cout << "\n";
        return kExitVerifyFailed;
    }
    std::cout << rep.checks.size() << " checks passed\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"travelling-wave laboratory for the trait-structured invasion model"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON configuration file");
    app.add_option("--out", opt.out_dir, "output directory (overrides the config)");

    auto* spectral = app.add_subcommand("spectral", "dispersion curve and minimal speed");
    spectral->fallthrough();
    spectral->add_option("--tau", opt.tau, "diffusivity homotopy parameter");
    auto* slab = app.add_subcommand("slab", "travelling-wave slab solves over a_list");
    slab->fallthrough();
    slab->add_option("--tau", opt.tau, "diffusivity homotopy parameter");
    auto* evolve = app.add_subcommand("evolve", "time-dependent simulation and front speed");
    evolve->fallthrough();
    auto* verify = app.add_subcommand("verify", "run the module invariant suites");
    verify->fallthrough();
    verify->add_option("--only", opt.only,
                       "restrict to one suite (grid, spectral, slab, evolution, "
                       "analysis, appendixB)");
    verify->add_option("--inject-fault", opt.inject_fault,
                       "negate the named check (harness self-test)")
        ->group("");   // hidden

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectral->parsed()) return cmd_spectral(opt);
        if (slab->parsed()) return cmd_slab(opt);
        if (evolve->parsed()) return cmd_evolve(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBracket;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
