#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace toadwave {

inline constexpr const char* kSchemaVersion = "toadwave/1";

struct RunConfig {
    struct Physical {
        double alpha = 1.0;
        double r = 1.0;
        double theta_min = 1.0;
        double theta_max = 2.0;
    } params;

    struct Spectral {
        std::size_t n_theta = 400;
        double lambda_lo = 0.05;
        double lambda_hi = 20.0;
        double tol = 1e-8;
    } spectral;

    struct Slab {
        std::vector<double> a_list = {20.0, 40.0, 80.0};
        double tau = 1.0;
        double epsilon = 0.01;
        std::size_t n_xi_per_unit = 8;
        std::size_t n_theta = 41;
    } slab;

    struct Evolution {
        double x_min = 0.0;
        double x_max = 200.0;
        std::size_t n_x = 2001;
        std::size_t n_theta = 49;
        double dt = 0.02;
        double t_end = 60.0;
        double initial_mass_width = 10.0;
        std::vector<double> thresholds = {0.1, 0.01, 0.001};
    } evolution;

    struct Analysis {
        std::uint64_t seed = 20240817;
        int n_polys = 1000;
        int k_max = 64;
    } analysis;

    std::string output_dir = "out";
};

/// Throws invalid_argument naming the violated invariant.
void validate_config(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& config);

/// Report skeleton carrying the schema version and the resolved config.
nlohmann::json make_report(const RunConfig& config);

} // namespace toadwave
