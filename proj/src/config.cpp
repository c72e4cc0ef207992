#include "toadwave/config.hpp"

#include <fstream>
#include <stdexcept>

namespace toadwave {

using nlohmann::json;

void validate_config(const RunConfig& c) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (!(c.params.alpha > 0.0)) fail("params.alpha must be positive");
    if (!(c.params.r >= 0.0)) fail("params.r must be nonnegative");
    if (!(c.params.theta_min > 0.0)) fail("params.theta_min must be positive");
    if (!(c.params.theta_min < c.params.theta_max))
        fail("params.theta_min must be below params.theta_max");
    if (c.spectral.n_theta < 3) fail("spectral.n_theta must be at least 3");
    if (!(c.spectral.lambda_lo > 0.0 && c.spectral.lambda_lo < c.spectral.lambda_hi))
        fail("spectral lambda window must satisfy 0 < lambda_lo < lambda_hi");
    if (!(c.spectral.tol > 0.0)) fail("spectral.tol must be positive");
    if (c.slab.a_list.empty()) fail("slab.a_list must not be empty");
    for (double a : c.slab.a_list)
        if (!(a > 0.0)) fail("slab.a_list entries must be positive");
    if (!(c.slab.tau >= 0.0 && c.slab.tau <= 1.0)) fail("slab.tau must lie in [0, 1]");
    if (!(c.slab.epsilon > 0.0 && c.slab.epsilon <= 0.1))
        fail("slab.epsilon must lie in (0, 0.1]");
    if (c.slab.n_xi_per_unit < 1) fail("slab.n_xi_per_unit must be at least 1");
    if (c.slab.n_theta < 3) fail("slab.n_theta must be at least 3");
    if (!(c.evolution.x_max > c.evolution.x_min)) fail("evolution x window is empty");
    if (c.evolution.n_x < 3) fail("evolution.n_x must be at least 3");
    if (c.evolution.n_theta < 3) fail("evolution.n_theta must be at least 3");
    if (!(c.evolution.dt > 0.0)) fail("evolution.dt must be positive");
    if (!(c.evolution.t_end > 0.0)) fail("evolution.t_end must be positive");
    if (c.evolution.thresholds.empty()) fail("evolution.thresholds must not be empty");
    for (double t : c.evolution.thresholds)
        if (!(t > 0.0 && t < 1.0)) fail("evolution.thresholds must lie in (0, 1)");
    if (c.analysis.n_polys < 1) fail("analysis.n_polys must be positive");
    if (c.analysis.k_max < 1) fail("analysis.k_max must be positive");
    if (c.output_dir.empty()) fail("output_dir must not be empty");
}

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& target) {
    if (j.contains(key)) j.at(key).get_to(target);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

} // namespace

RunConfig config_from_json(const json& j) {
    RunConfig c;
    reject_unknown(j, {"params", "spectral", "slab", "evolution", "analysis", "output_dir"},
                   "the top level");
    if (j.contains("params")) {
        const auto& p = j.at("params");
        reject_unknown(p, {"alpha", "r", "theta_min", "theta_max"}, "params");
        read_into(p, "alpha", c.params.alpha);
        read_into(p, "r", c.params.r);
        read_into(p, "theta_min", c.params.theta_min);
        read_into(p, "theta_max", c.params.theta_max);
    }
    if (j.contains("spectral")) {
        const auto& p = j.at("spectral");
        reject_unknown(p, {"n_theta", "lambda_lo", "lambda_hi", "tol"}, "spectral");
        read_into(p, "n_theta", c.spectral.n_theta);
        read_into(p, "lambda_lo", c.spectral.lambda_lo);
        read_into(p, "lambda_hi", c.spectral.lambda_hi);
        read_into(p, "tol", c.spectral.tol);
    }
    if (j.contains("slab")) {
        const auto& p = j.at("slab");
        reject_unknown(p, {"a_list", "tau", "epsilon", "n_xi_per_unit", "n_theta"}, "slab");
        read_into(p, "a_list", c.slab.a_list);
        read_into(p, "tau", c.slab.tau);
        read_into(p, "epsilon", c.slab.epsilon);
        read_into(p, "n_xi_per_unit", c.slab.n_xi_per_unit);
        read_into(p, "n_theta", c.slab.n_theta);
    }
    if (j.contains("evolution")) {
        const auto& p = j.at("evolution");
        reject_unknown(p,
                       {"x_min", "x_max", "n_x", "n_theta", "dt", "t_end",
                        "initial_mass_width", "thresholds"},
                       "evolution");
        read_into(p, "x_min", c.evolution.x_min);
        read_into(p, "x_max", c.evolution.x_max);
        read_into(p, "n_x", c.evolution.n_x);
        read_into(p, "n_theta", c.evolution.n_theta);
        read_into(p, "dt", c.evolution.dt);
        read_into(p, "t_end", c.evolution.t_end);
        read_into(p, "initial_mass_width", c.evolution.initial_mass_width);
        read_into(p, "thresholds", c.evolution.thresholds);
    }
    if (j.contains("analysis")) {
        const auto& p = j.at("analysis");
        reject_unknown(p, {"seed", "n_polys", "k_max"}, "analysis");
        read_into(p, "seed", c.analysis.seed);
        read_into(p, "n_polys", c.analysis.n_polys);
        read_into(p, "k_max", c.analysis.k_max);
    }
    read_into(j, "output_dir", c.output_dir);
    validate_config(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path.string());
    json j;
    in >> j;
    return config_from_json(j);
}

json config_to_json(const RunConfig& c) {
    return json{
        {"params",
         {{"alpha", c.params.alpha},
          {"r", c.params.r},
          {"theta_min", c.params.theta_min},
          {"theta_max", c.params.theta_max}}},
        {"spectral",
         {{"n_theta", c.spectral.n_theta},
          {"lambda_lo", c.spectral.lambda_lo},
          {"lambda_hi", c.spectral.lambda_hi},
          {"tol", c.spectral.tol}}},
        {"slab",
         {{"a_list", c.slab.a_list},
          {"tau", c.slab.tau},
          {"epsilon", c.slab.epsilon},
          {"n_xi_per_unit", c.slab.n_xi_per_unit},
          {"n_theta", c.slab.n_theta}}},
        {"evolution",
         {{"x_min", c.evolution.x_min},
          {"x_max", c.evolution.x_max},
          {"n_x", c.evolution.n_x},
          {"n_theta", c.evolution.n_theta},
          {"dt", c.evolution.dt},
          {"t_end", c.evolution.t_end},
          {"initial_mass_width", c.evolution.initial_mass_width},
          {"thresholds", c.evolution.thresholds}}},
        {"analysis",
         {{"seed", c.analysis.seed},
          {"n_polys", c.analysis.n_polys},
          {"k_max", c.analysis.k_max}}},
        {"output_dir", c.output_dir}};
}

json make_report(const RunConfig& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config_to_json(config);
    return j;
}

} // namespace toadwave
