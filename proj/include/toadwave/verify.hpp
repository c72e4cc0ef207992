#pragma once

#include "toadwave/config.hpp"
#include "toadwave/spectral.hpp"

#include <string>
#include <vector>

namespace toadwave {

struct CheckResult {
    std::string id;        // suite-qualified, e.g. "spectral.relations.rel1"
    bool pass = false;
    std::string detail;    // measured values
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed = false;
};

/// Run the module invariant suites at desk scale. `only` restricts to a suite
/// prefix ("grid", "spectral", "slab", "evolution", "analysis", "appendixB");
/// empty runs everything. `inject_fault` negates the outcome of the matching
/// check id -- a self-test hook proving the harness reports failures.
VerifyReport run_verify(const RunConfig& config, const std::string& only = "",
                        const std::string& inject_fault = "");

/// Full dense symmetric eigendecomposition of the trait operator (similarity
/// transform onto the quadrature-weighted symmetric form); the independent
/// route against the inverse-iteration eigensolve.
double dense_principal_eigenvalue(const TraitOperator& op, const TraitGrid& grid);

} // namespace toadwave
