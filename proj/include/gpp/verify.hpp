#pragma once

#include "gpp/branch.hpp"
#include "gpp/solvers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gpp {

/// One verified quantity; passes when value <= limit. Boolean checks report 0 or 1 violations against 0.
struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<Check> checks;
    bool ok() const;
};

struct VerifyOptions {
    double alpha = 2.0;
    std::vector<double> rhos{1.0};
    SolveKind kind = SolveKind::global_min;
    SolverConfig solver;
    DomainPolicy domain;
    std::uint64_t seed = 1;
    int random_fields = 1000;
};

VerifyReport verify_suite(const VerifyOptions& options, KernelCache& cache);

}  // namespace gpp
