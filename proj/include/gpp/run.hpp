#pragma once

#include "gpp/config.hpp"

#include <iosfwd>

namespace gpp {

/// Executes a config, writing its files under config.output_dir and a summary to `out`.
/// Returns the process exit status: 0 on success, 1 when verify finds a violation or a run fails.
int run(const RunConfig& config, std::ostream& out);

/// Reference used by the limits command for a rescale kind.
SolveKind reference_kind(RescaleKind kind);
RescaleKind default_rescale(double alpha, SolveKind kind, double first_rho);

}  // namespace gpp
