#pragma once

#include "gpp/branch.hpp"
#include "gpp/serialize.hpp"
#include "gpp/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gpp {

enum class Command { solve, sweep, limits, thresholds, verify };
enum class OutputFormat { csv, json };

std::string_view to_string(Command c) noexcept;
std::string_view to_string(OutputFormat f) noexcept;
std::string_view to_string(RescaleKind k) noexcept;

struct RunConfig {
    Command command = Command::solve;
    double alpha = 2.0;
    std::vector<double> rhos{1.0};
    bool rho_is_list = false;
    SolveKind kind = SolveKind::global_min;
    DomainPolicy grid;
    SolverConfig solver;
    std::string output_dir = "out";
    OutputFormat format = OutputFormat::csv;
    int threads = 1;
    int spot_checks = 3;
    std::uint64_t seed = 1;
    std::optional<RescaleKind> rescale;  ///< limits only; empty picks from alpha and kind
    ThresholdOptions thresholds;

    /// Every setting except output_dir, with defaults filled in and keys in fixed order.
    Json canonical() const;
    std::string hash() const;
};

/// Parses a JSON config; unknown keys and malformed values raise Errc::config_parse.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace gpp
