#pragma once

#include "gpp/solvers.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gpp {

/// Grid policy for automatic solves. r_max = 0 selects the radius from a Gaussian trial state
/// and refines it until the far tail is below `tail_target` relative to the peak.
struct DomainPolicy {
    int n = 2048;
    double r_max = 0.0;
    double tail_target = 1e-9;
    int max_regrids = 4;
};

struct BranchRow {
    double rho = 0.0;
    double m = 0.0;  ///< energy level; 0 for spreading (collapsed) solves
    double lambda = 0.0;
    double A = 0.0, B = 0.0, C = 0.0;
    SolveKind kind = SolveKind::global_min;
    bool converged = false;
    bool collapsed = false;
    double lambda_nehari = 0.0;
    double lambda_enp = 0.0;
    double nehari = 0.0;
    double pohozaev = 0.0;
    double el_sup = 0.0;
    double r_max = 0.0;
    int iterations = 0;
};

struct BranchCurve {
    double alpha = 0.0;
    SolveKind kind = SolveKind::global_min;
    std::vector<BranchRow> rows;
    std::vector<SolveResult> results;  ///< parallel to rows
    std::string provenance;            ///< config hash
    std::optional<double> spot_check_max_rel_diff;
};

struct AsymptoticFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    int points = 0;
};

struct ThresholdReport {
    double alpha = 0.0;
    std::optional<double> rho_star;
    std::optional<double> rho_star_critical;
    double rho_doublestar_lower = 0.0;
    std::optional<double> rho_doublestar_empirical;
    int solves = 0;
    bool ordering_ok = false;
};

enum class BranchColumn { m, lambda, M };
enum class NormKind { l2, l4, h1 };

/// Adaptive single solve: domain from policy (or the Gaussian trial state), regridding until the
/// tail is resolved; a spreading flow is retried once on a doubled domain before being reported.
SolveResult solve_auto(SolveKind kind, const GppParams& params, const SolverConfig& cfg, const DomainPolicy& policy,
                       KernelCache& cache, const std::optional<RadialField>& warm = std::nullopt);

struct SweepOptions {
    DomainPolicy domain;
    int spot_checks = 0;  ///< cold-start re-solves compared against the warm-started rows
};

BranchCurve sweep(double alpha, const std::vector<double>& rhos, const SolverConfig& cfg, SolveKind kind,
                  const SweepOptions& options, KernelCache& cache);

BranchRow make_row(double rho, const SolveResult& r);

AsymptoticFit fit_power_law(const BranchCurve& curve, BranchColumn column, std::pair<double, double> window);

/// Default window: the last (large = true) or first decade of the swept range.
std::pair<double, double> default_window(const BranchCurve& curve, bool large);

double limit_profile_error(const SolveResult& result, const SolveResult& reference, RescaleKind kind, NormKind metric);

struct ThresholdOptions {
    DomainPolicy domain;
    double rel_tol = 2e-3;  ///< bisection stops at this relative bracket width
    int budget = 60;        ///< total solves
};

ThresholdReport detect_thresholds(double alpha, const SolverConfig& cfg, const ThresholdOptions& options,
                                  KernelCache& cache);

double mass_radius(const SolveResult& result, double theta);

struct DecayDiagnostic {
    double slope = 0.0;
    bool window_ok = false;
    double expected = 0.0;
    int points = 0;
};

DecayDiagnostic decay_diagnostic(const SolveResult& result);

/// Largest relative change of m along consecutive converged rows, and the worst concavity excess.
struct ShapeCheck {
    bool decreasing = true;
    bool concave = true;
    double worst_second_difference = 0.0;  ///< max of (second difference) / |m|, should be <= tolerance
};

ShapeCheck check_shape(const BranchCurve& curve, double tolerance = 1e-6);

}  // namespace gpp
