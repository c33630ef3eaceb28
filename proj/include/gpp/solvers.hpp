#pragma once

#include "gpp/energy.hpp"
#include "gpp/radial.hpp"
#include "gpp/riesz.hpp"

#include <optional>
#include <string>
#include <utility>
#include <string_view>

namespace gpp {

enum class SolveKind { global_min, local_min, mp_type2, choquard_min, choquard_frequency, choquard_mp, thomas_fermi };

std::string_view to_string(SolveKind kind) noexcept;
std::optional<SolveKind> parse_solve_kind(std::string_view name) noexcept;

struct SolverConfig {
    double dt = 0.0;             ///< initial pseudo-time step; 0 picks 1 / (2 |lambda|)
    int max_iters = 4000;
    double residual_tol = 1e-6;  ///< relative Euler-Lagrange residual
    double damping = 0.5;        ///< Thomas-Fermi relaxation
    double H_fraction = 0.9;
    double seed_width = 1.0;
    int newton_iters = 30;
    double collapse_tail = 1e-3;  ///< mass fraction beyond r_max / 2 that marks a spreading flow

    void validate() const;
};

struct SolveResult {
    explicit SolveResult(RadialField s) : state(std::move(s)) {}

    RadialField state;
    double alpha = 0.0;
    double lambda = 0.0;
    EnergyReport report;
    IdentityResiduals residuals;
    SolveKind kind = SolveKind::global_min;
    int iterations = 0;
    bool converged = false;

    bool collapsed = false;
    double lambda_enp = 0.0;
    double tail_fraction = 0.0;  ///< mass beyond r_max / 2 over total mass
    std::string note;

    std::optional<double> tf_multiplier;   ///< m in z^2 - I*z^2 = 4m
    std::optional<double> support_radius;  ///< outer face of the last cell with phi > 1e-10 max phi
    std::optional<double> quotient;        ///< scale-invariant quotient (S_alpha, or S_1 for the frequency problem)
    std::optional<double> level_from_quotient;
    std::optional<double> fiber_d2;        ///< phi''(1) of the state's fiber
    std::optional<bool> in_cone;

    /// The mass of the state.
    double rho() const;
};

SolveResult minimize_normalized(const GppParams& params, const RieszKernel& kernel, const SolverConfig& cfg,
                                const std::optional<RadialField>& init = std::nullopt);

/// Mountain-pass state on the fiber-maximum set; seeds from the rescaled Choquard profile when `init` is empty.
SolveResult solve_mp_type2(const GppParams& params, const RieszKernel& kernel, const SolverConfig& cfg,
                           const std::optional<RadialField>& init = std::nullopt);

/// Choquard minimizer (no quartic term) at mass `rho` (default 1); alpha in (1,3).
SolveResult solve_choquard_min(double alpha, const RieszKernel& kernel, const SolverConfig& cfg, double rho = 1.0,
                               const std::optional<RadialField>& init = std::nullopt);

/// Frequency-one Choquard ground state; rho_star = l2 norm of the state.
SolveResult solve_choquard_frequency(double alpha, const RieszKernel& kernel, const SolverConfig& cfg);

/// Choquard mountain pass at mass 1 for alpha in (0,1), in fiber-maximum form.
/// The state lives on a rescaled copy of the kernel grid.
SolveResult solve_choquard_mp(double alpha, const RieszKernel& kernel, const SolverConfig& cfg);

/// Thomas-Fermi minimizer at mass 1.
SolveResult solve_tf(double alpha, const RieszKernel& kernel, const SolverConfig& cfg);

/// M_1 from S_alpha for alpha < 1: [S^2 2^{3+alpha} (1-alpha)^{1-alpha} / (3-alpha)^{3-alpha}]^{1/(1-alpha)}.
double choquard_mp_level(double S, double alpha);

/// Nonnegative and nonincreasing up to `tol` times the peak.
bool is_nonincreasing(const RadialField& u, double tol = 1e-10);

/// Mass fraction beyond r_max / 2.
double tail_fraction(const RadialField& u);

}  // namespace gpp
