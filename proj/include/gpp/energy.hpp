#pragma once

#include "gpp/radial.hpp"
#include "gpp/riesz.hpp"

#include <optional>

namespace gpp {

struct EnergyReport {
    double A = 0.0;  ///< |grad u|_2^2
    double B = 0.0;  ///< |u|_4^4
    double C = 0.0;  ///< D(u)
    double rho2 = 0.0;
    double F = 0.0;
    double E_choquard = 0.0;
    double E_tf = 0.0;
    double lambda_nehari = 0.0;

    static EnergyReport from_moments(double A, double B, double C, double rho2);
};

EnergyReport evaluate(const RadialField& u, const RieszKernel& kernel);

/// -Lap u + lambda u + q u^3 - (I_alpha * u^2) u, with q = 1 for the full equation and 0 for Choquard.
RadialField euler_lagrange_residual(const RadialField& u, double lambda, const RieszKernel& kernel,
                                    double quartic = 1.0);

struct EnpSolution {
    double mu;
    double lambda;
    double C;
};

EnpSolution solve_enp_system(double A, double B, double rho, double alpha);

class FiberProfile {
public:
    FiberProfile(double A, double B, double C, double alpha);

    double A, B, C, alpha;
    std::optional<double> t_max;
    std::optional<double> t_min;

    double phi_at(double t) const;
    double dphi_at(double t) const;
    double d2phi_at(double t) const;
};

FiberProfile fiber_profile(const EnergyReport& report, double alpha);

/// min over t > 0 of (3/4) B t - ((3-alpha)/4) C t^{1-alpha}, closed form through K_alpha.
double fiber_gap_minimum(double B, double C, double alpha);

struct IdentityResiduals {
    double nehari = 0.0;
    double pohozaev = 0.0;
    double euler_lagrange_sup = 0.0;
};

/// Relative residuals; Nehari and Pohozaev scaled by max(A, qB, C, |lambda| rho^2), the
/// Euler-Lagrange sup by the largest pointwise term magnitude.
IdentityResiduals identity_residuals(const RadialField& u, double lambda, const RieszKernel& kernel,
                                     double quartic = 1.0);
IdentityResiduals identity_residuals(const EnergyReport& report, double lambda, double alpha,
                                     double quartic = 1.0);

/// ((1 + alpha) A + alpha q B) / ((3 - alpha) rho^2)
double lambda_enp(const EnergyReport& report, double alpha, double quartic = 1.0);

struct ThresholdConstants {
    double K_alpha;
    double barK_alpha;
    double H_bound;
};

ThresholdConstants threshold_constants(double alpha);

/// A^{(3-alpha)/2} < H rho^{alpha-1} C
bool in_admissible_cone(const EnergyReport& report, double alpha, double rho, double H);

struct Barrier {
    double R_rho;
    double g2_at_R;
};

double barrier_g2(double R, double rho, double alpha, const RieszConstants& constants);
Barrier barrier(double rho, double alpha, const RieszConstants& constants);

}  // namespace gpp
