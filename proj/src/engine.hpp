#pragma once

#include "gpp/energy.hpp"
#include "gpp/radial.hpp"
#include "gpp/riesz.hpp"
#include "gpp/solvers.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gpp::detail {

using Vec = std::vector<double>;

/// Discrete energy 1/2 A + q/4 B - 1/4 C on one kernel grid, with the operators the solvers share.
class Problem {
public:
    Problem(const RieszKernel& kernel, double quartic);

    const RadialGrid& grid() const noexcept { return kernel_.grid(); }
    const RieszKernel& kernel() const noexcept { return kernel_; }
    const DirichletForm& form() const noexcept { return form_; }
    int size() const noexcept { return n_; }
    double quartic() const noexcept { return q_; }

    Vec potential(std::span<const double> u) const;
    EnergyReport report(std::span<const double> u, std::span<const double> phi) const;
    double energy(const EnergyReport& r) const { return 0.5 * r.A + 0.25 * q_ * r.B - 0.25 * r.C; }
    double nehari_lambda(const EnergyReport& r) const { return (r.C - r.A - q_ * r.B) / r.rho2; }
    double mass(std::span<const double> u) const;
    void project(Vec& u, double rho) const;

    /// max |EL residual| over the largest pointwise term.
    double relative_residual(std::span<const double> u, double lambda, std::span<const double> phi) const;

    /// Solves (D^T D + diag(q u^2 - phi + tau)) v = tau r u and returns |v| / r; empty if not positive definite.
    std::optional<Vec> implicit_step(std::span<const double> u, std::span<const double> phi, double tau) const;

    /// Solves (c1 D^T D + c2) v = r g, returns v / r; the quotient-descent operator.
    Vec shifted_laplace_solve(double c1, double c2, std::span<const double> g) const;

    struct NewtonOutcome {
        Vec u;
        double lambda;
        double residual;
        int iterations;
    };
    /// Newton on the Euler-Lagrange system; mass-constrained when `rho` is set, otherwise lambda is fixed.
    NewtonOutcome newton(Vec u, double lambda, std::optional<double> rho, int max_iters, double target) const;

private:
    RieszKernel kernel_;
    DirichletForm form_;
    double q_;
    int n_;
};

struct FlowOutcome {
    Vec u;
    double lambda = 0.0;
    int iterations = 0;
    double residual = 1.0;
    bool collapsed = false;
    bool stalled = false;
};

/// Energy-monotone normalized flow; stops at `stop_tol`, on collapse, or after cfg.max_iters.
FlowOutcome gradient_flow(const Problem& p, Vec u, double rho, const SolverConfig& cfg, double stop_tol);

double tail_fraction(const RadialGrid& g, std::span<const double> u);

}  // namespace gpp::detail
