#include "gpp/energy.hpp"

#include "gpp/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

namespace gpp {

EnergyReport EnergyReport::from_moments(double A, double B, double C, double rho2) {
    EnergyReport r;
    r.A = A;
    r.B = B;
    r.C = C;
    r.rho2 = rho2;
    r.E_choquard = 0.5 * A - 0.25 * C;
    r.E_tf = 0.25 * B - 0.25 * C;
    r.F = r.E_choquard + 0.25 * B;
    r.lambda_nehari = rho2 > 0.0 ? (C - A - B) / rho2 : 0.0;
    return r;
}

EnergyReport evaluate(const RadialField& u, const RieszKernel& kernel) {
    if (!(kernel.grid() == u.grid())) fail(Errc::grid_mismatch, "field grid differs from the kernel grid");
    return EnergyReport::from_moments(dirichlet_energy(u), l4_norm4(u), interaction_energy(kernel, u), mass(u));
}

namespace {

struct PointwiseTerms {
    std::vector<double> residual;
    double scale;
};

PointwiseTerms el_terms(const RadialField& u, double lambda, const RieszKernel& kernel, double q) {
    if (!(kernel.grid() == u.grid())) fail(Errc::grid_mismatch, "field grid differs from the kernel grid");
    const int n = u.size();
    const auto lu = DirichletForm(u.grid()).apply(u.values());
    std::vector<double> dens(static_cast<std::size_t>(n)), phi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dens[static_cast<std::size_t>(i)] = u[i] * u[i];
    kernel.apply(dens, phi);
    PointwiseTerms t{std::vector<double>(static_cast<std::size_t>(n)), 0.0};
    for (int i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const double a = lu[k], b = lambda * u[i], c = q * u[i] * dens[k], d = phi[k] * u[i];
        t.residual[k] = a + b + c - d;
        t.scale = std::max(t.scale, std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d));
    }
    return t;
}

}  // namespace

RadialField euler_lagrange_residual(const RadialField& u, double lambda, const RieszKernel& kernel, double quartic) {
    return RadialField(u.grid(), el_terms(u, lambda, kernel, quartic).residual);
}

EnpSolution solve_enp_system(double A, double B, double rho, double alpha) {
    if (alpha == 3.0) fail(Errc::invalid_argument, "the system is singular at alpha = 3");
    if (!(rho > 0.0)) fail(Errc::invalid_argument, "rho must be positive");
    EnpSolution s{};
    s.mu = (2.0 * (1.0 - alpha) * A - alpha * B) / (4.0 * (3.0 - alpha));
    s.lambda = ((1.0 + alpha) * A + alpha * B) / ((3.0 - alpha) * rho * rho);
    s.C = (4.0 * A + 3.0 * B) / (3.0 - alpha);
    return s;
}

FiberProfile::FiberProfile(double A_, double B_, double C_, double alpha_) : A(A_), B(B_), C(C_), alpha(alpha_) {}

double FiberProfile::phi_at(double t) const {
    return 0.5 * A * t * t + 0.25 * B * t * t * t - 0.25 * C * std::pow(t, 3.0 - alpha);
}

double FiberProfile::dphi_at(double t) const {
    return A * t + 0.75 * B * t * t - 0.25 * (3.0 - alpha) * C * std::pow(t, 2.0 - alpha);
}

double FiberProfile::d2phi_at(double t) const {
    return A + 1.5 * B * t - 0.25 * (3.0 - alpha) * (2.0 - alpha) * C * std::pow(t, 1.0 - alpha);
}

namespace {

// psi(t) = phi'(t) / t
double psi(const FiberProfile& f, double t) {
    return f.A + 0.75 * f.B * t - 0.25 * (3.0 - f.alpha) * f.C * std::pow(t, 1.0 - f.alpha);
}

double psi_prime(const FiberProfile& f, double t) {
    return 0.75 * f.B - 0.25 * (3.0 - f.alpha) * (1.0 - f.alpha) * f.C * std::pow(t, -f.alpha);
}

double bisect_root(const FiberProfile& f, double lo, double hi) {
    // rounding can give psi(lo) the sign of psi(hi) when the root sits at lo
    if (psi(f, hi) == 0.0) return hi;
    if (psi(f, lo) == 0.0 || (psi(f, lo) > 0.0) == (psi(f, hi) > 0.0)) return lo;
    double flo = psi(f, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = psi(f, mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    const double d = psi_prime(f, t);
    if (d != 0.0) {
        const double tn = t - psi(f, t) / d;
        if (tn > 0.0 && std::abs(psi(f, tn)) <= std::abs(psi(f, t))) t = tn;
    }
    return t;
}

}  // namespace

FiberProfile fiber_profile(const EnergyReport& report, double alpha) {
    if (!(report.A > 0.0)) fail(Errc::invalid_argument, "fiber profile needs A > 0");
    if (!(alpha > 0.0 && alpha < 3.0)) fail(Errc::invalid_argument, "alpha must lie in (0,3)");
    FiberProfile f(report.A, report.B, report.C, alpha);
    const double A = f.A, B = f.B, C = f.C;
    if (C <= 0.0) return f;
    if (alpha < 1.0) {
        if (B <= 0.0) {
            // psi decreases without bound: a single local maximum
            const double t0 = std::pow(4.0 * A / ((3.0 - alpha) * C), 1.0 / (1.0 - alpha));
            double hi = 2.0 * t0;
            while (psi(f, hi) > 0.0) hi *= 2.0;
            f.t_max = bisect_root(f, t0, hi);
            return f;
        }
        const double tbar = std::pow((3.0 - alpha) * (1.0 - alpha) * C / (3.0 * B), 1.0 / alpha);
        if (psi(f, tbar) >= 0.0) return f;
        const double t0 = std::pow(4.0 * A / ((3.0 - alpha) * C), 1.0 / (1.0 - alpha));
        const double t1 = std::pow(1.0 / alpha, 1.0 / (1.0 - alpha)) * t0;
        const double hi = (t1 < tbar && psi(f, t1) < 0.0) ? t1 : tbar;
        f.t_max = bisect_root(f, t0, hi);
        double top = 2.0 * tbar;
        while (psi(f, top) < 0.0) top *= 2.0;
        f.t_min = bisect_root(f, tbar, top);
        return f;
    }
    if (alpha == 1.0) {
        if (B > 0.0 && 0.5 * C > A) f.t_min = (0.5 * C - A) / (0.75 * B);
        return f;
    }
    // alpha > 1: psi rises from -inf to a positive limit, so there is exactly one root
    double lo = 1.0;
    while (psi(f, lo) > 0.0) lo *= 0.5;
    double hi = 1.0;
    while (psi(f, hi) < 0.0) hi *= 2.0;
    f.t_min = bisect_root(f, lo, hi);
    return f;
}

double fiber_gap_minimum(double B, double C, double alpha) {
    const auto k = threshold_constants(alpha);
    return -std::pow(C / std::pow(B, 1.0 - alpha), 1.0 / alpha) * k.K_alpha;
}

IdentityResiduals identity_residuals(const EnergyReport& r, double lambda, double alpha, double quartic) {
    const double b = quartic * r.B;
    const double scale = std::max({r.A, b, r.C, std::abs(lambda) * r.rho2});
    IdentityResiduals out;
    if (scale <= 0.0) return out;
    out.nehari = (r.A + lambda * r.rho2 + b - r.C) / scale;
    out.pohozaev = (0.5 * r.A + 1.5 * lambda * r.rho2 + 0.75 * b - 0.25 * (3.0 + alpha) * r.C) / scale;
    return out;
}

IdentityResiduals identity_residuals(const RadialField& u, double lambda, const RieszKernel& kernel, double quartic) {
    auto out = identity_residuals(evaluate(u, kernel), lambda, kernel.alpha(), quartic);
    const auto t = el_terms(u, lambda, kernel, quartic);
    double sup = 0.0;
    for (double x : t.residual) sup = std::max(sup, std::abs(x));
    out.euler_lagrange_sup = t.scale > 0.0 ? sup / t.scale : 0.0;
    return out;
}

double lambda_enp(const EnergyReport& r, double alpha, double quartic) {
    return ((1.0 + alpha) * r.A + alpha * quartic * r.B) / ((3.0 - alpha) * r.rho2);
}

ThresholdConstants threshold_constants(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(Errc::invalid_argument, fmt::format("threshold constants need alpha in (0,1), got {}", alpha));
    const auto rc = constants(alpha);
    ThresholdConstants t{};
    t.K_alpha = 0.75 * alpha * std::pow((3.0 - alpha) / 3.0, 1.0 / alpha) * std::pow(1.0 - alpha, (1.0 - alpha) / alpha);
    t.barK_alpha = 1.0 / (std::sqrt(t.K_alpha) * std::pow(rc.c_alpha_hls, 1.0 / (2.0 * alpha)) *
                          std::pow(rc.c_bar_gn, 4.0 / 3.0));
    const double cbar4 = std::pow(rc.c_bar_gn, 4.0);
    t.H_bound = 0.25 * (3.0 - alpha) * std::pow(2.0 / (3.0 * cbar4), 1.0 - alpha) * std::pow(alpha, alpha) *
                std::pow(1.0 - alpha, 1.0 - alpha);
    return t;
}

bool in_admissible_cone(const EnergyReport& r, double alpha, double rho, double H) {
    return std::pow(r.A, 0.5 * (3.0 - alpha)) < H * std::pow(rho, alpha - 1.0) * r.C;
}

double barrier_g2(double R, double rho, double alpha, const RieszConstants& c) {
    return 0.5 * R * R - 0.25 * c.c_barbar_alpha * std::pow(rho, 1.0 + alpha) * std::pow(R, 3.0 - alpha);
}

Barrier barrier(double rho, double alpha, const RieszConstants& c) {
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(Errc::invalid_argument, fmt::format("barrier needs alpha in (0,1), got {}", alpha));
    Barrier b{};
    b.R_rho = std::pow(4.0 / ((3.0 - alpha) * c.c_barbar_alpha * std::pow(rho, 1.0 + alpha)), 1.0 / (1.0 - alpha));
    b.g2_at_R = barrier_g2(b.R_rho, rho, alpha, c);
    return b;
}

}  // namespace gpp
