#include "gpp/solvers.hpp"

#include "engine.hpp"
#include "gpp/errors.hpp"
#include "gpp/log.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace gpp {

using detail::Problem;
using detail::Vec;

namespace {

constexpr std::array<std::pair<SolveKind, std::string_view>, 7> kKindNames{{
    {SolveKind::global_min, "global-min"},
    {SolveKind::local_min, "local-min"},
    {SolveKind::mp_type2, "mp-type2"},
    {SolveKind::choquard_min, "choquard-min"},
    {SolveKind::choquard_frequency, "choquard-frequency"},
    {SolveKind::choquard_mp, "choquard-mp"},
    {SolveKind::thomas_fermi, "thomas-fermi"},
}};

constexpr double kFlowSwitch = 1e-4;
constexpr double kNewtonTarget = 1e-12;

void check_kernel_alpha(const RieszKernel& k, double alpha) {
    if (k.alpha() != alpha)
        fail(Errc::invalid_argument, fmt::format("kernel order {} differs from alpha {}", k.alpha(), alpha));
}

Vec gaussian(const RadialGrid& g, double width) {
    Vec u(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        const double r = g.node(i) / width;
        u[static_cast<std::size_t>(i)] = std::exp(-0.5 * r * r);
    }
    return u;
}

Vec seed_values(const RieszKernel& k, const SolverConfig& cfg, const std::optional<RadialField>& init) {
    if (!init) return gaussian(k.grid(), cfg.seed_width);
    if (init->grid() == k.grid()) return Vec(init->values().begin(), init->values().end());
    const auto r = resample(*init, k.grid());
    return Vec(r.values().begin(), r.values().end());
}

struct Normalized {
    Vec u;
    double lambda;
    int iterations;
    bool collapsed;
};

// Flow to a coarse tolerance, Newton polish, and fall back to more flow if Newton stalls.
Normalized run_normalized(const Problem& p, Vec u0, double rho, const SolverConfig& cfg) {
    auto flow = detail::gradient_flow(p, std::move(u0), rho, cfg, std::max(kFlowSwitch, cfg.residual_tol));
    Normalized out{std::move(flow.u), flow.lambda, flow.iterations, flow.collapsed};
    if (out.collapsed) return out;
    auto nt = p.newton(out.u, out.lambda, rho, cfg.newton_iters, kNewtonTarget);
    out.iterations += nt.iterations;
    if (nt.residual < flow.residual) {
        out.u = std::move(nt.u);
        out.lambda = nt.lambda;
    }
    if (nt.residual > cfg.residual_tol) {
        log::info("Newton polish stalled at {:.3e}; continuing the flow", nt.residual);
        auto more = detail::gradient_flow(p, out.u, rho, cfg, cfg.residual_tol);
        out.iterations += more.iterations;
        out.u = std::move(more.u);
        out.lambda = more.lambda;
        out.collapsed = more.collapsed;
    }
    return out;
}

SolveResult package(const Problem& p, Vec u, double lambda, SolveKind kind, int iterations, const SolverConfig& cfg) {
    for (double& x : u) x = std::abs(x);
    RadialField field(p.grid(), std::move(u));
    SolveResult r(field);
    r.alpha = p.kernel().alpha();
    r.lambda = lambda;
    r.report = evaluate(field, p.kernel());
    r.residuals = identity_residuals(field, lambda, p.kernel(), p.quartic());
    r.kind = kind;
    r.iterations = iterations;
    r.lambda_enp = lambda_enp(r.report, p.kernel().alpha(), p.quartic());
    r.tail_fraction = detail::tail_fraction(field.grid(), field.values());
    r.collapsed = r.tail_fraction > cfg.collapse_tail;
    r.converged = !r.collapsed && r.residuals.euler_lagrange_sup <= cfg.residual_tol;
    if (r.collapsed)
        r.note = fmt::format("flow spreads to the domain boundary (tail mass fraction {:.3g})", r.tail_fraction);
    return r;
}

}  // namespace

std::string_view to_string(SolveKind kind) noexcept {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<SolveKind> parse_solve_kind(std::string_view name) noexcept {
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    return std::nullopt;
}

void SolverConfig::validate() const {
    if (!(dt >= 0.0)) fail(Errc::invalid_argument, "dt must be nonnegative");
    if (max_iters <= 0) fail(Errc::invalid_argument, "max_iters must be positive");
    if (!(residual_tol > 0.0)) fail(Errc::invalid_argument, "residual_tol must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) fail(Errc::invalid_argument, "damping must lie in (0,1]");
    if (!(H_fraction > 0.0 && H_fraction < 1.0)) fail(Errc::invalid_argument, "H_fraction must lie in (0,1)");
    if (!(seed_width > 0.0)) fail(Errc::invalid_argument, "seed_width must be positive");
    if (newton_iters < 0) fail(Errc::invalid_argument, "newton_iters must be nonnegative");
    if (!(collapse_tail > 0.0 && collapse_tail < 1.0)) fail(Errc::invalid_argument, "collapse_tail must lie in (0,1)");
}

double SolveResult::rho() const { return l2_norm(state); }

double tail_fraction(const RadialField& u) { return detail::tail_fraction(u.grid(), u.values()); }

bool is_nonincreasing(const RadialField& u, double tol) {
    const double peak = u.max_abs();
    for (int i = 0; i < u.size(); ++i) {
        if (u[i] < -tol * peak) return false;
        if (i + 1 < u.size() && u[i + 1] > u[i] + tol * peak) return false;
    }
    return true;
}

SolveResult minimize_normalized(const GppParams& params, const RieszKernel& kernel, const SolverConfig& cfg,
                                const std::optional<RadialField>& init) {
    params.validate();
    cfg.validate();
    check_kernel_alpha(kernel, params.alpha);
    const Problem p(kernel, 1.0);
    auto run = run_normalized(p, seed_values(kernel, cfg, init), params.rho, cfg);
    auto r = package(p, std::move(run.u), run.lambda, SolveKind::global_min, run.iterations, cfg);
    r.collapsed = r.collapsed || run.collapsed;
    r.converged = r.converged && !r.collapsed;
    if (params.alpha < 1.0 && !(r.report.F < 0.0)) r.kind = SolveKind::local_min;
    return r;
}

SolveResult solve_choquard_min(double alpha, const RieszKernel& kernel, const SolverConfig& cfg, double rho,
                               const std::optional<RadialField>& init) {
    if (!(alpha > 1.0 && alpha < 3.0))
        fail(Errc::invalid_argument, fmt::format("Choquard minimizer needs alpha in (1,3), got {}", alpha));
    cfg.validate();
    check_kernel_alpha(kernel, alpha);
    const Problem p(kernel, 0.0);
    auto run = run_normalized(p, seed_values(kernel, cfg, init), rho, cfg);
    auto r = package(p, std::move(run.u), run.lambda, SolveKind::choquard_min, run.iterations, cfg);
    r.collapsed = r.collapsed || run.collapsed;
    r.converged = r.converged && !r.collapsed;
    return r;
}

SolveResult solve_choquard_frequency(double alpha, const RieszKernel& kernel, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 3.0)) fail(Errc::invalid_argument, "alpha must lie in (0,3)");
    cfg.validate();
    check_kernel_alpha(kernel, alpha);
    const Problem p(kernel, 0.0);
    const auto w8 = kernel.grid().weights();
    Vec w = gaussian(kernel.grid(), cfg.seed_width);
    int it = 0;
    // Petviashvili iteration for -Lap w + w = (I * w^2) w with the cubic stabilizing exponent 3/2.
    for (; it < cfg.max_iters; ++it) {
        const auto phi = p.potential(w);
        const auto lw = p.form().apply(w);
        double num = 0.0, den = 0.0;
        Vec g(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            num += w8[i] * w[i] * (lw[i] + w[i]);
            den += w8[i] * w[i] * phi[i] * w[i];
            g[i] = phi[i] * w[i];
        }
        const double factor = std::pow(num / den, 1.5);
        auto wn = p.shifted_laplace_solve(1.0, 1.0, g);
        double change = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            wn[i] = std::abs(factor * wn[i]);
            change = std::max(change, std::abs(wn[i] - w[i]));
            peak = std::max(peak, wn[i]);
        }
        w = std::move(wn);
        if (change < 1e-10 * peak) break;
    }
    auto nt = p.newton(std::move(w), 1.0, std::nullopt, cfg.newton_iters, kNewtonTarget);
    auto r = package(p, std::move(nt.u), 1.0, SolveKind::choquard_frequency, it + nt.iterations, cfg);
    const auto& rep = r.report;
    r.quotient = std::pow(rep.A, 0.5 * (3.0 - alpha)) * std::pow(rep.rho2, 0.5 * (1.0 + alpha)) / rep.C;
    return r;
}

double choquard_mp_level(double S, double alpha) {
    const double base = S * S * std::pow(2.0, 3.0 + alpha) * std::pow(1.0 - alpha, 1.0 - alpha) /
                        std::pow(3.0 - alpha, 3.0 - alpha);
    return std::pow(base, 1.0 / (1.0 - alpha));
}

SolveResult solve_choquard_mp(double alpha, const RieszKernel& kernel, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(Errc::invalid_argument, fmt::format("Choquard mountain pass needs alpha in (0,1), got {}", alpha));
    cfg.validate();
    check_kernel_alpha(kernel, alpha);
    const Problem p(kernel, 0.0);
    Vec u = gaussian(kernel.grid(), cfg.seed_width);
    p.project(u, 1.0);
    // Projected descent on Q = A^{(3-a)/2} rho^{1+a} / C; its fixed points solve the Euler-Lagrange
    // equation of log Q. The dilation direction is neutral, so stop on the quotient, not the state.
    double Q = 0.0;
    int stable = 0, it = 0;
    for (; it < cfg.max_iters && stable < 3; ++it) {
        const auto phi = p.potential(u);
        const auto rep = p.report(u, phi);
        const double Qn = std::pow(rep.A, 0.5 * (3.0 - alpha)) * std::pow(rep.rho2, 0.5 * (1.0 + alpha)) / rep.C;
        stable = (it > 0 && std::abs(Qn - Q) <= 1e-13 * Qn) ? stable + 1 : 0;
        Q = Qn;
        Vec g(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) g[i] = (4.0 / rep.C) * phi[i] * u[i];
        u = p.shifted_laplace_solve((3.0 - alpha) / rep.A, (1.0 + alpha) / rep.rho2, g);
        for (double& x : u) x = std::abs(x);
        p.project(u, 1.0);
    }
    // Move to the fiber maximum by an exact dilation, then polish with Newton.
    const auto phi = p.potential(u);
    const auto rep = p.report(u, phi);
    const double tbar = std::pow(4.0 * rep.A / ((3.0 - alpha) * rep.C), 1.0 / (1.0 - alpha));
    const auto dil = dilate_exact(RadialField(kernel.grid(), u), tbar);
    const Problem pd(kernel.rescaled_to(dil.grid()), 0.0);
    Vec v(dil.values().begin(), dil.values().end());
    const double lam0 = pd.nehari_lambda(pd.report(v, pd.potential(v)));
    auto nt = pd.newton(std::move(v), lam0, 1.0, cfg.newton_iters, kNewtonTarget);
    auto r = package(pd, std::move(nt.u), nt.lambda, SolveKind::choquard_mp, it + nt.iterations, cfg);
    const auto& fr = r.report;
    r.quotient = std::pow(fr.A, 0.5 * (3.0 - alpha)) * std::pow(fr.rho2, 0.5 * (1.0 + alpha)) / fr.C;
    r.level_from_quotient = choquard_mp_level(*r.quotient, alpha);
    return r;
}

SolveResult solve_mp_type2(const GppParams& params, const RieszKernel& kernel, const SolverConfig& cfg,
                           const std::optional<RadialField>& init) {
    params.validate();
    cfg.validate();
    check_kernel_alpha(kernel, params.alpha);
    const double alpha = params.alpha, rho = params.rho;
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(Errc::invalid_argument, fmt::format("type-II mountain pass needs alpha in (0,1), got {}", alpha));
    const double H = cfg.H_fraction * threshold_constants(alpha).H_bound;
    const Problem p(kernel, 1.0);

    Vec u;
    if (init) {
        u = seed_values(kernel, cfg, init);
    } else {
        const auto qgrid = build_grid(kernel.size(), 40.0 * cfg.seed_width);
        const auto v0 = solve_choquard_mp(alpha, kernel.rescaled_to(qgrid), cfg);
        // (v0)_rho(x) = rho^{-(a+2)/(1-a)} v0(rho^{-2/(1-a)} x)
        const double amp = std::pow(rho, -(alpha + 2.0) / (1.0 - alpha));
        const double len = std::pow(rho, 2.0 / (1.0 - alpha));
        const RadialField scaled(v0.state.grid().scaled(len), Vec(v0.state.values().begin(), v0.state.values().end()));
        u = seed_values(kernel, cfg, scaled.scaled(amp));
    }

    // Alternate: fiber maximum by dilation, cone check, one implicit descent step.
    int it = 0;
    double tau = 0.0;
    for (; it < cfg.max_iters; ++it) {
        p.project(u, rho);
        auto phi = p.potential(u);
        auto rep = p.report(u, phi);
        const auto fib = fiber_profile(rep, alpha);
        if (!fib.t_max) fail(Errc::left_admissible_cone, fmt::format("fiber has no local maximum at iteration {}", it));
        if (std::abs(*fib.t_max - 1.0) > 1e-12) {
            const auto d = dilate(RadialField(kernel.grid(), u), *fib.t_max);
            u.assign(d.values().begin(), d.values().end());
            p.project(u, rho);
            phi = p.potential(u);
            rep = p.report(u, phi);
        }
        if (!in_admissible_cone(rep, alpha, rho, H))
            fail(Errc::left_admissible_cone, fmt::format("state left the admissible cone at iteration {}", it));
        const double lam = p.nehari_lambda(rep);
        if (p.relative_residual(u, lam, phi) < kFlowSwitch) break;
        if (tau == 0.0) tau = cfg.dt > 0.0 ? 1.0 / cfg.dt : std::max(2.0 * std::abs(lam), 1e-12);
        std::optional<Vec> step;
        while (!(step = p.implicit_step(u, phi, tau))) tau *= 2.0;
        u = std::move(*step);
        tau = std::max(tau / 1.5, 1.2 * std::abs(lam));
    }
    p.project(u, rho);
    const double lam0 = p.nehari_lambda(p.report(u, p.potential(u)));
    auto nt = p.newton(std::move(u), lam0, rho, cfg.newton_iters, kNewtonTarget);
    auto r = package(p, std::move(nt.u), nt.lambda, SolveKind::mp_type2, it + nt.iterations, cfg);
    const auto fib = FiberProfile(r.report.A, r.report.B, r.report.C, alpha);
    r.fiber_d2 = fib.d2phi_at(1.0);
    r.in_cone = in_admissible_cone(r.report, alpha, rho, H);
    r.converged = r.converged && *r.fiber_d2 < 0.0 && *r.in_cone && r.lambda > 0.0;
    return r;
}

SolveResult solve_tf(double alpha, const RieszKernel& kernel, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 3.0)) fail(Errc::invalid_argument, "alpha must lie in (0,3)");
    cfg.validate();
    check_kernel_alpha(kernel, alpha);
    const auto& g = kernel.grid();
    const int n = g.size();
    const auto w = g.weights();
    const double omega = cfg.damping;

    Vec phi(static_cast<std::size_t>(n));
    double m0 = 0.0;
    for (int i = 0; i < n; ++i) {
        phi[static_cast<std::size_t>(i)] = g.node(i) < 0.5 * g.r_max() ? 1.0 : 0.0;
        m0 += w[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
    }
    for (double& x : phi) x /= m0;

    auto positive_mass = [&](const Vec& base, double m) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += w[static_cast<std::size_t>(i)] * std::max(base[static_cast<std::size_t>(i)] + 4.0 * m, 0.0);
        return s;
    };
    // (base + 4m)_+ with m chosen by bisection so that the mass is one.
    auto truncate = [&](const Vec& base, double& m) {
        double peak = 0.0;
        for (double x : base) peak = std::max(peak, std::abs(x));
        double lo = -peak / 4.0, hi = 0.0;
        if (positive_mass(base, hi) < 1.0)
            fail(Errc::bisection_failure, "potential too weak to carry unit mass; enlarge the domain");
        for (int k = 0; k < 200 && hi - lo > 1e-17 * peak; ++k) {
            const double mid = 0.5 * (lo + hi);
            (positive_mass(base, mid) > 1.0 ? hi : lo) = mid;
        }
        m = 0.5 * (lo + hi);
        Vec out(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) out[i] = std::max(base[i] + 4.0 * m, 0.0);
        const double mass = positive_mass(base, m);
        for (double& x : out) x /= mass;
        return out;
    };

    Vec kphi(static_cast<std::size_t>(n));
    double m = 0.0, change = 1.0;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        kernel.apply(phi, kphi);
        const auto t = truncate(kphi, m);
        change = 0.0;
        double peak = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double next = (1.0 - omega) * phi[i] + omega * t[i];
            change = std::max(change, std::abs(next - phi[i]));
            phi[i] = next;
            peak = std::max(peak, next);
        }
        if (change < 1e-13 * peak) break;
    }
    kernel.apply(phi, kphi);
    (void)truncate(kphi, m);  // multiplier of the final iterate

    Vec z(phi.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        z[i] = std::sqrt(phi[i]);
        peak = std::max(peak, phi[i]);
    }
    int last = -1;
    for (int i = 0; i < n; ++i)
        if (phi[static_cast<std::size_t>(i)] > 1e-10 * peak) last = i;

    RadialField field(g, z);
    SolveResult r(field);
    r.kind = SolveKind::thomas_fermi;
    r.alpha = alpha;
    r.iterations = it;
    r.report = evaluate(field, kernel);
    r.lambda = -4.0 * m;
    r.tf_multiplier = m;
    r.support_radius = (last + 1) * g.spacing();
    const auto gradient_free = EnergyReport::from_moments(0.0, r.report.B, r.report.C, r.report.rho2);
    r.residuals = identity_residuals(gradient_free, r.lambda, alpha, 1.0);
    double sup = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (phi[k] > 0.0 && phi[k + 1] > 0.0) sup = std::max(sup, std::abs(phi[k] - kphi[k] - 4.0 * m));
    }
    r.residuals.euler_lagrange_sup = sup / (4.0 * std::abs(m));
    r.lambda_enp = lambda_enp(gradient_free, alpha, 1.0);
    r.tail_fraction = detail::tail_fraction(g, z);
    r.converged = it < cfg.max_iters;
    if (last + 1 >= static_cast<int>(0.95 * n))
        r.note = "support reaches the domain boundary; enlarge r_max";
    return r;
}

}  // namespace gpp
