#include "gpp/verify.hpp"

#include "gpp/energy.hpp"
#include "gpp/errors.hpp"
#include "gpp/log.hpp"

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace gpp {

bool VerifyReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

using Rng = std::mt19937_64;

class Recorder {
public:
    explicit Recorder(VerifyReport& r) : report_(r) {}
    void bound(std::string name, double value, double limit) {
        const bool ok = std::isfinite(value) && value <= limit;
        report_.checks.push_back({std::move(name), value, limit, ok});
    }
    void require(std::string name, bool ok) { report_.checks.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok}); }

private:
    VerifyReport& report_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

RadialField random_field(const RadialGrid& grid, Rng& rng, bool positive) {
    std::uniform_real_distribution<double> amp(positive ? 0.1 : -1.0, 1.0), centre(0.0, 4.0), width(0.4, 1.5);
    std::uniform_int_distribution<int> count(1, 4);
    const int k = count(rng);
    std::vector<std::array<double, 3>> bumps;
    for (int i = 0; i < k; ++i) bumps.push_back({amp(rng), centre(rng), width(rng)});
    return RadialField::sample(grid, [&](double r) {
        double s = 0.0;
        for (const auto& [a, c, w] : bumps) s += a * std::exp(-0.5 * (r - c) * (r - c) / (w * w));
        return s;
    });
}

void check_states(const VerifyOptions& o, KernelCache& cache, Recorder& rec) {
    SweepOptions sw;
    sw.domain = o.domain;
    const auto curve = sweep(o.alpha, o.rhos, o.solver, o.kind, sw, cache);
    for (std::size_t i = 0; i < curve.rows.size(); ++i) {
        const auto& row = curve.rows[i];
        const auto& res = curve.results[i];
        const auto tag = fmt::format("{} rho={:g}", to_string(o.kind), row.rho);
        rec.require(tag + ": converged", row.converged);
        if (!row.converged) continue;
        rec.bound(tag + ": Nehari residual", std::abs(row.nehari), 1e-6);
        if (o.kind != SolveKind::thomas_fermi) rec.bound(tag + ": Pohozaev residual", std::abs(row.pohozaev), 1e-6);
        rec.bound(tag + ": Euler-Lagrange residual", row.el_sup, o.solver.residual_tol);
        rec.bound(tag + ": lambda flow vs ENP", rel(row.lambda, row.lambda_enp), 1e-5);
        rec.bound(tag + ": lambda flow vs Nehari", rel(row.lambda, row.lambda_nehari), 1e-5);
        rec.require(tag + ": lambda > 0", row.lambda > 0.0);
        if (o.kind != SolveKind::thomas_fermi)
            rec.require(tag + ": positive and nonincreasing", is_nonincreasing(res.state, 1e-8));
        if (o.kind == SolveKind::mp_type2) {
            rec.require(tag + ": fiber second derivative negative", res.fiber_d2 && *res.fiber_d2 < 0.0);
            rec.require(tag + ": inside admissible cone", res.in_cone && *res.in_cone);
        }
    }
    if (o.alpha >= 1.0 && o.kind == SolveKind::global_min && curve.rows.size() >= 3) {
        const auto shape = check_shape(curve);
        rec.require("branch: energy strictly decreasing", shape.decreasing);
        rec.bound("branch: second difference / |m|", shape.worst_second_difference, 1e-6);
    }
}

void check_algebra(const VerifyOptions& o, Rng& rng, Recorder& rec) {
    std::uniform_real_distribution<double> ab(0.01, 10.0), rho(0.1, 10.0);
    const double a = o.alpha;
    double enp = 0.0, d2 = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double A = ab(rng), B = ab(rng), r = rho(rng);
        const auto s = solve_enp_system(A, B, r, a);
        const double l = s.lambda * r * r;
        const double scale = std::max({A, B, s.C, std::abs(l)});
        enp = std::max({enp, std::abs(0.5 * A + 0.25 * B - 0.25 * s.C - s.mu) / scale,
                        std::abs(A + B + l - s.C) / scale,
                        std::abs(0.5 * A + 1.5 * l + 0.75 * B - 0.25 * (3.0 + a) * s.C) / scale});
        const FiberProfile f(A, B, s.C, a);
        const double closed = 0.5 * (1.0 - a) * l - (7.0 - a) * s.mu;
        d2 = std::max(d2, std::abs(f.d2phi_at(1.0) - closed) / scale);
    }
    rec.bound("ENP system rows", enp, 1e-13);
    rec.bound("fiber second derivative identity", d2, 1e-12);

    if (a < 1.0) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double B = ab(rng), C = ab(rng);
            auto g = [&](double s) {
                const double t = std::exp(s);
                return 0.75 * B * t - 0.25 * (3.0 - a) * C * std::pow(t, 1.0 - a);
            };
            // Widen the log-t window until it brackets the minimum, scan, then refine with Brent.
            double lo = -20.0, hi = 20.0;
            while (g(lo - 1.0) < g(lo)) lo -= 20.0;
            while (g(hi + 1.0) < g(hi)) hi += 20.0;
            const double step = (hi - lo) / 20000.0;
            double best_s = lo, best = g(lo);
            for (int i = 0; i <= 20000; ++i) {
                const double s = lo + step * i;
                if (g(s) < best) {
                    best = g(s);
                    best_s = s;
                }
            }
            const auto m = boost::math::tools::brent_find_minima(g, best_s - step, best_s + step, 60);
            worst = std::max(worst, rel(m.second, fiber_gap_minimum(B, C, a)));
        }
        rec.bound("fiber minimum law vs closed form", worst, 1e-8);
    }
}

void check_kernel(const VerifyOptions& o, KernelCache& cache, Rng& rng, Recorder& rec) {
    const auto grid = build_grid(512, 20.0);
    const auto kernel = cache.get(o.alpha, grid);
    double sym = 0.0, positivity = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto f = random_field(grid, rng, false), g = random_field(grid, rng, false);
        sym = std::max(sym, rel(bilinear(kernel, f, g), bilinear(kernel, g, f)));
        positivity = std::min(positivity, interaction_energy(kernel, f));
    }
    rec.bound("Riesz bilinear symmetry", sym, 1e-10);
    rec.require("interaction energy nonnegative", positivity >= 0.0);

    const auto small = build_grid(256, 10.0);
    const auto par = build_kernel(o.alpha, small), ser = build_kernel_serial(o.alpha, small);
    double diff = 0.0;
    for (int i = 0; i < small.size(); ++i)
        for (int j = 0; j < small.size(); ++j) diff = std::max(diff, std::abs(par.entry(i, j) - ser.entry(i, j)));
    const auto f = random_field(small, rng, true);
    const auto p1 = apply_potential(par, f), p2 = apply_potential_serial(ser, f);
    for (int i = 0; i < small.size(); ++i) diff = std::max(diff, std::abs(p1[i] - p2[i]));
    rec.bound("parallel vs serial kernel", diff, 0.0);
}

void check_inequalities(const VerifyOptions& o, KernelCache& cache, Rng& rng, Recorder& rec) {
    const auto grid = build_grid(512, 20.0);
    const auto kernel = cache.get(o.alpha, grid);
    const auto c = constants(o.alpha);
    const double a = o.alpha, p = 12.0 / (3.0 + a);
    int gn = 0, hls = 0, cb = 0, dd = 0;
    for (int k = 0; k < o.random_fields; ++k) {
        const auto u = random_field(grid, rng, false);
        const double rho = l2_norm(u), A = dirichlet_energy(u), B = l4_norm4(u), C = interaction_energy(kernel, u);
        if (std::pow(B, 0.25) > c.c_bar_gn * std::pow(rho, 0.25) * std::pow(A, 0.375)) ++gn;
        if (C > c.c_alpha_hls * std::pow(lp_norm(u, p), 4.0)) ++hls;
        if (C > c.c_alpha_hls * std::pow(rho, 4.0 * a / 3.0) * std::pow(B, 1.0 - a / 3.0)) ++cb;
        if (C > c.c_barbar_alpha * std::pow(rho, 1.0 + a) * std::pow(A, 0.5 * (3.0 - a))) ++dd;
    }
    rec.bound("GN L4 bound violations", gn, 0);
    rec.bound("HLS bound violations", hls, 0);
    rec.bound("interaction vs L4 bound violations", cb, 0);
    rec.bound("interaction vs gradient bound violations", dd, 0);
}

void check_dilation(const VerifyOptions& o, KernelCache& cache, Rng& rng, Recorder& rec) {
    const auto grid = build_grid(2048, 20.0);
    const auto kernel = cache.get(o.alpha, grid);
    const auto u = random_field(grid, rng, true);
    const auto base = evaluate(u, kernel);
    double worst = 0.0;
    for (double t : {0.5, 2.0}) {
        const auto d = dilate(u, t);
        const auto r = evaluate(d, kernel);
        worst = std::max({worst, rel(r.rho2, base.rho2), rel(r.A, t * t * base.A), rel(r.B, t * t * t * base.B),
                          rel(r.C, std::pow(t, 3.0 - o.alpha) * base.C)});
    }
    rec.bound("dilation scaling laws", worst, 1e-5);
}

}  // namespace

VerifyReport verify_suite(const VerifyOptions& options, KernelCache& cache) {
    VerifyReport report;
    Recorder rec(report);
    Rng rng(options.seed);
    log::info("verify: algebraic identities");
    check_algebra(options, rng, rec);
    log::info("verify: kernel properties");
    check_kernel(options, cache, rng, rec);
    log::info("verify: interpolation inequalities on {} fields", options.random_fields);
    check_inequalities(options, cache, rng, rec);
    log::info("verify: dilation laws");
    check_dilation(options, cache, rng, rec);
    log::info("verify: solver identities");
    check_states(options, cache, rec);
    return report;
}

}  // namespace gpp
