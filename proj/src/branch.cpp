#include "gpp/branch.hpp"

#include "gpp/errors.hpp"
#include "gpp/log.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gpp {

namespace {

using std::numbers::pi;

double quartic_for(SolveKind kind) { return kind == SolveKind::choquard_min ? 0.0 : 1.0; }

struct Trial {
    double width;
    double lambda;
};

// Critical dilation of a mass-rho Gaussian: the fiber of its moments gives the width,
// and the Nehari multiplier at that width gives the decay rate.
std::optional<Trial> gaussian_trial(double alpha, double rho, double quartic, bool mountain_pass, KernelCache& cache) {
    const auto g = build_grid(512, 12.0);
    const auto u = RadialField::sample(g, [](double r) { return std::pow(pi, -0.75) * std::exp(-0.5 * r * r); });
    const double A1 = dirichlet_energy(u), B1 = l4_norm4(u), C1 = interaction_energy(cache.get(alpha, g), u);
    const double A = A1 * rho * rho, B = quartic * B1 * std::pow(rho, 4), C = C1 * std::pow(rho, 4);
    const auto fib = fiber_profile(EnergyReport::from_moments(A, B, C, rho * rho), alpha);
    const auto t = mountain_pass ? fib.t_max : fib.t_min;
    if (!t) return std::nullopt;
    const double lam = (C * std::pow(*t, 3.0 - alpha) - A * *t * *t - B * std::pow(*t, 3.0)) / (rho * rho);
    return Trial{1.0 / *t, lam};
}

double trial_radius(const std::optional<Trial>& t, double fallback) {
    if (!t) return fallback;
    if (t->lambda > 0.0) return 3.0 * t->width + 25.0 / std::sqrt(t->lambda);
    return 12.0 * t->width;
}

double tail_ratio(const RadialField& u) {
    const double peak = u.max_abs();
    if (peak == 0.0) return 0.0;
    const double cut = 0.9 * u.grid().r_max();
    double tail = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (u.grid().node(i) > cut) tail = std::max(tail, std::abs(u[i]));
    return tail / peak;
}

// Radius beyond which |u| stays below `level` times the peak.
double radius_below(const RadialField& u, double level) {
    const double peak = u.max_abs();
    int last = 0;
    for (int i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > level * peak) last = i;
    return u.grid().node(last) + 0.5 * u.grid().spacing();
}

SolveResult dispatch(SolveKind kind, const GppParams& p, const RieszKernel& k, const SolverConfig& cfg,
                     const std::optional<RadialField>& seed) {
    switch (kind) {
        case SolveKind::global_min:
        case SolveKind::local_min: return minimize_normalized(p, k, cfg, seed);
        case SolveKind::mp_type2: return solve_mp_type2(p, k, cfg, seed);
        case SolveKind::choquard_min: return solve_choquard_min(p.alpha, k, cfg, p.rho, seed);
        case SolveKind::choquard_frequency: return solve_choquard_frequency(p.alpha, k, cfg);
        case SolveKind::choquard_mp: return solve_choquard_mp(p.alpha, k, cfg);
        case SolveKind::thomas_fermi: return solve_tf(p.alpha, k, cfg);
    }
    fail(Errc::invalid_argument, "unknown solve kind");
}

}  // namespace

SolveResult solve_auto(SolveKind kind, const GppParams& params, const SolverConfig& cfg, const DomainPolicy& policy,
                       KernelCache& cache, const std::optional<RadialField>& warm) {
    params.validate();
    const double alpha = params.alpha, rho = params.rho;
    SolverConfig local = cfg;
    double r_max = policy.r_max;
    const bool adaptive = r_max <= 0.0;
    bool ratio_driven = true;

    switch (kind) {
        case SolveKind::thomas_fermi:
            if (adaptive) r_max = 4.0;
            ratio_driven = false;
            break;
        case SolveKind::choquard_frequency:
            if (adaptive) r_max = 60.0 * cfg.seed_width;
            break;
        case SolveKind::choquard_mp:
            if (adaptive) r_max = 40.0 * cfg.seed_width;
            ratio_driven = false;
            break;
        default: {
            const auto trial = gaussian_trial(alpha, rho, quartic_for(kind), kind == SolveKind::mp_type2, cache);
            if (trial && !warm) local.seed_width = trial->width;
            if (adaptive) r_max = trial_radius(trial, 100.0 * cfg.seed_width);
            break;
        }
    }
    if (adaptive && warm && kind != SolveKind::mp_type2) {
        // Keep at least the radius the warm state needed.
        r_max = std::max(r_max, radius_below(*warm, 0.1 * policy.tail_target) / 0.9);
    }

    std::optional<RadialField> seed = warm;
    bool retried = false;
    SolveResult result(RadialField::zeros(build_grid(8, 1.0)));
    for (int pass = 0; pass <= policy.max_regrids; ++pass) {
        const auto grid = build_grid(policy.n, r_max);
        const auto kernel = cache.get(alpha, grid);
        result = dispatch(kind, params, kernel, local, seed);
        log::info("solve {} alpha={} rho={} r_max={:.6g}: F={:.10g} lambda={:.6g} res={:.2e}{}", to_string(kind), alpha,
                  rho, r_max, result.report.F, result.lambda, result.residuals.euler_lagrange_sup,
                  result.collapsed ? " spreading" : "");
        if (kind == SolveKind::thomas_fermi) {
            if (!result.note.empty() && adaptive && pass < policy.max_regrids) {
                r_max *= 2.0;
                continue;
            }
            return result;
        }
        if (result.collapsed) {
            if (adaptive && !retried) {
                retried = true;
                r_max *= 2.0;
                seed = warm;
                continue;
            }
            return result;
        }
        if (!adaptive || !ratio_driven || pass == policy.max_regrids) return result;
        const double ratio = tail_ratio(result.state);
        if (ratio > policy.tail_target) {
            double grow = 0.25 * r_max;
            if (result.lambda > 0.0)
                grow = std::max(grow, 1.2 * std::log(ratio / (0.1 * policy.tail_target)) / std::sqrt(result.lambda));
            r_max += grow;
            seed = result.state;
            continue;
        }
        const double needed = radius_below(result.state, 0.1 * policy.tail_target) / 0.9;
        if (r_max > 1.6 * needed) {
            r_max = needed;
            seed = result.state;
            continue;
        }
        return result;
    }
    return result;
}

BranchRow make_row(double rho, const SolveResult& r) {
    BranchRow row;
    row.rho = rho;
    row.kind = r.kind;
    row.collapsed = r.collapsed;
    row.converged = r.converged;
    row.m = r.collapsed ? 0.0 : (r.kind == SolveKind::choquard_min ? r.report.E_choquard : r.report.F);
    row.lambda = r.lambda;
    row.A = r.report.A;
    row.B = r.report.B;
    row.C = r.report.C;
    const double q = r.kind == SolveKind::choquard_min ? 0.0 : 1.0;
    if (r.report.rho2 > 0.0) row.lambda_nehari = (r.report.C - r.report.A - q * r.report.B) / r.report.rho2;
    row.lambda_enp = r.lambda_enp;
    row.nehari = r.residuals.nehari;
    row.pohozaev = r.residuals.pohozaev;
    row.el_sup = r.residuals.euler_lagrange_sup;
    row.r_max = r.state.grid().r_max();
    row.iterations = r.iterations;
    return row;
}

BranchCurve sweep(double alpha, const std::vector<double>& rhos, const SolverConfig& cfg, SolveKind kind,
                  const SweepOptions& options, KernelCache& cache) {
    for (std::size_t i = 1; i < rhos.size(); ++i)
        if (!(rhos[i] > rhos[i - 1])) fail(Errc::invalid_argument, "sweep masses must be strictly increasing");
    if (kind == SolveKind::mp_type2 && !(alpha < 1.0))
        fail(Errc::invalid_argument, "mp-type2 sweeps need alpha < 1");
    if (kind == SolveKind::thomas_fermi || kind == SolveKind::choquard_frequency || kind == SolveKind::choquard_mp)
        fail(Errc::invalid_argument, fmt::format("{} is not indexed by mass", to_string(kind)));

    BranchCurve curve;
    curve.alpha = alpha;
    curve.kind = kind;
    std::optional<RadialField> warm;
    for (double rho : rhos) {
        SolveResult r(RadialField::zeros(build_grid(8, 1.0)));
        try {
            r = solve_auto(kind, GppParams{alpha, rho, std::nullopt}, cfg, options.domain, cache, warm);
        } catch (const Error& e) {
            log::warn("sweep row rho={} failed: {}", rho, e.what());
            r.note = e.what();
            r.kind = kind;
            r.collapsed = false;
            r.converged = false;
            curve.rows.push_back(make_row(rho, r));
            curve.rows.back().m = 0.0;
            curve.results.push_back(std::move(r));
            continue;
        }
        curve.rows.push_back(make_row(rho, r));
        if (r.converged) warm = r.state;
        curve.results.push_back(std::move(r));
    }

    if (options.spot_checks > 0 && !curve.rows.empty()) {
        std::vector<std::size_t> picks;
        const std::size_t last = curve.rows.size() - 1;
        for (std::size_t idx : {std::size_t{0}, last / 2, last})
            if (std::find(picks.begin(), picks.end(), idx) == picks.end()) picks.push_back(idx);
        picks.resize(std::min(picks.size(), static_cast<std::size_t>(options.spot_checks)));
        double worst = 0.0;
        for (std::size_t idx : picks) {
            const auto& row = curve.rows[idx];
            if (!row.converged) continue;
            const auto cold = solve_auto(kind, GppParams{alpha, row.rho, std::nullopt}, cfg, options.domain, cache);
            const double m = make_row(row.rho, cold).m;
            worst = std::max(worst, std::abs(m - row.m) / std::max(std::abs(row.m), 1e-300));
        }
        curve.spot_check_max_rel_diff = worst;
    }
    return curve;
}

std::pair<double, double> default_window(const BranchCurve& curve, bool large) {
    std::vector<double> rs;
    for (const auto& r : curve.rows)
        if (r.converged) rs.push_back(r.rho);
    if (rs.empty()) fail(Errc::insufficient_data, "no converged rows");
    if (large) return {std::max(rs.front(), rs.back() / 10.0), rs.back()};
    return {rs.front(), std::min(rs.back(), rs.front() * 10.0)};
}

AsymptoticFit fit_power_law(const BranchCurve& curve, BranchColumn column, std::pair<double, double> window) {
    std::vector<double> x, y;
    int sign = 0;
    for (const auto& r : curve.rows) {
        if (!r.converged || r.rho < window.first * (1 - 1e-12) || r.rho > window.second * (1 + 1e-12)) continue;
        const double v = column == BranchColumn::lambda ? r.lambda : r.m;
        const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0 || (sign != 0 && s != sign))
            fail(Errc::sign_change_in_window, fmt::format("value changes sign or vanishes at rho={}", r.rho));
        sign = s;
        x.push_back(std::log(r.rho));
        y.push_back(std::log(std::abs(v)));
    }
    if (x.size() < 4) fail(Errc::insufficient_data, fmt::format("{} converged rows in window, need 4", x.size()));
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    AsymptoticFit f;
    f.exponent = sxy / sxx;
    f.prefactor = sign * std::exp(my - f.exponent * mx);
    f.r_squared = syy > 0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    f.window = window;
    f.points = static_cast<int>(x.size());
    return f;
}

double limit_profile_error(const SolveResult& result, const SolveResult& reference, RescaleKind kind, NormKind metric) {
    GppParams params{result.alpha, result.rho(), std::nullopt};
    if (kind == RescaleKind::lambda) params.lambda = result.lambda;
    const auto a = rescale_family(result.state, params, kind);
    const auto& b = reference.state;
    RadialField da = a, db = b;
    if (!(a.grid() == b.grid())) {
        // Common grid covering both supports at the finer spacing.
        const double R = std::max(a.grid().r_max(), b.grid().r_max());
        const double h = std::min(a.grid().spacing(), b.grid().spacing());
        const int n = static_cast<int>(std::clamp(std::ceil(R / h), 8.0, 65536.0));
        const auto common = build_grid(n, R);
        da = resample(a, common);
        db = resample(b, common);
    }
    std::vector<double> d(static_cast<std::size_t>(da.size()));
    for (int i = 0; i < da.size(); ++i) d[static_cast<std::size_t>(i)] = da[i] - db[i];
    const RadialField diff(da.grid(), std::move(d));
    switch (metric) {
        case NormKind::l2: return l2_norm(diff);
        case NormKind::l4: return lp_norm(diff, 4.0);
        case NormKind::h1: return std::sqrt(dirichlet_energy(diff) + mass(diff));
    }
    return 0.0;
}

namespace {

bool usable(const SolveResult& r) { return r.converged && !r.collapsed; }

class Budget {
public:
    Budget(int limit, ThresholdReport& rep) : limit_(limit), rep_(rep) {}
    void charge() {
        if (++rep_.solves > limit_)
            fail(Errc::bisection_budget_exhausted, fmt::format("threshold search exceeded {} solves", limit_));
    }

private:
    int limit_;
    ThresholdReport& rep_;
};

void detect_subcritical(double alpha, const SolverConfig& cfg, const ThresholdOptions& opt, KernelCache& cache,
                        ThresholdReport& rep) {
    Budget budget(opt.budget, rep);
    const double barK = rep.rho_doublestar_lower;
    auto solve = [&](double rho, const std::optional<RadialField>& warm) {
        budget.charge();
        return solve_auto(SolveKind::global_min, GppParams{alpha, rho, std::nullopt}, cfg, opt.domain, cache, warm);
    };

    // Anchor: a converged state with negative energy.
    double rho_hi = 2.0 * barK;
    auto hi = solve(rho_hi, std::nullopt);
    while (!(usable(hi) && hi.report.F < 0.0)) {
        rho_hi *= 1.5;
        hi = solve(rho_hi, std::nullopt);
    }

    // Continue downward until the local minimum disappears.
    double last_ok = rho_hi;
    RadialField last_state = hi.state;
    double neg_rho = rho_hi;
    RadialField neg_state = hi.state;
    std::optional<double> pos_rho, fail_rho;
    while (true) {
        const double rho = 0.92 * last_ok;
        if (rho < 0.5 * barK) break;
        auto r = solve(rho, last_state);
        if (!usable(r)) {
            fail_rho = rho;
            break;
        }
        if (r.report.F < 0.0) {
            neg_rho = rho;
            neg_state = r.state;
        } else if (!pos_rho) {
            pos_rho = rho;
        }
        last_ok = rho;
        last_state = r.state;
    }

    // rho*: sign of the energy, spreading counts as zero energy.
    double lo = pos_rho ? *pos_rho : (fail_rho ? *fail_rho : 0.5 * barK);
    double up = neg_rho;
    RadialField warm = neg_state;
    while (up - lo > opt.rel_tol * up) {
        const double mid = 0.5 * (lo + up);
        auto r = solve(mid, warm);
        if (usable(r) && r.report.F < 0.0) {
            up = mid;
            warm = r.state;
        } else {
            lo = mid;
        }
    }
    rep.rho_star = 0.5 * (lo + up);

    // Empirical rho**: smallest mass where the warm-started local minimum still converges.
    if (fail_rho) {
        lo = *fail_rho;
        up = last_ok;
        warm = last_state;
        while (up - lo > opt.rel_tol * up) {
            const double mid = 0.5 * (lo + up);
            auto r = solve(mid, warm);
            if (usable(r)) {
                up = mid;
                warm = r.state;
            } else {
                lo = mid;
            }
        }
        rep.rho_doublestar_empirical = up;
    } else {
        rep.rho_doublestar_empirical = last_ok;
    }
    rep.ordering_ok = rep.rho_doublestar_empirical && rep.rho_star &&
                      barK <= *rep.rho_doublestar_empirical && *rep.rho_doublestar_empirical < *rep.rho_star;
}

void detect_critical(const SolverConfig& cfg, const ThresholdOptions& opt, KernelCache& cache, ThresholdReport& rep) {
    Budget budget(opt.budget, rep);
    budget.charge();
    DomainPolicy freq_domain = opt.domain;
    const auto w = solve_auto(SolveKind::choquard_frequency, GppParams{1.0, 1.0, std::nullopt}, cfg, freq_domain, cache);
    const double rs = std::sqrt(w.report.rho2);
    rep.rho_star_critical = rs;
    auto solve = [&](double rho, const std::optional<RadialField>& warm) {
        budget.charge();
        return solve_auto(SolveKind::global_min, GppParams{1.0, rho, std::nullopt}, cfg, opt.domain, cache, warm);
    };
    double lo = 0.9 * rs, up = 1.1 * rs;
    auto top = solve(up, std::nullopt);
    if (!(usable(top) && top.report.F < 0.0))
        fail(Errc::bisection_failure, fmt::format("no negative-energy state at rho={}", up));
    RadialField warm = top.state;
    const double tol = std::min(opt.rel_tol, 5e-3) * rs;
    while (up - lo > tol) {
        const double mid = 0.5 * (lo + up);
        auto r = solve(mid, warm);
        if (usable(r) && r.report.F < 0.0) {
            up = mid;
            warm = r.state;
        } else {
            lo = mid;
        }
    }
    rep.rho_star = 0.5 * (lo + up);
    rep.ordering_ok = std::abs(*rep.rho_star - rs) <= 1e-2 * rs;
}

}  // namespace

ThresholdReport detect_thresholds(double alpha, const SolverConfig& cfg, const ThresholdOptions& options,
                                  KernelCache& cache) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        fail(Errc::invalid_argument, fmt::format("thresholds are defined for alpha in (0,1], got {}", alpha));
    ThresholdReport rep;
    rep.alpha = alpha;
    if (alpha < 1.0) {
        rep.rho_doublestar_lower = threshold_constants(alpha).barK_alpha;
        detect_subcritical(alpha, cfg, options, cache, rep);
    } else {
        detect_critical(cfg, options, cache, rep);
    }
    return rep;
}

double mass_radius(const SolveResult& result, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) fail(Errc::invalid_argument, "theta must lie in (0,1)");
    const auto& u = result.state;
    const auto w = u.grid().weights();
    const double total = mass(u);
    double cum = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        cum += w[static_cast<std::size_t>(i)] * u[i] * u[i];
        if (cum >= theta * total) return (i + 1) * u.grid().spacing();
    }
    return u.grid().r_max();
}

DecayDiagnostic decay_diagnostic(const SolveResult& result) {
    if (result.kind == SolveKind::thomas_fermi)
        fail(Errc::tail_underresolved, "Thomas-Fermi states have compact support");
    if (!(result.lambda > 0.0)) fail(Errc::invalid_argument, "decay diagnostic needs lambda > 0");
    const auto& u = result.state;
    const double peak = u.max_abs();
    std::vector<double> x, y;
    for (int i = 0; i < u.size(); ++i) {
        const double r = u.grid().node(i);
        const double rel = u[i] / peak;
        if (r < 0.9 * u.grid().r_max() && rel <= 1e-4 && rel >= 1e-9) {
            x.push_back(r);
            y.push_back(-std::log(r * u[i]));
        }
    }
    if (x.size() < 8) fail(Errc::tail_underresolved, fmt::format("{} far-field nodes, need 8", x.size()));
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    DecayDiagnostic d;
    d.slope = sxy / sxx;
    d.expected = std::sqrt(result.lambda);
    d.points = static_cast<int>(x.size());
    d.window_ok = std::abs(d.slope / d.expected - 1.0) <= 0.25;
    return d;
}

ShapeCheck check_shape(const BranchCurve& curve, double tolerance) {
    ShapeCheck s;
    std::vector<const BranchRow*> rows;
    for (const auto& r : curve.rows)
        if (r.converged && r.m < 0.0) rows.push_back(&r);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i]->m < rows[i - 1]->m)) s.decreasing = false;
    if (rows.size() >= 3) s.worst_second_difference = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const auto &a = *rows[i - 2], &b = *rows[i - 1], &c = *rows[i];
        const double s1 = (b.m - a.m) / (b.rho - a.rho), s2 = (c.m - b.m) / (c.rho - b.rho);
        // Equals m_{i+1} - 2 m_i + m_{i-1} on uniform spacing.
        const double second = 0.5 * (s2 - s1) * (c.rho - a.rho);
        const double rel = second / std::abs(b.m);
        s.worst_second_difference = std::max(s.worst_second_difference, rel);
        if (rel > tolerance) s.concave = false;
    }
    return s;
}

}  // namespace gpp
