#include "gpp/run.hpp"

#include "gpp/errors.hpp"
#include "gpp/log.hpp"
#include "gpp/verify.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace gpp {

namespace fs = std::filesystem;

SolveKind reference_kind(RescaleKind kind) {
    switch (kind) {
        case RescaleKind::choquard_small_mass: return SolveKind::choquard_min;
        case RescaleKind::choquard_large_mass: return SolveKind::choquard_mp;
        case RescaleKind::tf: return SolveKind::thomas_fermi;
        case RescaleKind::lambda: return SolveKind::choquard_frequency;
    }
    return SolveKind::thomas_fermi;
}

RescaleKind default_rescale(double alpha, SolveKind kind, double first_rho) {
    if (alpha == 1.0) return RescaleKind::lambda;
    if (kind == SolveKind::mp_type2) return RescaleKind::choquard_large_mass;
    if (alpha > 1.0 && first_rho < 1.0) return RescaleKind::choquard_small_mass;
    return RescaleKind::tf;
}

namespace {

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path);
    if (!f) fail(Errc::invalid_argument, fmt::format("cannot write '{}'", path.string()));
    f << body;
}

Json stamped(const RunConfig& c) {
    Json j;
    j["config_hash"] = c.hash();
    j["config"] = c.canonical();
    return j;
}

SweepOptions sweep_options(const RunConfig& c) {
    SweepOptions o;
    o.domain = c.grid;
    o.spot_checks = c.spot_checks;
    return o;
}

int run_solve(const RunConfig& c, const fs::path& dir, std::ostream& out) {
    KernelCache cache;
    const auto r = solve_auto(c.kind, GppParams{c.alpha, c.rhos.front(), std::nullopt}, c.solver, c.grid, cache);
    const std::string profile = "solve_profile.dat";
    write_field((dir / profile).string(), r.state, c.alpha, r.rho(), {"config_hash " + c.hash()});
    auto j = stamped(c);
    j["result"] = to_json(r, profile);
    write_text(dir / "solve.json", dump(j));
    out << fmt::format("{} alpha={} rho={:.10g}: F={:.12g} lambda={:.12g} converged={}\n", to_string(r.kind), c.alpha,
                       r.rho(), r.report.F, r.lambda, r.converged);
    if (!r.converged) log::warn("solve did not converge: {}", r.note.empty() ? "residual above tolerance" : r.note);
    return 0;
}

Json fits_for(const BranchCurve& curve) {
    Json fits = Json::object();
    std::vector<std::pair<std::string, BranchColumn>> columns{{"m", BranchColumn::m}, {"lambda", BranchColumn::lambda}};
    if (curve.kind == SolveKind::mp_type2) columns.push_back({"M", BranchColumn::M});
    for (bool large : {false, true}) {
        const auto window = default_window(curve, large);
        for (const auto& [name, column] : columns) {
            const auto key = fmt::format("{}_{}", name, large ? "large" : "small");
            try {
                fits[key] = to_json(fit_power_law(curve, column, window));
            } catch (const Error& e) {
                fits[key] = Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
            }
        }
    }
    return fits;
}

int run_sweep(const RunConfig& c, const fs::path& dir, std::ostream& out) {
    KernelCache cache;
    auto curve = sweep(c.alpha, c.rhos, c.solver, c.kind, sweep_options(c), cache);
    curve.provenance = c.hash();
    if (c.format == OutputFormat::csv) {
        std::ofstream f(dir / "sweep.csv");
        write_curve_csv(f, curve);
    } else {
        write_text(dir / "sweep.json", dump(curve_json(curve)));
    }
    auto side = stamped(c);
    side["fits"] = fits_for(curve);
    side["shape"] = to_json(check_shape(curve));
    side["spot_check_max_rel_diff"] =
        curve.spot_check_max_rel_diff ? Json(*curve.spot_check_max_rel_diff) : Json(nullptr);
    write_text(dir / "sweep_fits.json", dump(side));
    int converged = 0;
    for (const auto& r : curve.rows) converged += r.converged ? 1 : 0;
    out << fmt::format("sweep {} alpha={}: {}/{} rows converged\n", to_string(c.kind), c.alpha, converged,
                       curve.rows.size());
    return 0;
}

int run_limits(const RunConfig& c, const fs::path& dir, std::ostream& out) {
    KernelCache cache;
    const auto rescale = c.rescale.value_or(default_rescale(c.alpha, c.kind, c.rhos.front()));
    const auto reference = solve_auto(reference_kind(rescale), GppParams{c.alpha, 1.0, std::nullopt}, c.solver,
                                      DomainPolicy{.n = c.grid.n, .r_max = 0.0, .tail_target = c.grid.tail_target,
                                                   .max_regrids = c.grid.max_regrids},
                                      cache);
    const auto curve = sweep(c.alpha, c.rhos, c.solver, c.kind, sweep_options(c), cache);
    Json rows = Json::array();
    std::string csv = fmt::format("# config_hash={}\nrho,converged,l2,l4,h1\n", c.hash());
    for (std::size_t i = 0; i < curve.rows.size(); ++i) {
        const auto& row = curve.rows[i];
        double e[3] = {NAN, NAN, NAN};
        if (row.converged) {
            int k = 0;
            for (auto metric : {NormKind::l2, NormKind::l4, NormKind::h1})
                e[k++] = limit_profile_error(curve.results[i], reference, rescale, metric);
        }
        rows.push_back(Json{{"rho", row.rho},
                            {"converged", row.converged},
                            {"l2", std::isfinite(e[0]) ? Json(e[0]) : Json(nullptr)},
                            {"l4", std::isfinite(e[1]) ? Json(e[1]) : Json(nullptr)},
                            {"h1", std::isfinite(e[2]) ? Json(e[2]) : Json(nullptr)}});
        csv += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g}\n", row.rho, row.converged ? 1 : 0, e[0], e[1], e[2]);
        out << fmt::format("rho={:<10g} l2={:.6e} l4={:.6e} h1={:.6e}\n", row.rho, e[0], e[1], e[2]);
    }
    if (c.format == OutputFormat::csv) {
        write_text(dir / "limits.csv", csv);
    } else {
        auto j = stamped(c);
        j["rescale"] = std::string(to_string(rescale));
        j["reference"] = to_json(reference, "");
        j["rows"] = rows;
        write_text(dir / "limits.json", dump(j));
    }
    return 0;
}

int run_thresholds(const RunConfig& c, const fs::path& dir, std::ostream& out) {
    KernelCache cache;
    const auto rep = detect_thresholds(c.alpha, c.solver, c.thresholds, cache);
    auto j = stamped(c);
    j["thresholds"] = to_json(rep);
    write_text(dir / "thresholds.json", dump(j));
    out << fmt::format("alpha={} rho*={} rho**_emp={} barK={:.6g} ordering_ok={}\n", c.alpha,
                       rep.rho_star ? fmt::format("{:.6g}", *rep.rho_star) : "-",
                       rep.rho_doublestar_empirical ? fmt::format("{:.6g}", *rep.rho_doublestar_empirical) : "-",
                       rep.rho_doublestar_lower, rep.ordering_ok);
    if (rep.rho_star_critical) out << fmt::format("rho_star_critical={:.10g}\n", *rep.rho_star_critical);
    return 0;
}

int run_verify(const RunConfig& c, const fs::path& dir, std::ostream& out) {
    KernelCache cache;
    VerifyOptions o;
    o.alpha = c.alpha;
    o.rhos = c.rhos;
    o.kind = c.kind;
    o.solver = c.solver;
    o.domain = c.grid;
    o.seed = c.seed;
    const auto rep = verify_suite(o, cache);
    Json checks = Json::array();
    for (const auto& ch : rep.checks) {
        checks.push_back(Json{{"name", ch.name}, {"value", ch.value}, {"limit", ch.limit}, {"passed", ch.passed}});
        out << fmt::format("[{}] {:<52} {:>12.4e} (limit {:.1e})\n", ch.passed ? "PASS" : "FAIL", ch.name, ch.value,
                           ch.limit);
    }
    auto j = stamped(c);
    j["passed"] = rep.ok();
    j["checks"] = checks;
    write_text(dir / "verify.json", dump(j));
    out << (rep.ok() ? "verify: all checks passed\n" : "verify: violations found\n");
    return rep.ok() ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out) {
    omp_set_num_threads(config.threads);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    switch (config.command) {
        case Command::solve: return run_solve(config, dir, out);
        case Command::sweep: return run_sweep(config, dir, out);
        case Command::limits: return run_limits(config, dir, out);
        case Command::thresholds: return run_thresholds(config, dir, out);
        case Command::verify: return run_verify(config, dir, out);
    }
    return 1;
}

}  // namespace gpp
