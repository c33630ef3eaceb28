#include "gpp/config.hpp"

#include "gpp/errors.hpp"

#include <fmt/format.h>

#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace gpp {

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::solve: return "solve";
        case Command::sweep: return "sweep";
        case Command::limits: return "limits";
        case Command::thresholds: return "thresholds";
        case Command::verify: return "verify";
    }
    return "?";
}

std::string_view to_string(OutputFormat f) noexcept { return f == OutputFormat::csv ? "csv" : "json"; }

std::string_view to_string(RescaleKind k) noexcept {
    switch (k) {
        case RescaleKind::choquard_small_mass: return "choquard-small-mass";
        case RescaleKind::choquard_large_mass: return "choquard-large-mass";
        case RescaleKind::tf: return "tf";
        case RescaleKind::lambda: return "lambda";
    }
    return "?";
}

namespace {

[[noreturn]] void bad(const std::string& what) { fail(Errc::config_parse, what); }

void reject_unknown(const Json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) bad(fmt::format("{} must be an object", where));
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) bad(fmt::format("unknown key '{}' in {}", key, where));
    }
}

double number(const Json& v, std::string_view key) {
    if (!v.is_number()) bad(fmt::format("'{}' must be a number", key));
    return v.get<double>();
}

int integer(const Json& v, std::string_view key) {
    if (!v.is_number_integer()) bad(fmt::format("'{}' must be an integer", key));
    return v.get<int>();
}

std::string text(const Json& v, std::string_view key) {
    if (!v.is_string()) bad(fmt::format("'{}' must be a string", key));
    return v.get<std::string>();
}

template <typename E, std::size_t N>
E choose(const std::string& s, std::string_view key, const std::array<E, N>& options) {
    for (auto o : options)
        if (to_string(o) == s) return o;
    bad(fmt::format("invalid value '{}' for '{}'", s, key));
}

void parse_grid(const Json& g, DomainPolicy& d) {
    reject_unknown(g, "grid", {"n", "r_max", "tail_target", "max_regrids"});
    if (g.contains("n")) d.n = integer(g["n"], "grid.n");
    if (g.contains("r_max")) {
        const auto& r = g["r_max"];
        if (r.is_string()) {
            if (r.get<std::string>() != "auto") bad("grid.r_max must be a number or \"auto\"");
            d.r_max = 0.0;
        } else {
            d.r_max = number(r, "grid.r_max");
            if (!(d.r_max > 0.0)) bad("grid.r_max must be positive");
        }
    }
    if (g.contains("tail_target")) d.tail_target = number(g["tail_target"], "grid.tail_target");
    if (g.contains("max_regrids")) d.max_regrids = integer(g["max_regrids"], "grid.max_regrids");
    if (d.n < 8) bad("grid.n must be at least 8");
    if (!(d.tail_target > 0.0)) bad("grid.tail_target must be positive");
    if (d.max_regrids < 0) bad("grid.max_regrids must be nonnegative");
}

void parse_solver(const Json& s, SolverConfig& c) {
    reject_unknown(s, "solver",
                   {"dt", "max_iters", "residual_tol", "damping", "H_fraction", "seed_width", "newton_iters",
                    "collapse_tail"});
    if (s.contains("dt")) c.dt = number(s["dt"], "solver.dt");
    if (s.contains("max_iters")) c.max_iters = integer(s["max_iters"], "solver.max_iters");
    if (s.contains("residual_tol")) c.residual_tol = number(s["residual_tol"], "solver.residual_tol");
    if (s.contains("damping")) c.damping = number(s["damping"], "solver.damping");
    if (s.contains("H_fraction")) c.H_fraction = number(s["H_fraction"], "solver.H_fraction");
    if (s.contains("seed_width")) c.seed_width = number(s["seed_width"], "solver.seed_width");
    if (s.contains("newton_iters")) c.newton_iters = integer(s["newton_iters"], "solver.newton_iters");
    if (s.contains("collapse_tail")) c.collapse_tail = number(s["collapse_tail"], "solver.collapse_tail");
    try {
        c.validate();
    } catch (const Error& e) {
        bad(e.what());
    }
}

}  // namespace

Json RunConfig::canonical() const {
    Json grid_json{{"n", grid.n},
                   {"r_max", grid.r_max > 0.0 ? Json(grid.r_max) : Json("auto")},
                   {"tail_target", grid.tail_target},
                   {"max_regrids", grid.max_regrids}};
    Json solver_json{{"dt", solver.dt},
                     {"max_iters", solver.max_iters},
                     {"residual_tol", solver.residual_tol},
                     {"damping", solver.damping},
                     {"H_fraction", solver.H_fraction},
                     {"seed_width", solver.seed_width},
                     {"newton_iters", solver.newton_iters},
                     {"collapse_tail", solver.collapse_tail}};
    Json j;
    j["command"] = std::string(to_string(command));
    j["alpha"] = alpha;
    if (rho_is_list)
        j["rho_list"] = rhos;
    else
        j["rho"] = rhos.front();
    j["kind"] = std::string(to_string(kind));
    j["grid"] = grid_json;
    j["solver"] = solver_json;
    j["format"] = std::string(to_string(format));
    j["threads"] = threads;
    j["spot_checks"] = spot_checks;
    j["seed"] = seed;
    j["rescale"] = rescale ? Json(std::string(to_string(*rescale))) : Json("auto");
    j["thresholds"] = Json{{"rel_tol", thresholds.rel_tol}, {"budget", thresholds.budget}};
    return j;
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical().dump()); }

RunConfig parse_config(std::string_view body) {
    Json j;
    try {
        j = Json::parse(body);
    } catch (const std::exception& e) {
        bad(fmt::format("malformed JSON: {}", e.what()));
    }
    reject_unknown(j, "config",
                   {"command", "alpha", "rho", "rho_list", "kind", "grid", "solver", "output_dir", "format", "threads",
                    "spot_checks", "seed", "rescale", "thresholds"});
    RunConfig c;
    if (!j.contains("command")) bad("missing 'command'");
    c.command = choose(text(j["command"], "command"), "command",
                       std::array{Command::solve, Command::sweep, Command::limits, Command::thresholds,
                                  Command::verify});
    if (j.contains("alpha")) c.alpha = number(j["alpha"], "alpha");
    if (!(c.alpha > 0.0 && c.alpha < 3.0)) bad("alpha must lie in (0,3)");

    if (j.contains("rho") && j.contains("rho_list")) bad("give either 'rho' or 'rho_list', not both");
    if (j.contains("rho")) {
        c.rhos = {number(j["rho"], "rho")};
    } else if (j.contains("rho_list")) {
        const auto& l = j["rho_list"];
        if (!l.is_array() || l.empty()) bad("'rho_list' must be a non-empty array");
        c.rhos.clear();
        for (const auto& v : l) c.rhos.push_back(number(v, "rho_list"));
        c.rho_is_list = true;
        for (std::size_t i = 1; i < c.rhos.size(); ++i)
            if (!(c.rhos[i] > c.rhos[i - 1])) bad("'rho_list' must be strictly increasing");
    }
    for (double r : c.rhos)
        if (!(r > 0.0)) bad("rho values must be positive");

    if (j.contains("kind")) {
        const auto s = text(j["kind"], "kind");
        const auto k = parse_solve_kind(s);
        if (!k) bad(fmt::format("invalid value '{}' for 'kind'", s));
        c.kind = *k;
    }
    if (j.contains("grid")) parse_grid(j["grid"], c.grid);
    if (j.contains("solver")) parse_solver(j["solver"], c.solver);
    if (j.contains("output_dir")) c.output_dir = text(j["output_dir"], "output_dir");
    if (j.contains("format"))
        c.format = choose(text(j["format"], "format"), "format", std::array{OutputFormat::csv, OutputFormat::json});
    if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
    if (c.threads < 1) bad("'threads' must be at least 1");
    if (j.contains("spot_checks")) c.spot_checks = integer(j["spot_checks"], "spot_checks");
    if (c.spot_checks < 0) bad("'spot_checks' must be nonnegative");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) bad("'seed' must be a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("rescale")) {
        const auto s = text(j["rescale"], "rescale");
        if (s != "auto")
            c.rescale = choose(s, "rescale",
                               std::array{RescaleKind::choquard_small_mass, RescaleKind::choquard_large_mass,
                                          RescaleKind::tf, RescaleKind::lambda});
    }
    if (j.contains("thresholds")) {
        const auto& t = j["thresholds"];
        reject_unknown(t, "thresholds", {"rel_tol", "budget"});
        if (t.contains("rel_tol")) c.thresholds.rel_tol = number(t["rel_tol"], "thresholds.rel_tol");
        if (t.contains("budget")) c.thresholds.budget = integer(t["budget"], "thresholds.budget");
        if (!(c.thresholds.rel_tol > 0.0) || c.thresholds.budget < 1) bad("invalid thresholds settings");
    }
    if (c.command == Command::solve && c.rho_is_list) bad("'solve' takes a single 'rho'");
    if ((c.command == Command::sweep || c.command == Command::limits) && c.rhos.size() < 2)
        bad(fmt::format("'{}' needs a 'rho_list' with at least two values", to_string(c.command)));
    c.thresholds.domain = c.grid;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::config_parse, fmt::format("cannot read config '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace gpp
