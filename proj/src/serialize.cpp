#include "gpp/serialize.hpp"

#include <fmt/format.h>

#include <ostream>

namespace gpp {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

Json to_json(const EnergyReport& r) {
    return Json{{"A", r.A},   {"B", r.B},
                {"C", r.C},   {"rho2", r.rho2},
                {"F", r.F},   {"E_choquard", r.E_choquard},
                {"E_tf", r.E_tf}, {"lambda_nehari", r.lambda_nehari}};
}

Json to_json(const IdentityResiduals& r) {
    return Json{{"nehari", r.nehari}, {"pohozaev", r.pohozaev}, {"euler_lagrange_sup", r.euler_lagrange_sup}};
}

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const SolveResult& r, const std::string& profile_path) {
    Json j;
    j["kind"] = std::string(to_string(r.kind));
    j["alpha"] = r.alpha;
    j["rho"] = r.rho();
    j["lambda"] = r.lambda;
    j["lambda_enp"] = r.lambda_enp;
    j["converged"] = r.converged;
    j["collapsed"] = r.collapsed;
    j["iterations"] = r.iterations;
    j["tail_fraction"] = r.tail_fraction;
    j["energy"] = to_json(r.report);
    j["residuals"] = to_json(r.residuals);
    j["grid"] = Json{{"n", r.state.size()}, {"r_max", r.state.grid().r_max()}};
    j["tf_multiplier"] = optional_json(r.tf_multiplier);
    j["support_radius"] = optional_json(r.support_radius);
    j["quotient"] = optional_json(r.quotient);
    j["level_from_quotient"] = optional_json(r.level_from_quotient);
    j["fiber_d2"] = optional_json(r.fiber_d2);
    j["in_cone"] = optional_json(r.in_cone);
    j["note"] = r.note;
    j["profile"] = profile_path;
    return j;
}

Json to_json(const AsymptoticFit& f) {
    return Json{{"exponent", f.exponent},
                {"prefactor", f.prefactor},
                {"r_squared", f.r_squared},
                {"window", Json::array({f.window.first, f.window.second})},
                {"points", f.points}};
}

Json to_json(const ThresholdReport& r) {
    return Json{{"alpha", r.alpha},
                {"rho_star", optional_json(r.rho_star)},
                {"rho_star_critical", optional_json(r.rho_star_critical)},
                {"rho_doublestar_lower", r.rho_doublestar_lower},
                {"rho_doublestar_empirical", optional_json(r.rho_doublestar_empirical)},
                {"solves", r.solves},
                {"ordering_ok", r.ordering_ok}};
}

Json to_json(const ShapeCheck& s) {
    return Json{{"decreasing", s.decreasing},
                {"concave", s.concave},
                {"worst_second_difference", s.worst_second_difference}};
}

Json to_json(const DecayDiagnostic& d) {
    return Json{{"slope", d.slope}, {"expected", d.expected}, {"window_ok", d.window_ok}, {"points", d.points}};
}

Json to_json(const BranchRow& r) {
    return Json{{"rho", r.rho},
                {"m", r.m},
                {"lambda", r.lambda},
                {"A", r.A},
                {"B", r.B},
                {"C", r.C},
                {"kind", std::string(to_string(r.kind))},
                {"converged", r.converged},
                {"collapsed", r.collapsed},
                {"lambda_nehari", r.lambda_nehari},
                {"lambda_enp", r.lambda_enp},
                {"nehari", r.nehari},
                {"pohozaev", r.pohozaev},
                {"el_sup", r.el_sup},
                {"r_max", r.r_max},
                {"iterations", r.iterations}};
}

void write_curve_csv(std::ostream& out, const BranchCurve& curve) {
    out << "# config_hash=" << curve.provenance << '\n';
    out << "alpha,rho,m,lambda,A,B,C,kind,converged\n";
    for (const auto& r : curve.rows) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", curve.alpha, r.rho, r.m,
                           r.lambda, r.A, r.B, r.C, to_string(r.kind), r.converged ? 1 : 0);
    }
}

Json curve_json(const BranchCurve& curve) {
    Json rows = Json::array();
    for (const auto& r : curve.rows) rows.push_back(to_json(r));
    return Json{{"config_hash", curve.provenance},
                {"alpha", curve.alpha},
                {"kind", std::string(to_string(curve.kind))},
                {"rows", rows}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace gpp
