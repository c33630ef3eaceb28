#pragma once

#include "gpp/branch.hpp"
#include "gpp/energy.hpp"
#include "gpp/solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace gpp {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

Json to_json(const EnergyReport& report);
Json to_json(const IdentityResiduals& residuals);
/// Scalars of a solve; `profile_path` names the companion field dump (may be empty).
Json to_json(const SolveResult& result, const std::string& profile_path);
Json to_json(const AsymptoticFit& fit);
Json to_json(const ThresholdReport& report);
Json to_json(const ShapeCheck& shape);
Json to_json(const DecayDiagnostic& decay);
Json to_json(const BranchRow& row);

/// Fixed columns: alpha,rho,m,lambda,A,B,C,kind,converged; preceded by a '# config_hash=' line.
void write_curve_csv(std::ostream& out, const BranchCurve& curve);
Json curve_json(const BranchCurve& curve);

/// Stable text form: two-space indentation, trailing newline.
std::string dump(const Json& j);

}  // namespace gpp
