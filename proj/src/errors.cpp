#include "gpp/errors.hpp"

namespace gpp {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::grid_mismatch: return "grid-mismatch";
        case Errc::degenerate_field: return "degenerate-field";
        case Errc::left_admissible_cone: return "left-admissible-cone";
        case Errc::bisection_failure: return "bisection-failure";
        case Errc::bisection_budget_exhausted: return "bisection-budget-exhausted";
        case Errc::insufficient_data: return "insufficient-data";
        case Errc::sign_change_in_window: return "sign-change-in-window";
        case Errc::tail_underresolved: return "tail-underresolved";
        case Errc::config_parse: return "config-parse-error";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gpp
