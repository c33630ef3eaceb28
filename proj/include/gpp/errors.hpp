#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpp {

enum class Errc {
    invalid_argument,
    grid_mismatch,
    degenerate_field,
    left_admissible_cone,
    bisection_failure,
    bisection_budget_exhausted,
    insufficient_data,
    sign_change_in_window,
    tail_underresolved,
    config_parse,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace gpp
