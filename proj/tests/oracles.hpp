#pragma once

// Independent reference computations for the unit and acceptance tests.
// Only closed forms and generic quadrature live here; nothing calls the library's kernels.

#include "gpp/radial.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

template <typename F>
double integrate(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

/// int_a^b f(s, d) ds where d is the exact distance to the singular endpoint (a, or b when mirror).
/// The substitution d = w^k with k = 1 / (1 + beta) smooths a singularity d^{beta}.
template <typename F>
double integrate_singular(F f, double a, double b, double k, bool mirror) {
    if (!(b > a)) return 0.0;
    const double W = std::pow(b - a, 1.0 / k);
    auto g = [&](double w) {
        const double d = std::pow(w, k);
        return f(mirror ? b - d : a + d, d) * k * std::pow(w, k - 1.0);
    };
    return integrate(g, 0.0, W);
}

/// A_alpha of I_alpha(x) = A_alpha |x|^{alpha - 3}.
inline double riesz_normalization(double alpha) {
    return std::tgamma((3.0 - alpha) / 2.0) / (std::pow(pi, 1.5) * std::pow(2.0, alpha) * std::tgamma(alpha / 2.0));
}

/// Angular average of the Riesz kernel by quadrature over the polar cosine.
inline double angular_kernel(double alpha, double r, double s) {
    const double A = riesz_normalization(alpha);
    auto f = [&](double mu) { return std::pow(r * r + s * s - 2.0 * r * s * mu, 0.5 * (alpha - 3.0)); };
    return A * 2.0 * pi * integrate(f, -1.0, 1.0);
}

/// Double quadrature of D(u) = 4 pi int int u(r)^2 u(s)^2 K(r,s) r^2 s^2 for a radial profile u.
template <typename U>
double interaction_double_quadrature(double alpha, U u, double R) {
    const double A = riesz_normalization(alpha);
    // d = |r - s| is passed exactly so the singular factor never sees a rounded zero.
    auto K = [&](double r, double s, double d) {
        if (alpha == 1.0) return A * 2.0 * pi / (r * s) * std::log((r + s) / d);
        return A * 2.0 * pi / ((alpha - 1.0) * r * s) * (std::pow(r + s, alpha - 1.0) - std::pow(d, alpha - 1.0));
    };
    auto inner = [&](double r) {
        auto g = [&](double s, double d) { return s > 0.0 ? u(s) * u(s) * K(r, s, d) * s * s : 0.0; };
        const double k = alpha < 1.0 ? 1.0 / alpha : (alpha == 1.0 ? 2.0 : 1.0);
        return integrate_singular(g, 0.0, r, k, true) + integrate_singular(g, r, R, k, false);
    };
    return 4.0 * pi * integrate([&](double r) { return u(r) * u(r) * r * r * inner(r); }, 0.0, R);
}

/// Smooth radial test profile: a sum of Gaussian shells.
struct Bumps {
    std::vector<std::array<double, 3>> terms;  // amplitude, centre, width

    double operator()(double r) const {
        double s = 0.0;
        for (const auto& [a, c, w] : terms) s += a * std::exp(-0.5 * (r - c) * (r - c) / (w * w));
        return s;
    }

    static Bumps random(std::mt19937_64& rng, bool positive) {
        std::uniform_real_distribution<double> amp(positive ? 0.2 : -1.0, 1.0), centre(0.0, 3.0), width(0.5, 1.5);
        Bumps b;
        const int k = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < k; ++i) b.terms.push_back({amp(rng), centre(rng), width(rng)});
        return b;
    }

    gpp::RadialField on(const gpp::RadialGrid& g) const {
        return gpp::RadialField::sample(g, [this](double r) { return (*this)(r); });
    }
};

/// Mass-one Thomas-Fermi profile for alpha = 2, support radius pi.
inline double tf_profile(double r) { return r < pi ? std::sqrt(std::sin(r) / r) / (2.0 * pi) : 0.0; }

}  // namespace oracle
