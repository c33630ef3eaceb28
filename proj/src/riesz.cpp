#include "gpp/riesz.hpp"

#include "gpp/errors.hpp"

#include <fmt/core.h>

#include <cmath>
#include <numbers>

namespace gpp {

using std::numbers::pi;

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 3.0))
        fail(Errc::invalid_argument, fmt::format("Riesz order must lie in (0,3), got {}", alpha));
}

bool is_log_case(double alpha) { return std::abs(alpha - 1.0) < 1e-12; }

double riesz_normalization(double alpha) {
    return std::tgamma((3.0 - alpha) / 2.0) / (std::pow(pi, 1.5) * std::pow(2.0, alpha) * std::tgamma(alpha / 2.0));
}

void check_grid(const RieszKernel& k, const RadialGrid& g) {
    if (!(k.grid() == g)) fail(Errc::grid_mismatch, "field grid differs from the kernel grid");
}

// Corrected midpoint rule. Off the diagonal M_ij = h K(r_i, r_j) r_j^2. The integrand near
// s = r_i splits into a smooth part and pref_i * s * f(s) * |s - r_i|^beta (log for alpha = 1);
// the singular part gets the zeta-function end corrections of orders h^{1+beta} and h^{3+beta}.
struct RowFactors {
    double a, h, c0, c2;
    bool log_case;
    double beta;
};

RowFactors row_factors(double alpha, const RadialGrid& grid) {
    RowFactors f{};
    f.a = riesz_normalization(alpha);
    f.h = grid.spacing();
    f.log_case = is_log_case(alpha);
    f.beta = alpha - 1.0;
    const double h = f.h;
    if (f.log_case) {
        // zeta'(-2) = -zeta(3) / (4 pi^2)
        const double zeta_prime_m2 = -detail::zeta(3.0) / (4.0 * pi * pi);
        f.c0 = -h * std::log(2.0 * pi / h);
        f.c2 = zeta_prime_m2 * h * h * h;
    } else {
        f.c0 = -2.0 * detail::zeta(-f.beta) * std::pow(h, 1.0 + f.beta);
        f.c2 = -detail::zeta(-f.beta - 2.0) * std::pow(h, 3.0 + f.beta);
    }
    return f;
}

void fill_row(const RowFactors& f, double alpha, const RadialGrid& grid, int i, double* row) {
    const int n = grid.size();
    const auto r = grid.nodes();
    const double ri = r[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double sj = r[static_cast<std::size_t>(j)];
        row[j] = f.h * kernel_value(alpha, ri, sj) * sj * sj;
    }
    double smooth, pref;
    if (f.log_case) {
        smooth = 2.0 * pi * f.a * std::log(2.0 * ri);
        pref = -2.0 * pi * f.a / ri;
    } else {
        smooth = 2.0 * pi * f.a / f.beta * std::pow(2.0 * ri, f.beta);
        pref = -2.0 * pi * f.a / (f.beta * ri);
    }
    const double c2h = f.c2 / (f.h * f.h);
    row[i] = f.h * smooth + f.c0 * pref * ri - 2.0 * c2h * pref * ri;
    if (i + 1 < n) row[i + 1] += c2h * pref * r[static_cast<std::size_t>(i + 1)];
    if (i > 0) row[i - 1] += c2h * pref * r[static_cast<std::size_t>(i - 1)];
    else row[0] += c2h * (-pref * r[0]);  // odd reflection of s f(s) across the origin
}

}  // namespace

namespace detail {
double zeta(double s) { return std::riemann_zeta(s); }
}  // namespace detail

RieszConstants constants(double alpha) {
    check_alpha(alpha);
    RieszConstants c{};
    c.A_alpha = riesz_normalization(alpha);
    c.c_alpha_hls = std::tgamma((3.0 - alpha) / 2.0) /
                    (std::pow(pi, 2.0 * alpha / 3.0) * std::pow(2.0, alpha / 3.0) * std::tgamma((3.0 + alpha) / 2.0));
    c.c_star = std::pow(2.0 / pi, 2.0 / 3.0) / std::sqrt(3.0);
    c.c_bar_gn = std::pow(c.c_star, 0.75);
    c.c_barbar_alpha = c.c_alpha_hls * std::pow(c.c_bar_gn, 4.0 - 4.0 * alpha / 3.0);
    return c;
}

double kernel_value(double alpha, double r, double s) {
    const double a = riesz_normalization(alpha);
    if (is_log_case(alpha)) return a * 2.0 * pi / (r * s) * std::log((r + s) / std::abs(r - s));
    const double b = alpha - 1.0;
    return a * 2.0 * pi / (b * r * s) * (std::pow(r + s, b) - std::pow(std::abs(r - s), b));
}

RieszKernel build_kernel(double alpha, const RadialGrid& grid) {
    check_alpha(alpha);
    const int n = grid.size();
    const RowFactors f = row_factors(alpha, grid);
    auto m = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    double* data = m->data();
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) fill_row(f, alpha, grid, i, data + static_cast<std::size_t>(i) * static_cast<std::size_t>(n));
    return RieszKernel(alpha, grid, std::move(m), 1.0);
}

RieszKernel build_kernel_serial(double alpha, const RadialGrid& grid) {
    check_alpha(alpha);
    const int n = grid.size();
    const RowFactors f = row_factors(alpha, grid);
    auto m = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) fill_row(f, alpha, grid, i, m->data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n));
    return RieszKernel(alpha, grid, std::move(m), 1.0);
}

RieszKernel RieszKernel::rescaled_to(const RadialGrid& grid) const {
    if (grid.size() != size()) fail(Errc::grid_mismatch, "rescaling needs an equal cell count");
    const double c = grid.r_max() / grid_.r_max();
    return RieszKernel(alpha_, grid, matrix_, scale_ * std::pow(c, alpha_));
}

void RieszKernel::apply(std::span<const double> f, std::span<double> out) const {
    const std::size_t n = static_cast<std::size_t>(size());
    const double* m = matrix_->data();
    const double sc = scale_;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = m + i * n;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * f[j];
        out[i] = sc * s;
    }
}

RadialField apply_potential(const RieszKernel& kernel, const RadialField& f) {
    check_grid(kernel, f.grid());
    std::vector<double> out(static_cast<std::size_t>(f.size()));
    kernel.apply(f.values(), out);
    return RadialField(f.grid(), std::move(out));
}

RadialField apply_potential_serial(const RieszKernel& kernel, const RadialField& f) {
    check_grid(kernel, f.grid());
    const std::size_t n = static_cast<std::size_t>(f.size());
    const auto m = kernel.raw();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * f.values()[j];
        out[i] = kernel.scale() * s;
    }
    return RadialField(f.grid(), std::move(out));
}

double bilinear(const RieszKernel& kernel, const RadialField& f, const RadialField& g) {
    check_grid(kernel, f.grid());
    check_grid(kernel, g.grid());
    const auto phi = apply_potential(kernel, f);
    const auto w = f.grid().weights();
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += w[static_cast<std::size_t>(i)] * phi[i] * g[i];
    return s;
}

double interaction_energy(const RieszKernel& kernel, const RadialField& u) {
    check_grid(kernel, u.grid());
    std::vector<double> sq(u.values().begin(), u.values().end());
    for (double& x : sq) x *= x;
    const RadialField dens(u.grid(), std::move(sq));
    return bilinear(kernel, dens, dens);
}

RieszKernel KernelCache::get(double alpha, const RadialGrid& grid) {
    for (const auto& e : entries_)
        if (e.alpha == alpha && e.n == grid.size()) return e.kernel.rescaled_to(grid);
    auto unit = build_kernel(alpha, RadialGrid::build(grid.size(), 1.0));
    entries_.push_back(Entry{alpha, grid.size(), unit});
    return unit.rescaled_to(grid);
}

}  // namespace gpp
