#pragma once

#include "gpp/radial.hpp"

#include <memory>
#include <span>
#include <vector>

namespace gpp {

/// Riesz normalization and the inequality constants used by the energy bounds.
struct RieszConstants {
    double A_alpha;         ///< I_alpha(x) = A_alpha |x|^{alpha-3}
    double c_alpha_hls;     ///< D(u) <= c_alpha |u|_{12/(3+alpha)}^4
    double c_star;          ///< |u|_6 <= c_star |grad u|_2
    double c_bar_gn;        ///< |u|_4 <= c_bar |u|_2^{1/4} |grad u|_2^{3/4}
    double c_barbar_alpha;  ///< D(u) <= c_barbar rho^{1+alpha} |grad u|_2^{3-alpha}
};

RieszConstants constants(double alpha);

/// Radial kernel of the Riesz potential: Phi(r) = int_0^inf K(r, s) f(s) s^2 ds.
double kernel_value(double alpha, double r, double s);

/// Dense quadrature matrix: Phi_i = sum_j M_ij f_j. Weighted by grid weights, W M is symmetric.
class RieszKernel {
public:
    double alpha() const noexcept { return alpha_; }
    const RadialGrid& grid() const noexcept { return grid_; }
    int size() const noexcept { return grid_.size(); }
    double entry(int i, int j) const noexcept {
        return scale_ * (*matrix_)[static_cast<std::size_t>(i) * static_cast<std::size_t>(size()) + static_cast<std::size_t>(j)];
    }
    /// Row-major unscaled storage; multiply by scale().
    std::span<const double> raw() const noexcept { return *matrix_; }
    double scale() const noexcept { return scale_; }

    /// Same alpha and cell count on a grid of another radius; reuses the matrix (M scales as r_max^alpha).
    RieszKernel rescaled_to(const RadialGrid& grid) const;

    /// Matrix-vector product on raw values; the hot path for solvers.
    void apply(std::span<const double> f, std::span<double> out) const;

private:
    friend RieszKernel build_kernel(double alpha, const RadialGrid& grid);
    friend RieszKernel build_kernel_serial(double alpha, const RadialGrid& grid);
    RieszKernel(double alpha, RadialGrid grid, std::shared_ptr<const std::vector<double>> m, double scale)
        : alpha_(alpha), grid_(std::move(grid)), matrix_(std::move(m)), scale_(scale) {}

    double alpha_;
    RadialGrid grid_;
    std::shared_ptr<const std::vector<double>> matrix_;
    double scale_;
};

/// OpenMP row-parallel build.
RieszKernel build_kernel(double alpha, const RadialGrid& grid);
/// Single-threaded reference build; identical arithmetic per entry.
RieszKernel build_kernel_serial(double alpha, const RadialGrid& grid);

RadialField apply_potential(const RieszKernel& kernel, const RadialField& f);
/// Single-threaded reference product.
RadialField apply_potential_serial(const RieszKernel& kernel, const RadialField& f);

double interaction_energy(const RieszKernel& kernel, const RadialField& u);
/// int (I_alpha * f) g
double bilinear(const RieszKernel& kernel, const RadialField& f, const RadialField& g);

/// Caches one unit-radius kernel per (alpha, n) and rescales it on demand.
class KernelCache {
public:
    RieszKernel get(double alpha, const RadialGrid& grid);

private:
    struct Entry {
        double alpha;
        int n;
        RieszKernel kernel;
    };
    std::vector<Entry> entries_;
};

namespace detail {
/// Riemann zeta and the derivative values used by the singular quadrature corrections.
double zeta(double s);
}  // namespace detail

}  // namespace gpp
