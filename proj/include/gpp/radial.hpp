#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gpp {

/// Uniform cell-centered grid on (0, r_max] with radial quadrature weights 4*pi*r^2*h.
class RadialGrid {
public:
    static RadialGrid build(int n, double r_max);

    int size() const noexcept { return data_->n; }
    double r_max() const noexcept { return data_->r_max; }
    double spacing() const noexcept { return data_->h; }
    std::span<const double> nodes() const noexcept { return data_->nodes; }
    std::span<const double> weights() const noexcept { return data_->weights; }
    double node(int i) const noexcept { return data_->nodes[static_cast<std::size_t>(i)]; }
    double weight(int i) const noexcept { return data_->weights[static_cast<std::size_t>(i)]; }

    /// Same cell count, radius multiplied by `factor`.
    RadialGrid scaled(double factor) const;

    bool operator==(const RadialGrid& other) const noexcept;

private:
    struct Data {
        int n;
        double r_max;
        double h;
        std::vector<double> nodes;
        std::vector<double> weights;
    };
    explicit RadialGrid(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    std::shared_ptr<const Data> data_;
};

RadialGrid build_grid(int n, double r_max);

/// Sampled radial function u(r_i); immutable once built.
class RadialField {
public:
    RadialField(RadialGrid grid, std::vector<double> values);

    static RadialField zeros(const RadialGrid& grid);
    static RadialField sample(const RadialGrid& grid, const std::function<double(double)>& f);

    const RadialGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    int size() const noexcept { return grid_.size(); }
    double operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }
    double max_abs() const noexcept;

    RadialField scaled(double c) const;

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

struct GppParams {
    double alpha = 2.0;
    double rho = 1.0;
    /// Frequency used by the lambda rescaling; unset elsewhere.
    std::optional<double> lambda;

    void validate() const;
};

enum class RescaleKind { choquard_small_mass, choquard_large_mass, tf, lambda };

double l2_norm(const RadialField& u);
double mass(const RadialField& u);
double l4_norm4(const RadialField& u);
double lp_norm(const RadialField& u, double p);
double dirichlet_energy(const RadialField& u);

RadialField project_mass(const RadialField& u, double rho);

/// t^{3/2} u(t r) resampled onto the same grid (monotone cubic, zero beyond r_max).
RadialField dilate(const RadialField& u, double t);

/// t^{3/2} u(t r) carried exactly by moving the samples to the grid of radius r_max / t.
RadialField dilate_exact(const RadialField& u, double t);

/// Monotone cubic resampling of `u` onto `target`; zero beyond the source radius.
RadialField resample(const RadialField& u, const RadialGrid& target);

/// Exact rescaling (values and grid radius change together; no interpolation).
RadialField rescale_family(const RadialField& u, const GppParams& params, RescaleKind kind);

/// Face derivatives of v = r u, fourth order, odd ghosts at both ends.
/// A = 4 pi h sum_k tw_k (D v)_k^2 and -Laplacian u = (D^T tw D v) / r.
class DirichletForm {
public:
    explicit DirichletForm(const RadialGrid& grid);

    const RadialGrid& grid() const noexcept { return grid_; }
    double energy(std::span<const double> u) const;
    /// -Laplacian u such that sum_i w_i u_i (Lu)_i equals energy(u).
    std::vector<double> apply(std::span<const double> u) const;
    /// Symmetric 7-band matrix D^T tw D acting on v = r u, stored as bands[d][i] = M(i, i+d), d = 0..3.
    const std::vector<std::vector<double>>& bands() const noexcept { return bands_; }
    std::vector<double> apply_bands(std::span<const double> v) const;

private:
    std::vector<double> face_derivative(std::span<const double> v) const;
    RadialGrid grid_;
    std::vector<std::vector<double>> bands_;
};

/// Two-column text dump with a '#' header carrying n, r_max, alpha, rho and any extra lines.
void write_field(const std::string& path, const RadialField& u, double alpha, double rho,
                 const std::vector<std::string>& extra_header = {});
RadialField read_field(const std::string& path);

}  // namespace gpp
