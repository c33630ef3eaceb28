#include "gpp/radial.hpp"

#include "gpp/errors.hpp"
#include "gpp/log.hpp"

#include <math.h>  // pchip.hpp in Boost 1.74 calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>
#include <fmt/core.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gpp {

using std::numbers::pi;

RadialGrid RadialGrid::build(int n, double r_max) {
    if (n < 8) fail(Errc::invalid_argument, fmt::format("grid needs n >= 8, got {}", n));
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        fail(Errc::invalid_argument, fmt::format("grid radius must be positive, got {}", r_max));
    auto d = std::make_shared<Data>();
    d->n = n;
    d->r_max = r_max;
    d->h = r_max / n;
    d->nodes.resize(static_cast<std::size_t>(n));
    d->weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = (i + 0.5) * d->h;
        d->nodes[static_cast<std::size_t>(i)] = r;
        d->weights[static_cast<std::size_t>(i)] = 4.0 * pi * r * r * d->h;
    }
    return RadialGrid(std::move(d));
}

RadialGrid build_grid(int n, double r_max) { return RadialGrid::build(n, r_max); }

RadialGrid RadialGrid::scaled(double factor) const { return build(size(), r_max() * factor); }

bool RadialGrid::operator==(const RadialGrid& other) const noexcept {
    if (data_ == other.data_) return true;
    return size() == other.size() && std::abs(r_max() - other.r_max()) <= 1e-14 * r_max();
}

RadialField::RadialField(RadialGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.size())
        fail(Errc::invalid_argument,
             fmt::format("field length {} does not match grid size {}", values_.size(), grid_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) fail(Errc::invalid_argument, "field contains non-finite values");
}

RadialField RadialField::zeros(const RadialGrid& grid) {
    return RadialField(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0));
}

RadialField RadialField::sample(const RadialGrid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) v[static_cast<std::size_t>(i)] = f(grid.node(i));
    return RadialField(grid, std::move(v));
}

double RadialField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

RadialField RadialField::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return RadialField(grid_, std::move(v));
}

void GppParams::validate() const {
    if (!(alpha > 0.0 && alpha < 3.0))
        fail(Errc::invalid_argument, fmt::format("alpha must lie in (0,3), got {}", alpha));
    if (!(rho > 0.0)) fail(Errc::invalid_argument, fmt::format("rho must be positive, got {}", rho));
    if (lambda && !(*lambda > 0.0))
        fail(Errc::invalid_argument, fmt::format("lambda must be positive, got {}", *lambda));
}

double mass(const RadialField& u) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[static_cast<std::size_t>(i)] * u[i] * u[i];
    return s;
}

double l2_norm(const RadialField& u) { return std::sqrt(mass(u)); }

double l4_norm4(const RadialField& u) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double q = u[i] * u[i];
        s += w[static_cast<std::size_t>(i)] * q * q;
    }
    return s;
}

double lp_norm(const RadialField& u, double p) {
    const auto w = u.grid().weights();
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += w[static_cast<std::size_t>(i)] * std::pow(std::abs(u[i]), p);
    return std::pow(s, 1.0 / p);
}

double dirichlet_energy(const RadialField& u) { return DirichletForm(u.grid()).energy(u.values()); }

RadialField project_mass(const RadialField& u, double rho) {
    const double norm = l2_norm(u);
    if (!(norm > 0.0)) fail(Errc::degenerate_field, "cannot project a field with zero mass");
    return u.scaled(rho / norm);
}

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

// Knots: even ghost at -r_0, the nodes, and the Dirichlet value at r_max.
Pchip make_interpolant(const RadialField& u) {
    const auto& g = u.grid();
    const int n = g.size();
    std::vector<double> x, y;
    x.reserve(static_cast<std::size_t>(n) + 2);
    y.reserve(static_cast<std::size_t>(n) + 2);
    x.push_back(-g.node(0));
    y.push_back(u[0]);
    for (int i = 0; i < n; ++i) {
        x.push_back(g.node(i));
        y.push_back(u[i]);
    }
    x.push_back(g.r_max());
    y.push_back(0.0);
    return Pchip(std::move(x), std::move(y), 0.0);
}

double eval_or_zero(const Pchip& p, double r, double r_max) { return r >= r_max ? 0.0 : p(r); }

}  // namespace

RadialField resample(const RadialField& u, const RadialGrid& target) {
    const Pchip p = make_interpolant(u);
    const double r_max = u.grid().r_max();
    std::vector<double> v(static_cast<std::size_t>(target.size()));
    for (int i = 0; i < target.size(); ++i) v[static_cast<std::size_t>(i)] = eval_or_zero(p, target.node(i), r_max);
    return RadialField(target, std::move(v));
}

RadialField dilate(const RadialField& u, double t) {
    if (!(t > 0.0)) fail(Errc::invalid_argument, fmt::format("dilation factor must be positive, got {}", t));
    if (t == 1.0) return u;
    const auto& g = u.grid();
    const Pchip p = make_interpolant(u);
    const double amp = std::pow(t, 1.5);
    std::vector<double> v(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i)
        v[static_cast<std::size_t>(i)] = amp * eval_or_zero(p, t * g.node(i), g.r_max());
    RadialField out(g, std::move(v));
    // A contraction (t < 1) pushes the profile outward; warn when the tail no longer fits.
    const double peak = out.max_abs();
    const int tail_start = static_cast<int>(0.95 * g.size());
    double tail = 0.0;
    for (int i = tail_start; i < g.size(); ++i) tail = std::max(tail, std::abs(out[i]));
    if (peak > 0.0 && tail > 1e-6 * peak)
        log::warn("dilate(t={}): profile reaches r_max (tail/peak = {:.3g}); result is truncated", t, tail / peak);
    return out;
}

RadialField dilate_exact(const RadialField& u, double t) {
    if (!(t > 0.0)) fail(Errc::invalid_argument, fmt::format("dilation factor must be positive, got {}", t));
    const double amp = std::pow(t, 1.5);
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= amp;
    return RadialField(u.grid().scaled(1.0 / t), std::move(v));
}

RadialField rescale_family(const RadialField& u, const GppParams& params, RescaleKind kind) {
    params.validate();
    const double a = params.alpha;
    const double rho = params.rho;
    auto remap = [&](double amplitude, double length) {
        // v(x) = amplitude * u(x / length): samples keep their values, radii stretch by `length`.
        std::vector<double> v(u.values().begin(), u.values().end());
        for (double& x : v) x *= amplitude;
        return RadialField(u.grid().scaled(length), std::move(v));
    };
    switch (kind) {
        case RescaleKind::choquard_small_mass: {
            if (a == 1.0) fail(Errc::invalid_argument, "Choquard rescaling is undefined at alpha = 1");
            // w(x) = rho^{-(a+2)/(a-1)} u(rho^{-2/(a-1)} x)
            return remap(std::pow(rho, -(a + 2.0) / (a - 1.0)), std::pow(rho, 2.0 / (a - 1.0)));
        }
        case RescaleKind::choquard_large_mass: {
            if (a == 1.0) fail(Errc::invalid_argument, "Choquard rescaling is undefined at alpha = 1");
            // w(x) = rho^{(a+2)/(1-a)} u(rho^{2/(1-a)} x), the inverse of the large-mass ansatz
            return remap(std::pow(rho, (a + 2.0) / (1.0 - a)), std::pow(rho, -2.0 / (1.0 - a)));
        }
        case RescaleKind::tf:
            return remap(1.0 / rho, 1.0);
        case RescaleKind::lambda: {
            if (!params.lambda) fail(Errc::invalid_argument, "lambda rescaling needs a multiplier");
            const double lam = *params.lambda;
            // v(x) = lambda^{-3/4} u(lambda^{-1/2} x)
            return remap(std::pow(lam, -0.75), std::sqrt(lam));
        }
    }
    fail(Errc::invalid_argument, "unknown rescale kind");
}

DirichletForm::DirichletForm(const RadialGrid& grid) : grid_(grid) {
    const int n = grid.size();
    const double h = grid.spacing();
    bands_.assign(4, std::vector<double>(static_cast<std::size_t>(n), 0.0));
    auto fold = [n](int j, int& idx) {
        if (j < 0) { idx = -1 - j; return -1.0; }
        if (j >= n) { idx = 2 * n - 1 - j; return -1.0; }
        idx = j;
        return 1.0;
    };
    const int offs[4] = {0, -1, 1, -2};
    const double coef[4] = {27.0, -27.0, -1.0, 1.0};
    for (int k = 0; k <= n; ++k) {
        const double tw = (k == 0 || k == n) ? 0.5 : 1.0;
        int cols[4];
        double vals[4];
        for (int m = 0; m < 4; ++m) vals[m] = fold(k + offs[m], cols[m]) * coef[m] / (24.0 * h);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const int i = cols[a], j = cols[b];
                if (j < i) continue;
                bands_[static_cast<std::size_t>(j - i)][static_cast<std::size_t>(i)] += tw * vals[a] * vals[b];
            }
    }
}

std::vector<double> DirichletForm::face_derivative(std::span<const double> v) const {
    const int n = grid_.size();
    const double inv = 1.0 / (24.0 * grid_.spacing());
    auto at = [&](int j) {
        if (j < 0) return -v[static_cast<std::size_t>(-1 - j)];
        if (j >= n) return -v[static_cast<std::size_t>(2 * n - 1 - j)];
        return v[static_cast<std::size_t>(j)];
    };
    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        d[static_cast<std::size_t>(k)] = (27.0 * (at(k) - at(k - 1)) - (at(k + 1) - at(k - 2))) * inv;
    return d;
}

double DirichletForm::energy(std::span<const double> u) const {
    const int n = grid_.size();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = grid_.node(i) * u[static_cast<std::size_t>(i)];
    const auto d = face_derivative(v);
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double tw = (k == 0 || k == n) ? 0.5 : 1.0;
        s += tw * d[static_cast<std::size_t>(k)] * d[static_cast<std::size_t>(k)];
    }
    return 4.0 * pi * grid_.spacing() * s;
}

std::vector<double> DirichletForm::apply_bands(std::span<const double> v) const {
    const int n = grid_.size();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = bands_[0][static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        for (int d = 1; d <= 3; ++d) {
            if (i + d < n) s += bands_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i + d)];
            if (i - d >= 0) s += bands_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i - d)] * v[static_cast<std::size_t>(i - d)];
        }
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

std::vector<double> DirichletForm::apply(std::span<const double> u) const {
    const int n = grid_.size();
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = grid_.node(i) * u[static_cast<std::size_t>(i)];
    auto out = apply_bands(v);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] /= grid_.node(i);
    return out;
}

void write_field(const std::string& path, const RadialField& u, double alpha, double rho,
                 const std::vector<std::string>& extra_header) {
    auto out = fmt::output_file(path);
    out.print("# n {}\n# r_max {:.17g}\n# alpha {:.17g}\n# rho {:.17g}\n", u.size(), u.grid().r_max(), alpha, rho);
    for (const auto& line : extra_header) out.print("# {}\n", line);
    for (int i = 0; i < u.size(); ++i) out.print("{:.17g} {:.17g}\n", u.grid().node(i), u[i]);
}

RadialField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::invalid_argument, "cannot open field file " + path);
    int n = 0;
    double r_max = 0.0;
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (line[0] == '#') {
            std::string hash, key;
            ss >> hash >> key;
            if (key == "n") ss >> n;
            else if (key == "r_max") ss >> r_max;
            continue;
        }
        double r = 0.0, v = 0.0;
        if (!(ss >> r >> v)) fail(Errc::invalid_argument, "malformed field line in " + path);
        values.push_back(v);
    }
    if (n != static_cast<int>(values.size()))
        fail(Errc::invalid_argument, fmt::format("field file {} declares n={} but has {} rows", path, n, values.size()));
    return RadialField(RadialGrid::build(n, r_max), std::move(values));
}

}  // namespace gpp
