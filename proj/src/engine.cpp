#include "engine.hpp"

#include "gpp/log.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gpp::detail {

Problem::Problem(const RieszKernel& kernel, double quartic)
    : kernel_(kernel), form_(kernel.grid()), q_(quartic), n_(kernel.grid().size()) {}

Vec Problem::potential(std::span<const double> u) const {
    Vec dens(static_cast<std::size_t>(n_)), phi(static_cast<std::size_t>(n_));
    for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = u[i] * u[i];
    kernel_.apply(dens, phi);
    return phi;
}

EnergyReport Problem::report(std::span<const double> u, std::span<const double> phi) const {
    const auto w = grid().weights();
    double B = 0.0, C = 0.0, m = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_); ++i) {
        const double s = u[i] * u[i];
        m += w[i] * s;
        B += w[i] * s * s;
        C += w[i] * s * phi[i];
    }
    return EnergyReport::from_moments(form_.energy(u), B, C, m);
}

double Problem::mass(std::span<const double> u) const {
    const auto w = grid().weights();
    double m = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_); ++i) m += w[i] * u[i] * u[i];
    return m;
}

void Problem::project(Vec& u, double rho) const {
    const double s = rho / std::sqrt(mass(u));
    for (double& x : u) x *= s;
}

double Problem::relative_residual(std::span<const double> u, double lambda, std::span<const double> phi) const {
    const auto lu = form_.apply(u);
    double sup = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_); ++i) {
        const double a = lu[i], b = lambda * u[i], c = q_ * u[i] * u[i] * u[i], d = phi[i] * u[i];
        sup = std::max(sup, std::abs(a + b + c - d));
        scale = std::max(scale, std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d));
    }
    return scale > 0.0 ? sup / scale : 0.0;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat banded_matrix(const DirichletForm& form, std::span<const double> diag_shift, double c1) {
    const int n = form.grid().size();
    const auto& bands = form.bands();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * 4);
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, c1 * bands[0][static_cast<std::size_t>(i)] + diag_shift[static_cast<std::size_t>(i)]);
        for (int d = 1; d <= 3 && i + d < n; ++d)
            t.emplace_back(i + d, i, c1 * bands[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)]);
    }
    SpMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

using Ldlt = Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>;

}  // namespace

std::optional<Vec> Problem::implicit_step(std::span<const double> u, std::span<const double> phi, double tau) const {
    Vec shift(static_cast<std::size_t>(n_));
    for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = q_ * u[i] * u[i] - phi[i] + tau;
    Ldlt ldlt(banded_matrix(form_, shift, 1.0));
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) return std::nullopt;
    Eigen::VectorXd rhs(n_);
    for (int i = 0; i < n_; ++i) rhs[i] = tau * grid().node(i) * u[static_cast<std::size_t>(i)];
    const Eigen::VectorXd v = ldlt.solve(rhs);
    Vec out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = std::abs(v[i] / grid().node(i));
    return out;
}

Vec Problem::shifted_laplace_solve(double c1, double c2, std::span<const double> g) const {
    Vec shift(static_cast<std::size_t>(n_), c2);
    Ldlt ldlt(banded_matrix(form_, shift, c1));
    Eigen::VectorXd rhs(n_);
    for (int i = 0; i < n_; ++i) rhs[i] = grid().node(i) * g[static_cast<std::size_t>(i)];
    const Eigen::VectorXd v = ldlt.solve(rhs);
    Vec out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = v[i] / grid().node(i);
    return out;
}

Problem::NewtonOutcome Problem::newton(Vec u, double lambda, std::optional<double> rho, int max_iters,
                                       double target) const {
    const int n = n_;
    const bool constrained = rho.has_value();
    const int dim = constrained ? n + 1 : n;
    const auto r = grid().nodes();
    const auto w = grid().weights();
    const double h = grid().spacing();
    const auto& bands = form_.bands();
    const auto raw = kernel_.raw();
    const double ks = kernel_.scale();

    auto phi = potential(u);
    double res = relative_residual(u, lambda, phi);
    int it = 0;
    Eigen::MatrixXd J(dim, dim);
    Eigen::VectorXd rhs(dim);
    for (; it < max_iters && res > target; ++it) {
        const auto lu = form_.apply(u);
        for (int j = 0; j < n; ++j) {
            const double uj = u[static_cast<std::size_t>(j)];
            for (int i = 0; i < n; ++i)
                J(i, j) = -2.0 * u[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)] * ks *
                          raw[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] * uj;
        }
        const double c = 4.0 * std::numbers::pi * h;
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            J(i, i) += c * r[k] * bands[0][k] * r[k] + w[k] * (lambda + 3.0 * q_ * u[k] * u[k] - phi[k]);
            for (int d = 1; d <= 3 && i + d < n; ++d) {
                const double b = c * r[k] * bands[static_cast<std::size_t>(d)][k] * r[k + static_cast<std::size_t>(d)];
                J(i, i + d) += b;
                J(i + d, i) += b;
            }
            rhs[i] = -w[k] * (lu[k] + lambda * u[k] + q_ * u[k] * u[k] * u[k] - phi[k] * u[k]);
        }
        if (constrained) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(i);
                J(i, n) = w[k] * u[k];
                J(n, i) = 2.0 * w[k] * u[k];
            }
            J(n, n) = 0.0;
            rhs[n] = -(mass(u) - (*rho) * (*rho));
        }
        const Eigen::VectorXd d = J.partialPivLu().solve(rhs);
        // Damped acceptance: the sup residual must drop.
        bool accepted = false;
        for (double step = 1.0; step >= 1.0 / 16.0; step *= 0.5) {
            Vec un(u);
            for (int i = 0; i < n; ++i) un[static_cast<std::size_t>(i)] += step * d[i];
            const double ln = constrained ? lambda + step * d[n] : lambda;
            const auto phin = potential(un);
            const double rn = relative_residual(un, ln, phin);
            if (rn < res) {
                u = std::move(un);
                lambda = ln;
                phi = phin;
                res = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return NewtonOutcome{std::move(u), lambda, res, it};
}

double tail_fraction(const RadialGrid& g, std::span<const double> u) {
    const auto w = g.weights();
    double total = 0.0, tail = 0.0;
    const double half = 0.5 * g.r_max();
    for (int i = 0; i < g.size(); ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const double m = w[k] * u[k] * u[k];
        total += m;
        if (g.node(i) > half) tail += m;
    }
    return total > 0.0 ? tail / total : 0.0;
}

FlowOutcome gradient_flow(const Problem& p, Vec u, double rho, const SolverConfig& cfg, double stop_tol) {
    FlowOutcome out;
    for (double& x : u) x = std::abs(x);
    p.project(u, rho);
    auto phi = p.potential(u);
    auto rep = p.report(u, phi);
    double F = p.energy(rep);
    double lam = p.nehari_lambda(rep);
    double tau = cfg.dt > 0.0 ? 1.0 / cfg.dt : std::max(2.0 * std::abs(lam), 1e-12);
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        lam = p.nehari_lambda(rep);
        out.residual = p.relative_residual(u, lam, phi);
        if (out.residual < stop_tol) break;
        if (it % 25 == 0 && tail_fraction(p.grid(), u) > 0.2) {
            out.collapsed = true;
            break;
        }
        bool accepted = false;
        while (tau < 1e300) {
            auto step = p.implicit_step(u, phi, tau);
            if (step) {
                p.project(*step, rho);
                auto phin = p.potential(*step);
                auto repn = p.report(*step, phin);
                const double Fn = p.energy(repn);
                if (Fn <= F + 1e-14 * std::abs(F)) {
                    u = std::move(*step);
                    phi = std::move(phin);
                    rep = repn;
                    F = Fn;
                    accepted = true;
                    break;
                }
            }
            tau *= 2.0;
        }
        if (!accepted) {
            out.stalled = true;
            break;
        }
        tau = std::max(tau / 1.5, 1.2 * std::abs(p.nehari_lambda(rep)));
    }
    out.lambda = p.nehari_lambda(rep);
    out.residual = p.relative_residual(u, out.lambda, phi);
    out.iterations = it;
    out.collapsed = out.collapsed || tail_fraction(p.grid(), u) > cfg.collapse_tail;
    out.u = std::move(u);
    log::info("flow: {} iterations, residual {:.3e}, lambda {:.6g}, F {:.10g}{}", it, out.residual, out.lambda, F,
              out.collapsed ? " (spreading)" : "");
    return out;
}

}  // namespace gpp::detail
