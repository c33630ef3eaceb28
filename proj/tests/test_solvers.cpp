#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpp/branch.hpp"
#include "gpp/errors.hpp"
#include "gpp/solvers.hpp"
#include "oracles.hpp"

#include <boost/math/tools/minima.hpp>

using namespace gpp;
using oracle::pi;
using oracle::rel;

TEST_CASE("solve kind names round trip") {
    for (auto k : {SolveKind::global_min, SolveKind::local_min, SolveKind::mp_type2, SolveKind::choquard_min,
                   SolveKind::choquard_frequency, SolveKind::choquard_mp, SolveKind::thomas_fermi})
        CHECK(parse_solve_kind(to_string(k)) == k);
    CHECK_FALSE(parse_solve_kind("newton"));
}

TEST_CASE("solver config validation") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.damping = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SolverConfig{};
    c.H_fraction = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SolverConfig{};
    c.max_iters = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("shape helpers") {
    const auto g = build_grid(128, 10.0);
    CHECK(is_nonincreasing(RadialField::sample(g, [](double r) { return std::exp(-r); })));
    CHECK_FALSE(is_nonincreasing(RadialField::sample(g, [](double r) { return std::exp(-(r - 2) * (r - 2)); })));
    CHECK(tail_fraction(RadialField::sample(g, [](double r) { return r < 5.0 ? 1.0 : 0.0; })) == 0.0);
    CHECK(tail_fraction(RadialField::sample(g, [](double r) { return r > 5.0 ? 1.0 : 0.0; })) == 1.0);
}

TEST_CASE("Thomas-Fermi state for alpha = 2") {
    const auto g = build_grid(1024, 4.0);
    const auto r = solve_tf(2.0, build_kernel(2.0, g), SolverConfig{});
    REQUIRE(r.converged);
    REQUIRE(r.tf_multiplier);
    CHECK(rel(*r.tf_multiplier, -1.0 / (16.0 * pi * pi)) < 1e-3);
    CHECK(std::abs(*r.support_radius - pi) < 1e-2);
    double err = 0.0;
    for (int i = 0; i < g.size(); ++i) err = std::max(err, std::abs(r.state[i] - oracle::tf_profile(g.node(i))));
    CHECK(err <= 5e-3);
    CHECK(rel(r.report.B, -2.0 * *r.tf_multiplier) < 1e-3);
    CHECK(rel(r.report.C, -6.0 * *r.tf_multiplier) < 1e-3);
    CHECK(rel(r.lambda, -4.0 * *r.tf_multiplier) < 1e-12);
}

TEST_CASE("normalized minimizer for alpha = 2, rho = 1") {
    KernelCache cache;
    const auto r = solve_auto(SolveKind::global_min, GppParams{2.0, 1.0, std::nullopt}, SolverConfig{}, DomainPolicy{},
                              cache);
    REQUIRE(r.converged);
    CHECK_FALSE(r.collapsed);
    CHECK(r.report.F < 0.0);
    CHECK(r.lambda > 0.0);
    CHECK(std::abs(r.residuals.nehari) < 1e-6);
    CHECK(std::abs(r.residuals.pohozaev) < 1e-6);
    CHECK(rel(r.lambda, r.lambda_enp) < 1e-5);
    CHECK(rel(r.lambda, r.report.lambda_nehari) < 1e-5);
    CHECK(rel(r.rho(), 1.0) < 1e-12);
    CHECK(is_nonincreasing(r.state, 1e-8));
    // Independent ENP multiplier from the measured moments.
    const auto e = solve_enp_system(r.report.A, r.report.B, 1.0, 2.0);
    CHECK(rel(e.lambda, r.lambda) < 1e-5);
}

TEST_CASE("solves are deterministic and warm starts land on the same state") {
    KernelCache cache;
    const GppParams p{2.0, 5.0, std::nullopt};
    const auto a = solve_auto(SolveKind::global_min, p, SolverConfig{}, DomainPolicy{}, cache);
    const auto b = solve_auto(SolveKind::global_min, p, SolverConfig{}, DomainPolicy{}, cache);
    REQUIRE(a.state.size() == b.state.size());
    bool same = a.lambda == b.lambda;
    for (int i = 0; i < a.state.size(); ++i) same = same && a.state[i] == b.state[i];
    CHECK(same);

    const auto prev = solve_auto(SolveKind::global_min, GppParams{2.0, 4.5, std::nullopt}, SolverConfig{},
                                 DomainPolicy{}, cache);
    const auto warm = solve_auto(SolveKind::global_min, p, SolverConfig{}, DomainPolicy{}, cache, prev.state);
    REQUIRE(warm.converged);
    CHECK(rel(warm.report.F, a.report.F) < 1e-8);
    CHECK(rel(warm.lambda, a.lambda) < 1e-6);
}

TEST_CASE("Choquard minimizer relations for alpha = 2") {
    KernelCache cache;
    const auto w = solve_auto(SolveKind::choquard_min, GppParams{2.0, 1.0, std::nullopt}, SolverConfig{},
                              DomainPolicy{}, cache);
    REQUIRE(w.converged);
    const double mu = w.report.E_choquard, a = 2.0;
    CHECK(mu < 0.0);
    CHECK(rel(w.lambda, 2.0 * (1.0 + a) / (1.0 - a) * mu) < 1e-3);
    CHECK(rel(w.report.A, 2.0 * (3.0 - a) / (1.0 - a) * mu) < 1e-3);
    CHECK(rel(w.report.C, 8.0 / (1.0 - a) * mu) < 1e-3);
}

TEST_CASE("critical frequency state for alpha = 1") {
    KernelCache cache;
    const auto w = solve_auto(SolveKind::choquard_frequency, GppParams{1.0, 1.0, std::nullopt}, SolverConfig{},
                              DomainPolicy{}, cache);
    REQUIRE(w.converged);
    REQUIRE(w.quotient);
    const double rs2 = w.report.rho2;
    CHECK(rel(*w.quotient, rs2 / 2.0) < 1e-4);
    CHECK(rel(w.report.C, 2.0 * rs2) < 1e-4);
    CHECK(rel(w.report.A, rs2) < 1e-4);
}

TEST_CASE("alpha mismatch and invalid kinds are rejected") {
    const auto g = build_grid(64, 10.0);
    const auto k = build_kernel(2.0, g);
    CHECK_THROWS_AS(minimize_normalized(GppParams{1.0, 1.0, std::nullopt}, k, SolverConfig{}), Error);
    CHECK_THROWS_AS(solve_choquard_min(0.5, build_kernel(0.5, g), SolverConfig{}), Error);
    CHECK_THROWS_AS(solve_mp_type2(GppParams{2.0, 1.0, std::nullopt}, k, SolverConfig{}), Error);
    CHECK_THROWS_AS(solve_choquard_mp(2.0, k, SolverConfig{}), Error);
}

TEST_CASE("mountain-pass level equals the fiber maximum of a quotient optimizer") {
    // A mass-one profile with quotient S has fiber t -> A t^2 / 2 - C t^{3-alpha} / 4; its maximum is the level.
    for (double a : {0.25, 0.5, 0.75}) {
        for (double S : {2.0, 27.7}) {
            const double A = 1.7, C = std::pow(A, 0.5 * (3.0 - a)) / S;
            auto neg = [&](double t) { return -(0.5 * A * t * t - 0.25 * C * std::pow(t, 3.0 - a)); };
            double best_t = 1.0, best = neg(1.0);
            for (int i = 0; i <= 20000; ++i) {
                const double t = std::pow(10.0, -6.0 + 14.0 * i / 20000.0);
                if (neg(t) < best) best = neg(t), best_t = t;
            }
            const auto m = boost::math::tools::brent_find_minima(neg, best_t * 0.999, best_t * 1.001, 60);
            CHECK(rel(choquard_mp_level(S, a), -m.second) < 1e-10);
        }
    }
}
