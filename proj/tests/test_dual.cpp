#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fer/dual.hpp"
#include "fer/rng.hpp"

using namespace fer;

namespace {

ModelSpec model(ThetaSpec theta, double alpha, Vec2 kappa, double gamma = 1.0,
                ConstraintSet pi = ConstraintSet::first_coordinate_line) {
    ModelSpec m;
    m.gamma = gamma;
    m.kappa = kappa;
    m.eta = EtaSpec::ou(alpha);
    m.c_eta = alpha;
    m.theta = theta;
    m.constraint = pi;
    return m;
}

ModelSpec figure_model() { return model(ThetaSpec::capped_linear(10.0), 0.1, {0.0, 1.0}); }

struct Sample {
    double v;
    Vec2 z, zb;
};

Sample draw_sample(std::uint64_t seed, std::uint64_t k) {
    return {50.0 * (rng::draw_uniform(seed, k, 0, 0) - 0.5),
            {6.0 * (rng::draw_uniform(seed, k, 1, 0) - 0.5),
             6.0 * (rng::draw_uniform(seed, k, 1, 1) - 0.5)},
            {6.0 * (rng::draw_uniform(seed, k, 2, 0) - 0.5),
             6.0 * (rng::draw_uniform(seed, k, 2, 1) - 0.5)}};
}

}  // namespace

TEST_CASE("convex dual closed-form points") {
    const ModelSpec m = figure_model();
    const double th4 = theta_at(m, 4.0);  // 6
    CHECK(g_star(m, 4.0, {0.3, 0.9}, {-th4, 0.9}) == 0.0);
    CHECK(std::isinf(g_star(m, 4.0, {0.3, 0.9}, {-th4 + 0.5, 0.9})));
    // gamma = 1, z2 = 0, q = (-theta, 2) -> 2
    CHECK(g_star(m, 4.0, {0.3, 0.0}, {-th4, 2.0}) == doctest::Approx(2.0).epsilon(1e-14));

    const ModelSpec full =
        model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 1.0, ConstraintSet::full_space);
    CHECK(g_star(full, 0.0, {0.4, -0.2}, {-1.0, 0.0}) == 0.0);
    CHECK(std::isinf(g_star(full, 0.0, {0.4, -0.2}, {-1.0, 0.3})));
}

TEST_CASE("closed form dominates the brute-force conjugate up to lattice error") {
    const ModelSpec m = figure_model();
    for (std::uint64_t k = 0; k < 40; ++k) {
        const Sample s = draw_sample(13, k);
        const double th = theta_at(m, s.v);
        const Vec2 q{-th, s.z.x2 + 2.0 * (rng::draw_uniform(13, k, 3, 0) - 0.5)};
        const double closed = g_star(m, s.v, s.z, q);
        const double numeric = g_star_numeric(m, s.v, s.z, q, 8.0, 321);
        CHECK(numeric <= closed + 1e-9);
        CHECK(closed - numeric < 2e-3);  // lattice resolution
    }
}

TEST_CASE("duality recovery gap is nonnegative and lattice-bounded") {
    const ModelSpec m = figure_model();
    const double q_box = 6.0;
    const int nq = 241;
    const double spacing = 2.0 * q_box / (nq - 1);
    for (std::uint64_t k = 0; k < 200; ++k) {
        const Sample s = draw_sample(17, k);
        const double gap = fenchel_moreau_check(m, s.v, s.z, s.zb, q_box, nq);
        CHECK(gap >= -1e-11);
        CHECK(gap <= spacing * spacing / (2.0 * m.gamma) + 1e-9);
    }
    // zbar = 0 recovers zero exactly through the G* >= 0 point
    CHECK(std::abs(fenchel_moreau_check(m, 3.0, {0.4, -0.2}, {0.0, 0.0}, q_box, nq)) <
          spacing * spacing / (2.0 * m.gamma));

    const ModelSpec full =
        model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 1.0, ConstraintSet::full_space);
    for (std::uint64_t k = 0; k < 50; ++k) {
        const Sample s = draw_sample(19, k);
        CHECK(std::abs(fenchel_moreau_check(full, s.v, s.z, s.zb, q_box, nq)) < 1e-11);
    }
}

TEST_CASE("optimal density closes the duality gap pointwise") {
    for (const ModelSpec& m :
         {figure_model(), model(ThetaSpec::capped_linear(10.0), 0.1, {0.5, 0.5}, 2.3),
          model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 1.0, ConstraintSet::full_space)}) {
        for (std::uint64_t k = 0; k < 2000; ++k) {
            Sample s = draw_sample(29, k);
            if (m.constraint == ConstraintSet::full_space) s.zb = {s.zb.x1, 0.0};
            const Vec2 q = optimal_density(m, s.v, s.z, s.zb);
            CHECK(q.x1 == -theta_at(m, s.v));  // the dual measure prices the stock flat
            const double gap = driver_g(m, s.v, s.z, s.zb) -
                               (s.zb.x1 * q.x1 + s.zb.x2 * q.x2) + g_star(m, s.v, s.z, q);
            CHECK(std::abs(gap) <= 1e-12);
        }
    }
    // quadratic conjugate pair from the docs: gamma = 1, z = 0, zbar = (0,1), theta = 0
    const ModelSpec m0 = model(ThetaSpec::constant(0.0), 0.5, {0.0, 1.0}, 1.0);
    const Vec2 q = optimal_density(m0, 0.0, {0.0, 0.0}, {0.0, 1.0});
    CHECK(q.x1 == 0.0);
    CHECK(q.x2 == 1.0);
    CHECK(driver_g(m0, 0.0, {0.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.5));
    CHECK(g_star(m0, 0.0, {0.0, 0.0}, q) == doctest::Approx(0.5));
}

TEST_CASE("driver and conjugate bounds hold at random samples") {
    for (const ModelSpec& m :
         {figure_model(), model(ThetaSpec::constant(0.7), 0.4, {0.6, 0.8}, 1.7),
          model(ThetaSpec::capped_linear(3.0), 0.4, {0.5, 0.5}, 0.8, ConstraintSet::full_space)}) {
        for (std::uint64_t k = 0; k < 20000; ++k) {
            const Sample s = draw_sample(31, k);
            const double th = theta_at(m, s.v);
            const double box =
                m.gamma * s.zb.norm2() + (2.0 / m.gamma) * (s.z.norm2() + th * th);
            const double g = driver_g(m, s.v, s.z, s.zb);
            CHECK(g <= box + 1e-11);
            CHECK(g >= -box - 1e-11);

            // conjugate lower bound on the finite-penalty region
            const Vec2 q{-th, m.constraint == ConstraintSet::full_space
                                  ? 0.0
                                  : s.z.x2 + 4.0 * (rng::draw_uniform(31, k, 4, 0) - 0.5)};
            const double gs = g_star(m, s.v, s.z, q);
            CHECK(gs >= std::max(0.0, q.norm2() / (4.0 * m.gamma) -
                                          (2.0 / m.gamma) * (s.z.norm2() + th * th)) -
                            1e-11);
        }
    }
}

TEST_CASE("Monte Carlo dual verification") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 1201);
    const ErgodicSolution sol = solve_ergodic(m, grid);

    SUBCASE("zero position scores zero exactly") {
        const RiskSurface u =
            solve_risk_bsde(m, sol, PayoffSpec::constant(0.0), 1.0, 40);
        McConfig cfg;
        cfg.n_paths = 200;
        cfg.n_steps = 50;
        const DualReport rep = dual_gap_mc(m, sol, u, PayoffSpec::constant(0.0), 10.0, cfg);
        CHECK(rep.optimum.objective == 0.0);
        CHECK(rep.optimum.std_error == 0.0);
    }

    SUBCASE("objective at the optimal density matches the solver value") {
        const RiskSurface u = solve_risk_bsde(m, sol, PayoffSpec::put_like(10.0), 2.0, 80);
        McConfig cfg;
        cfg.n_paths = 20000;
        cfg.n_steps = 200;
        cfg.seed = 123;
        const DualReport rep = dual_gap_mc(m, sol, u, PayoffSpec::put_like(10.0), 10.0, cfg);
        CHECK(std::abs(rep.optimum.objective + rep.rho_pde) <=
              3.0 * rep.optimum.std_error + 2e-3);
        for (std::size_t k = 0; k < rep.perturbed.size(); ++k)
            CHECK(rep.gap(k) >= -3.0 * std::hypot(rep.perturbed[k].std_error,
                                                  rep.optimum.std_error));
    }

    SUBCASE("perturbations that leave the finite-penalty region are rejected") {
        const RiskSurface u =
            solve_risk_bsde(m, sol, PayoffSpec::constant(0.0), 1.0, 40);
        McConfig cfg;
        cfg.n_paths = 16;
        cfg.n_steps = 8;
        std::vector<Perturbation> bad{{"first", 0.1, 0, [](double) { return 1.0; }}};
        CHECK_THROWS_AS(dual_gap_mc(m, sol, u, PayoffSpec::constant(0.0), 10.0, cfg, bad),
                        std::invalid_argument);

        ModelSpec full = m;
        full.constraint = ConstraintSet::full_space;
        CHECK_THROWS_AS(dual_gap_mc(full, sol, u, PayoffSpec::constant(0.0), 10.0, cfg),
                        std::invalid_argument);
    }
}
