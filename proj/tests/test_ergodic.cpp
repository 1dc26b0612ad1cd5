#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fer/ergodic.hpp"
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

}  // namespace

TEST_CASE("driver F closed-form points") {
    // line constraint, theta = 1: F = -theta z1 - theta^2/2 + z2^2/2
    const ModelSpec m2 = model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 2.0);
    CHECK(driver_f(m2, 0.0, {1.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-14));
    const ModelSpec m1 = model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 1.0);
    CHECK(driver_f(m1, 3.0, {1.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-14));

    const ModelSpec full =
        model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 1.0, ConstraintSet::full_space);
    CHECK(driver_f(full, 0.0, {0.0, 0.0}) == doctest::Approx(-0.5).epsilon(1e-14));

    ModelSpec zero = model(ThetaSpec::constant(0.0), 0.5, {0.6, 0.8});
    CHECK(driver_f(zero, 0.0, {0.0, 0.0}) == 0.0);
}

TEST_CASE("driver gradient agrees with finite differences") {
    const double eps = 1e-6;
    for (ConstraintSet pi : {ConstraintSet::first_coordinate_line, ConstraintSet::full_space}) {
        const ModelSpec m = model(ThetaSpec::capped_linear(4.0), 0.5, {0.6, 0.8}, 1.7, pi);
        for (std::uint64_t k = 0; k < 100; ++k) {
            const double v = 12.0 * (rng::draw_uniform(21, k, 0, 0) - 0.5);
            const Vec2 z{5.0 * (rng::draw_uniform(21, k, 1, 0) - 0.5),
                         5.0 * (rng::draw_uniform(21, k, 1, 1) - 0.5)};
            const Vec2 g = driver_f_grad(m, v, z);
            const double fd1 =
                (driver_f(m, v, {z.x1 + eps, z.x2}) - driver_f(m, v, {z.x1 - eps, z.x2})) /
                (2.0 * eps);
            const double fd2 =
                (driver_f(m, v, {z.x1, z.x2 + eps}) - driver_f(m, v, {z.x1, z.x2 - eps})) /
                (2.0 * eps);
            CHECK(g.x1 == doctest::Approx(fd1).epsilon(1e-5));
            CHECK(g.x2 == doctest::Approx(fd2).epsilon(1e-5));
        }
    }
}

TEST_CASE("constant market price of risk is solved by constants") {
    // constants satisfy the equation exactly with lambda = -theta0^2/2
    const ModelSpec m = model(ThetaSpec::constant(0.5), 0.1, {0.0, 1.0});
    const Grid1D grid(-30.0, 30.0, 1201);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    CHECK(std::abs(sol.lambda + 0.125) < 1e-8);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        CHECK(std::abs(sol.y[i]) < 1e-8);
        CHECK(std::abs(sol.z1[i]) < 1e-8);
        CHECK(std::abs(sol.z2[i]) < 1e-8);
    }
    CHECK(sol.residual < 1e-8);
}

TEST_CASE("lambda is stable under grid and discount refinement") {
    const ModelSpec m = figure_model();
    ErgodicOptions coarse;  // default schedule down to 1e-5
    const ErgodicSolution a = solve_ergodic(m, Grid1D(-30.0, 30.0, 1201), coarse);
    ErgodicOptions fine = coarse;
    fine.rho_schedule.push_back(1e-6);
    const ErgodicSolution b = solve_ergodic(m, Grid1D(-30.0, 30.0, 2401), fine);
    CHECK(std::abs(a.lambda - b.lambda) < 1e-3);
}

TEST_CASE("lambda does not depend on the normalization node") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 1201);
    const ErgodicSolution base = solve_ergodic(m, grid);
    ErgodicOptions opt;
    opt.ref_node = grid.zero_node() + 140;  // v = 7
    const ErgodicSolution moved = solve_ergodic(m, grid, opt);
    CHECK(std::abs(base.lambda - moved.lambda) < 1e-3);
    CHECK(std::abs(moved.y[opt.ref_node]) < 1e-12);
    // y changes by a constant only
    const double c = base.y[opt.ref_node];
    for (int i = 0; i < grid.n_nodes(); i += 60)
        CHECK(moved.y[i] == doctest::Approx(base.y[i] - c).epsilon(1e-9));
}

TEST_CASE("gradient bound applies only when c_eta exceeds c_v") {
    const Grid1D grid(-30.0, 30.0, 1201);

    SUBCASE("mild preset satisfies the bound at every node") {
        ModelSpec m = model(ThetaSpec::capped_linear(0.5), 2.0, {0.6, 0.8});
        m = with_lipschitz_constants(m, grid);
        REQUIRE(m.c_eta > *m.c_v);
        const auto bound = ergodic_z_bound(m);
        REQUIRE(bound.has_value());
        const ErgodicSolution sol = solve_ergodic(m, grid);
        for (int i = 0; i < grid.n_nodes(); ++i)
            CHECK(Vec2{sol.z1[i], sol.z2[i]}.norm() <= *bound + 1e-9);
    }
    SUBCASE("figure parameters report not-applicable") {
        const ModelSpec m = with_lipschitz_constants(figure_model(), grid);
        CHECK(m.c_eta <= *m.c_v);
        CHECK(!ergodic_z_bound(m).has_value());
    }
}

TEST_CASE("forward criterion and optimal strategy closed-form points") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 1201);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    // y(0) = 0, x = 0, t = 0 gives U = -1
    CHECK(forward_performance(sol, m, 0.0, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));

    // projection examples: handmade solutions, independent of the solver
    ModelSpec proj = model(ThetaSpec::constant(1.0), 0.5, {0.6, 0.8}, 2.0);
    ErgodicSolution fake = sol;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        fake.z1[i] = 0.2;
        fake.z2[i] = -0.1;
    }
    const Vec2 pi_line = optimal_strategy(fake, proj, 0.0);
    CHECK(pi_line.x1 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(pi_line.x2 == 0.0);

    proj.constraint = ConstraintSet::full_space;
    proj.gamma = 1.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        fake.z1[i] = 0.0;
        fake.z2[i] = 0.0;
    }
    const Vec2 pi_full = optimal_strategy(fake, proj, 0.0);
    CHECK(pi_full.x1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pi_full.x2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("martingale optimality along simulated wealth") {
    // mild preset keeps the exponential moments tame at Monte Carlo scale
    const ModelSpec m = model(ThetaSpec::capped_linear(2.0), 0.5, {0.6, 0.8});
    const Grid1D grid(-12.0, 12.0, 481);
    const ErgodicSolution sol = solve_ergodic(m, grid);

    const int n_paths = 20000, n_steps = 128;
    const double T = 1.0, dt = T / n_steps, sdt = std::sqrt(dt), v0 = 1.0;
    const int checkpoints[] = {n_steps / 2, n_steps};

    auto run = [&](double offset) {
        // simulate (V, X) jointly and average U(X_t, t) at the checkpoints
        std::vector<double> means, ses;
        for (int cp : checkpoints) {
            double sum = 0.0, sumsq = 0.0;
            for (std::int64_t p = 0; p < n_paths; ++p) {
                double v = v0, x = 0.0;
                for (int k = 0; k < cp; ++k) {
                    const rng::NormalPair nz = rng::draw_normal_pair(2024, p, k);
                    const Vec2 pi_opt = optimal_strategy(sol, m, v);
                    const Vec2 pi{pi_opt.x1 + offset, pi_opt.x2};
                    const double th = theta_at(m, v);
                    x += pi.x1 * (th * dt + sdt * nz.z1) + pi.x2 * sdt * nz.z2;
                    v += eta_at(m, v) * dt + sdt * (m.kappa.x1 * nz.z1 + m.kappa.x2 * nz.z2);
                }
                const double u = forward_performance(sol, m, x, cp * dt, v);
                sum += u;
                sumsq += u * u;
            }
            const double mean = sum / n_paths;
            const double var = (sumsq - n_paths * mean * mean) / (n_paths - 1);
            means.push_back(mean);
            ses.push_back(std::sqrt(var / n_paths));
        }
        return std::pair(means, ses);
    };

    const double u0 = forward_performance(sol, m, 0.0, 0.0, v0);
    const auto [mopt, sopt] = run(0.0);
    for (std::size_t i = 0; i < mopt.size(); ++i)
        CHECK(std::abs(mopt[i] - u0) <= 3.0 * sopt[i] + 2e-3);  // flat within mc + Euler error

    const auto [mpert, spert] = run(0.4);
    for (std::size_t i = 0; i < mpert.size(); ++i)
        CHECK(mpert[i] <= u0 + 3.0 * spert[i]);  // any fixed perturbation is a supermartingale
}

TEST_CASE("volatility identity of the criterion increments") {
    // at fixed wealth the criterion field drifts at (-F(v, z) + |z|^2/2) dt,
    // with the long-run pair as volatility
    const ModelSpec m = model(ThetaSpec::capped_linear(2.0), 0.5, {0.6, 0.8});
    const Grid1D grid(-12.0, 12.0, 481);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    const double v0 = 0.5, dt = 1.0 / 512.0, sdt = std::sqrt(dt);
    const int n_paths = 100000;

    const Vec2 z = sol.z_at(v0);
    const double target = (-driver_f(m, v0, z) + 0.5 * z.norm2()) * dt;
    const double u0 = forward_performance(sol, m, 0.0, 0.0, v0);
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t p = 0; p < n_paths; ++p) {
        const rng::NormalPair nz = rng::draw_normal_pair(77, p, 0);
        const double v = v0 + eta_at(m, v0) * dt +
                         sdt * (m.kappa.x1 * nz.z1 + m.kappa.x2 * nz.z2);
        const double r = (forward_performance(sol, m, 0.0, dt, v) - u0) / u0;
        sum += r;
        sumsq += r * r;
    }
    const double mean = sum / n_paths;
    const double se = std::sqrt((sumsq - n_paths * mean * mean) / (n_paths - 1.0) / n_paths);
    const double h = grid.spacing();
    CHECK(std::abs(mean - target) <= 3.0 * se + 5.0 * dt * dt + h * h);
}

TEST_CASE("misconfigured schedules are rejected") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 301);
    ErgodicOptions opt;
    opt.rho_schedule = {};
    CHECK_THROWS_AS(solve_ergodic(m, grid, opt), std::invalid_argument);
    opt.rho_schedule = {1e-3, 1e-2};
    CHECK_THROWS_AS(solve_ergodic(m, grid, opt), std::invalid_argument);
}
