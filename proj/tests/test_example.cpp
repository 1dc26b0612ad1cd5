#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fer/example.hpp"

using namespace fer;

namespace {

ModelSpec model(ThetaSpec theta, double alpha, Vec2 kappa, double gamma = 1.0) {
    ModelSpec m;
    m.gamma = gamma;
    m.kappa = kappa;
    m.eta = EtaSpec::ou(alpha);
    m.c_eta = alpha;
    m.theta = theta;
    m.constraint = ConstraintSet::first_coordinate_line;
    return m;
}

ModelSpec figure_model() { return model(ThetaSpec::capped_linear(10.0), 0.1, {0.0, 1.0}); }

}  // namespace

TEST_CASE("Gaussian value of the linear position under the pricing measure") {
    const ModelSpec m = model(ThetaSpec::constant(0.5), 0.3, {0.6, 0.8}, 1.2);
    CHECK(gaussian_forward_value(m, 1.0, 4.0) ==
          doctest::Approx(0.1843289337191803).epsilon(1e-14));
    // capped preset is outside the oracle's scope
    CHECK_THROWS_AS(gaussian_forward_value(figure_model(), 1.0, 4.0), std::invalid_argument);
}

TEST_CASE("constant positions price exactly through the log-exponential estimator") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 601);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    McConfig cfg;
    cfg.n_paths = 500;
    cfg.n_steps = 50;
    const McEstimate est = forward_closed_form(m, sol, PayoffSpec::constant(1.7), 2.0, 8.0, cfg);
    // deterministic integrand: exact up to the jackknife's n-fold roundoff blowup
    CHECK(std::abs(est.mean - 1.7) < 1e-10);
    CHECK(est.std_error < 1e-12);
}

TEST_CASE("simulation route reproduces the Gaussian oracle") {
    const ModelSpec m = model(ThetaSpec::constant(0.5), 0.3, {0.6, 0.8}, 1.2);
    const Grid1D grid(-30.0, 30.0, 601);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    McConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 400;
    cfg.seed = 2718;
    const McEstimate est = forward_closed_form(m, sol, PayoffSpec::linear(), 4.0, 1.0, cfg);
    CHECK(std::abs(est.mean - gaussian_forward_value(m, 1.0, 4.0)) <=
          3.0 * est.std_error + 2e-3);
}

TEST_CASE("with constant theta the two pricing measures coincide pathwise") {
    // Q2^0 = 0 = z2, so with common random numbers the estimators are identical
    const ModelSpec m = model(ThetaSpec::constant(0.5), 0.3, {0.6, 0.8}, 1.2);
    const Grid1D grid(-30.0, 30.0, 601);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    const ClassicalSurface p0 = solve_classical(m, GridFn(grid), 3.0, 120);
    McConfig cfg;
    cfg.n_paths = 4000;
    cfg.n_steps = 150;
    const McEstimate fwd = forward_closed_form(m, sol, PayoffSpec::put_like(10.0), 3.0, 5.0, cfg);
    const McEstimate cls = classical_closed_form(m, p0, PayoffSpec::put_like(10.0), 3.0, 5.0, cfg);
    CHECK(fwd.mean == doctest::Approx(cls.mean).epsilon(1e-11));
}

TEST_CASE("figure-parameter cross route at one cell") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 1201);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    McConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 500;
    cfg.seed = 9;
    const ClosedFormReport rep =
        closed_form_report(m, sol, PayoffSpec::put_like(10.0), 5.0, 10.0, grid, 200, cfg);
    CHECK(std::abs(rep.rho_forward_mc.mean - rep.rho_forward_pde) <=
          3.0 * rep.rho_forward_mc.std_error + 2e-3);
    CHECK(std::abs(rep.rho_classical_mc.mean - rep.rho_classical_pde) <=
          3.0 * rep.rho_classical_mc.std_error + 2e-3);
    CHECK(!rep.gaussian_oracle.has_value());  // put-like position has no Gaussian value
}

TEST_CASE("stderr of the log estimator shrinks like one over root paths") {
    const ModelSpec m = figure_model();
    const Grid1D grid(-30.0, 30.0, 601);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    McConfig cfg;
    cfg.n_paths = 4000;
    cfg.n_steps = 100;
    cfg.seed = 5;
    const McEstimate a = forward_closed_form(m, sol, PayoffSpec::put_like(10.0), 2.0, 10.0, cfg);
    cfg.n_paths = 8000;
    const McEstimate b = forward_closed_form(m, sol, PayoffSpec::put_like(10.0), 2.0, 10.0, cfg);
    const double ratio = b.std_error / a.std_error;
    CHECK(ratio > (1.0 / std::sqrt(2.0)) * 0.8);
    CHECK(ratio < (1.0 / std::sqrt(2.0)) * 1.2);
}

TEST_CASE("small second loading keeps the estimator finite") {
    // the first figure's loading: the exponent scale gamma kappa2^2 = 0.01
    const ModelSpec m = model(ThetaSpec::capped_linear(10.0), 0.1, {0.9, 0.1});
    const Grid1D grid(-30.0, 30.0, 601);
    const ErgodicSolution sol = solve_ergodic(m, grid);
    McConfig cfg;
    cfg.n_paths = 2000;
    cfg.n_steps = 100;
    const McEstimate est = forward_closed_form(m, sol, PayoffSpec::put_like(10.0), 2.0, 10.0, cfg);
    CHECK(std::isfinite(est.mean));
    CHECK(std::isfinite(est.std_error));
}

TEST_CASE("degenerate loadings and constraints are rejected") {
    const Grid1D grid(-30.0, 30.0, 601);
    ModelSpec m = model(ThetaSpec::capped_linear(10.0), 0.1, {1.0, 0.0});
    const ErgodicSolution sol = solve_ergodic(m, grid);
    McConfig cfg;
    cfg.n_paths = 16;
    cfg.n_steps = 8;
    CHECK_THROWS_AS(forward_closed_form(m, sol, PayoffSpec::put_like(10.0), 1.0, 0.0, cfg),
                    std::invalid_argument);
    ModelSpec full = figure_model();
    full.constraint = ConstraintSet::full_space;
    CHECK_THROWS_AS(forward_closed_form(full, sol, PayoffSpec::put_like(10.0), 1.0, 0.0, cfg),
                    std::invalid_argument);
}

TEST_CASE("pricing-measure gap vanishes for constant theta and shrinks in maturity") {
    McConfig cfg;
    cfg.n_paths = 400;
    cfg.n_steps = 100;

    SUBCASE("constant theta") {
        const ModelSpec m = model(ThetaSpec::constant(0.5), 0.3, {0.6, 0.8}, 1.2);
        const Grid1D grid(-30.0, 30.0, 601);
        const ErgodicSolution sol = solve_ergodic(m, grid);
        const ClassicalSurface p0 = solve_classical(m, GridFn(grid), 3.0, 120);
        const MeasureGap gap = measure_comparison(m, sol, p0, 2.0, cfg);
        CHECK(gap.sup_along_paths < 1e-6);
        CHECK(gap.sup_at_t0 < 1e-6);
    }
    SUBCASE("figure parameters: the zero-position gradient approaches the long-run field") {
        const ModelSpec m = figure_model();
        const Grid1D grid(-30.0, 30.0, 1201);
        const ErgodicSolution sol = solve_ergodic(m, grid);
        const ClassicalSurface p0_short = solve_classical(m, GridFn(grid), 5.0, 200);
        const ClassicalSurface p0_long = solve_classical(m, GridFn(grid), 50.0, 2000);
        const MeasureGap g_short = measure_comparison(m, sol, p0_short, 1.0, cfg);
        const MeasureGap g_long = measure_comparison(m, sol, p0_long, 1.0, cfg);
        CHECK(g_long.sup_at_t0 < g_short.sup_at_t0);
    }
}
