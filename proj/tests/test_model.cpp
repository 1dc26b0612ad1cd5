#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fer/ergodic.hpp"
#include "fer/model.hpp"
#include "fer/rng.hpp"

using namespace fer;

namespace {

ModelSpec capped_line_model() {
    ModelSpec m;
    m.gamma = 1.0;
    m.kappa = {0.0, 1.0};
    m.eta = EtaSpec::ou(0.1);
    m.c_eta = 0.1;
    m.theta = ThetaSpec::capped_linear(10.0);
    m.constraint = ConstraintSet::first_coordinate_line;
    return m;
}

}  // namespace

TEST_CASE("market price of risk presets") {
    ModelSpec m = capped_line_model();
    m.theta = ThetaSpec::constant(0.5);
    CHECK(theta_at(m, 3.0) == 0.5);
    m.theta = ThetaSpec::capped_linear(10.0);
    CHECK(theta_at(m, 4.0) == 6.0);
    CHECK(theta_at(m, 12.0) == 0.0);
    CHECK(theta_at(m, -4.0) == 6.0);
    CHECK(theta_bound(m) == 10.0);
    CHECK(theta_lipschitz(m) == 1.0);
}

TEST_CASE("theta presets satisfy their pointwise Lipschitz constant") {
    const Grid1D g(-30.0, 30.0, 601);
    for (const ThetaSpec spec : {ThetaSpec::constant(0.7), ThetaSpec::capped_linear(10.0)}) {
        ModelSpec m = capped_line_model();
        m.theta = spec;
        const double lip = theta_lipschitz(m);
        for (int i = 0; i + 1 < g.n_nodes(); ++i)
            for (int j : {i + 1, std::min(i + 37, g.n_nodes() - 1)}) {
                const double dv = g.node(j) - g.node(i);
                CHECK(std::abs(theta_at(m, g.node(j)) - theta_at(m, g.node(i))) <=
                      lip * dv + 1e-14);
            }
    }
}

TEST_CASE("projection and squared distance") {
    ModelSpec line = capped_line_model();
    const Vec2 p = project_pi(line, {1.2, -0.3});
    CHECK(p.x1 == 1.2);
    CHECK(p.x2 == 0.0);
    CHECK(dist2_pi(line, {1.2, -0.3}) == doctest::Approx(0.09).epsilon(1e-14));
    CHECK(dist2_pi(line, {0.0, 0.0}) == 0.0);

    ModelSpec full = line;
    full.constraint = ConstraintSet::full_space;
    const Vec2 w{3.4, -7.1};
    const Vec2 pw = project_pi(full, w);
    CHECK(pw.x1 == w.x1);
    CHECK(pw.x2 == w.x2);
    CHECK(dist2_pi(full, w) == 0.0);
}

TEST_CASE("projection properties on sampled points") {
    ModelSpec line = capped_line_model();
    for (std::uint64_t k = 0; k < 400; ++k) {
        const Vec2 w{8.0 * (rng::draw_uniform(7, k, 0, 0) - 0.5),
                     8.0 * (rng::draw_uniform(7, k, 0, 1) - 0.5)};
        const Vec2 wb{8.0 * (rng::draw_uniform(7, k, 1, 0) - 0.5),
                      8.0 * (rng::draw_uniform(7, k, 1, 1) - 0.5)};
        // idempotent
        const Vec2 pw = project_pi(line, w);
        const Vec2 ppw = project_pi(line, pw);
        CHECK((ppw - pw).norm() == 0.0);
        // non-expansive
        CHECK((project_pi(line, w) - project_pi(line, wb)).norm() <= (w - wb).norm() + 1e-14);
        // dist2 == 0 iff projection fixes the point
        const bool on_set = dist2_pi(line, w) < 1e-28;
        CHECK(on_set == ((pw - w).norm() < 1e-14));
    }
}

TEST_CASE("payoff presets") {
    CHECK(payoff_at(PayoffSpec::constant(2.5), 17.0) == 2.5);
    CHECK(payoff_at(PayoffSpec::linear(), -3.25) == -3.25);
    CHECK(payoff_at(PayoffSpec::put_like(10.0), 4.0) == 6.0);
    CHECK(payoff_at(PayoffSpec::put_like(10.0), 15.0) == 0.0);
    CHECK(PayoffSpec::put_like(10.0).bounded());
    CHECK(PayoffSpec::constant(1.0).bounded());
    CHECK(!PayoffSpec::linear().bounded());
    CHECK(PayoffSpec::put_like(10.0).c_g == 1.0);
    CHECK(PayoffSpec::constant(3.0).c_g == 0.0);
}

TEST_CASE("driver Lipschitz constants are estimated on the truncated box") {
    const Grid1D g(-30.0, 30.0, 1201);

    SUBCASE("constant theta has no v dependence") {
        ModelSpec m = capped_line_model();
        m.theta = ThetaSpec::constant(0.5);
        const LipschitzEstimate est = estimate_lipschitz_constants(m, g);
        CHECK(est.c_v == 0.0);
        CHECK(est.c_z > 0.0);
    }

    SUBCASE("capped preset gives a finite c_v near the cap level") {
        const ModelSpec m = with_lipschitz_constants(capped_line_model(), g);
        REQUIRE(m.c_v.has_value());
        CHECK(*m.c_v > 9.0);
        CHECK(*m.c_v <= 10.0 + 1e-9);
        CHECK(std::isfinite(*m.c_z));
    }

    SUBCASE("estimated constants satisfy the two inequalities on fresh samples") {
        const ModelSpec m = with_lipschitz_constants(capped_line_model(), g);
        const double cv = *m.c_v, cz = *m.c_z;
        for (std::uint64_t k = 0; k < 3000; ++k) {
            const double v1 = 60.0 * (rng::draw_uniform(11, k, 0, 0) - 0.5);
            const double v2 = 60.0 * (rng::draw_uniform(11, k, 0, 1) - 0.5);
            const Vec2 z{4.0 * (rng::draw_uniform(11, k, 1, 0) - 0.5),
                         4.0 * (rng::draw_uniform(11, k, 1, 1) - 0.5)};
            const Vec2 z2{4.0 * (rng::draw_uniform(11, k, 2, 0) - 0.5),
                          4.0 * (rng::draw_uniform(11, k, 2, 1) - 0.5)};
            CHECK(std::abs(driver_f(m, v1, z) - driver_f(m, v2, z)) <=
                  1.05 * cv * (1.0 + z.norm()) * std::abs(v1 - v2) + 1e-12);
            CHECK(std::abs(driver_f(m, v1, z) - driver_f(m, v1, z2)) <=
                  1.05 * cz * (1.0 + z.norm() + z2.norm()) * (z - z2).norm() + 1e-12);
        }
    }
}

TEST_CASE("validation warns on the soft assumption checks") {
    ModelSpec m = capped_line_model();
    CHECK(validate(m).empty());  // |kappa| = 1, c_v not yet estimated

    m.kappa = {0.9, 0.1};
    CHECK(validate(m).size() == 1);

    m.kappa = {0.0, 1.0};
    m.c_v = 9.975;  // paper figure parameters violate c_eta > c_v
    CHECK(validate(m).size() == 1);
    CHECK(!ergodic_z_bound(m).has_value());
    CHECK(!zhat_bound(m, PayoffSpec::put_like(10.0)).has_value());

    m.gamma = -1.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
}

TEST_CASE("gradient and q bound formulas") {
    ModelSpec m = capped_line_model();
    m.eta = EtaSpec::ou(2.0);
    m.c_eta = 2.0;
    m.c_v = 1.0;
    REQUIRE(ergodic_z_bound(m).has_value());
    CHECK(*ergodic_z_bound(m) == doctest::Approx(1.0));
    const auto q = zhat_bound(m, PayoffSpec::put_like(0.5));
    REQUIRE(q.has_value());
    CHECK(*q == doctest::Approx(5.0));  // (2 + 1)/1 + 2/1 with gamma = c_g = 1
}

TEST_CASE("dissipativity of the drift preset is exact") {
    const ModelSpec m = capped_line_model();
    for (std::uint64_t k = 0; k < 200; ++k) {
        const double v = 40.0 * (rng::draw_uniform(3, k, 0, 0) - 0.5);
        const double vb = 40.0 * (rng::draw_uniform(3, k, 0, 1) - 0.5);
        CHECK((eta_at(m, v) - eta_at(m, vb)) * (v - vb) <=
              -m.c_eta * (v - vb) * (v - vb) + 1e-12);
    }
}
