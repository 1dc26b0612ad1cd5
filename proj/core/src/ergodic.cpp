#include "fer/ergodic.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace fer {

double driver_f(const ModelSpec& m, double v, Vec2 z) {
    const double th = theta_at(m, v);
    const Vec2 zt{z.x1 + th, z.x2};
    const Vec2 w = (1.0 / m.gamma) * zt;
    return 0.5 * m.gamma * m.gamma * dist2_pi(m, w) - 0.5 * zt.norm2() + 0.5 * z.norm2();
}

Vec2 driver_f_grad(const ModelSpec& m, double v, Vec2 z) {
    const double th = theta_at(m, v);
    const Vec2 zt{z.x1 + th, z.x2};
    const Vec2 w = (1.0 / m.gamma) * zt;
    const Vec2 r = m.gamma * (w - project_pi(m, w));
    return {r.x1 - th, r.x2};
}

pde::Semilinear ergodic_operator(const ModelSpec& m, const Grid1D& grid) {
    pde::Semilinear op{grid, 0.5 * m.kappa_norm2(), {}, {}};
    op.drift.resize(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) op.drift[i] = eta_at(m, grid.node(i));
    const std::vector<double> nodes = grid.nodes();
    op.driver = [m, nodes](int i, double s, double& value, double& slope) {
        const Vec2 z = {m.kappa.x1 * s, m.kappa.x2 * s};
        value = driver_f(m, nodes[i], z);
        const Vec2 gr = driver_f_grad(m, nodes[i], z);
        slope = m.kappa.x1 * gr.x1 + m.kappa.x2 * gr.x2;
    };
    return op;
}

ErgodicSolution solve_ergodic(const ModelSpec& m, const Grid1D& grid, const ErgodicOptions& opt) {
    if (opt.rho_schedule.empty())
        throw std::invalid_argument("solve_ergodic: empty discount schedule");
    for (std::size_t k = 0; k < opt.rho_schedule.size(); ++k) {
        if (!(opt.rho_schedule[k] > 0.0) ||
            (k > 0 && opt.rho_schedule[k] >= opt.rho_schedule[k - 1]))
            throw std::invalid_argument("solve_ergodic: schedule must be positive and decreasing");
    }
    const pde::Semilinear op = ergodic_operator(m, grid);

    const int ref = opt.ref_node >= 0 ? opt.ref_node : grid.zero_node();
    if (ref < 0 || ref >= grid.n_nodes())
        throw std::invalid_argument("solve_ergodic: reference node outside grid");

    GridFn y(grid);
    double c_init = 0.0;
    std::vector<double> lambdas;  // lambda_rho read at the reference node
    for (std::size_t k = 0; k < opt.rho_schedule.size(); ++k) {
        const double rho = opt.rho_schedule[k];
        pde::EllipticResult leg = pde::elliptic_discounted_solve(op, rho, y, c_init, opt.inner);
        y = std::move(leg.y);
        lambdas.push_back(leg.lambda_rho + rho * y[ref]);
        if (k + 1 < opt.rho_schedule.size())
            c_init = leg.lambda_rho / opt.rho_schedule[k + 1];  // shape carries over, constant rescales
    }

    // lambda_rho = lambda + O(rho): Richardson over the two finest legs
    double lambda;
    if (lambdas.size() >= 2) {
        const double ra = opt.rho_schedule[lambdas.size() - 2];
        const double rb = opt.rho_schedule[lambdas.size() - 1];
        const double la = lambdas[lambdas.size() - 2];
        const double lb = lambdas[lambdas.size() - 1];
        lambda = (ra * lb - rb * la) / (ra - rb);
    } else {
        lambda = lambdas.back();
    }
    // re-normalize at the reference node (a no-op for the default v = 0)
    const double shift = y[ref];
    for (double& u : y.values) u -= shift;

    ErgodicSolution sol{lambda, y, d1(y), GridFn(grid), GridFn(grid), opt.rho_schedule, 0.0};
    for (int i = 0; i < grid.n_nodes(); ++i) {
        sol.z1[i] = m.kappa.x1 * sol.dy[i];
        sol.z2[i] = m.kappa.x2 * sol.dy[i];
    }
    const GridFn ypp = d2(y);
    double worst = 0.0;
    for (int i = 1; i + 1 < grid.n_nodes(); ++i) {
        const double f = driver_f(m, grid.node(i), {sol.z1[i], sol.z2[i]});
        const double r = op.diff * ypp[i] + op.drift[i] * sol.dy[i] + f - lambda;
        worst = std::max(worst, std::abs(r));
    }
    sol.residual = worst;
    return sol;
}

double forward_performance(const ErgodicSolution& sol, const ModelSpec& m, double x, double t,
                           double v) {
    return -std::exp(-m.gamma * x + interp(sol.y, v) - sol.lambda * t);
}

Vec2 optimal_strategy(const ErgodicSolution& sol, const ModelSpec& m, double v) {
    const Vec2 z = sol.z_at(v);
    const Vec2 w = (1.0 / m.gamma) * Vec2{theta_at(m, v) + z.x1, z.x2};
    return project_pi(m, w);
}

}  // namespace fer
