#include "fer/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fer {

RiskSurface::RiskSurface(double T, Vec2 kappa, std::vector<double> times,
                         std::vector<GridFn> levels)
    : T_(T), kappa_(kappa), times_(std::move(times)), levels_(std::move(levels)) {
    if (levels_.empty() || levels_.size() != times_.size())
        throw std::invalid_argument("RiskSurface: level/time mismatch");
    dlevels_.reserve(levels_.size());
    for (const GridFn& u : levels_) dlevels_.push_back(d1(u));
}

std::pair<int, double> RiskSurface::locate(double t) const {
    if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12)
        throw std::out_of_range("RiskSurface: t outside recorded range");
    if (times_.size() == 1) return {0, 0.0};
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    int k = static_cast<int>(it - times_.begin()) - 1;
    k = std::clamp(k, 0, static_cast<int>(times_.size()) - 2);
    const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return {k, std::clamp(w, 0.0, 1.0)};
}

double RiskSurface::value(double v, double t) const {
    const auto [k, w] = locate(t);
    if (times_.size() == 1) return interp(levels_[0], v);
    return (1.0 - w) * interp(levels_[k], v) + w * interp(levels_[k + 1], v);
}

Vec2 RiskSurface::zbar(double v, double t) const {
    const auto [k, w] = locate(t);
    double s;
    if (times_.size() == 1) {
        s = interp_clamped(dlevels_[0], v);
    } else {
        s = (1.0 - w) * interp_clamped(dlevels_[k], v) + w * interp_clamped(dlevels_[k + 1], v);
    }
    return {kappa_.x1 * s, kappa_.x2 * s};
}

double driver_g(const ModelSpec& m, double v, Vec2 z, Vec2 zbar) {
    return (driver_f(m, v, z + m.gamma * zbar) - driver_f(m, v, z)) / m.gamma;
}

Vec2 driver_g_grad(const ModelSpec& m, double v, Vec2 z, Vec2 zbar) {
    return driver_f_grad(m, v, z + m.gamma * zbar);
}

namespace {

pde::Semilinear risk_operator(const ModelSpec& m, const ErgodicSolution& ergodic,
                              const Grid1D& grid) {
    if (!(ergodic.y.grid == grid))
        throw std::invalid_argument("solve_risk_bsde: ergodic solution on a different grid");
    pde::Semilinear op{grid, 0.5 * m.kappa_norm2(), {}, {}};
    op.drift.resize(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) op.drift[i] = eta_at(m, grid.node(i));
    const std::vector<double> nodes = grid.nodes();
    const std::vector<double> z1 = ergodic.z1.values;
    const std::vector<double> z2 = ergodic.z2.values;
    op.driver = [m, nodes, z1, z2](int i, double s, double& value, double& slope) {
        const Vec2 z{z1[i], z2[i]};
        const Vec2 zb{m.kappa.x1 * s, m.kappa.x2 * s};
        value = driver_g(m, nodes[i], z, zb);
        const Vec2 gr = driver_g_grad(m, nodes[i], z, zb);
        slope = m.kappa.x1 * gr.x1 + m.kappa.x2 * gr.x2;
    };
    return op;
}

}  // namespace

RiskSurface solve_risk_bsde(const ModelSpec& m, const ErgodicSolution& ergodic,
                            const GridFn& terminal, double T, int time_steps,
                            const pde::RecordPolicy& record, const pde::ParabolicOptions& opt) {
    const pde::Semilinear op = risk_operator(m, ergodic, terminal.grid);
    pde::ParabolicResult res = pde::parabolic_solve(op, terminal, T, time_steps, opt, record);
    if (res.levels.empty() || res.times.front() > 0.0) {
        res.times.insert(res.times.begin(), 0.0);
        res.levels.insert(res.levels.begin(), res.final_level);
    }
    return RiskSurface(T, m.kappa, std::move(res.times), std::move(res.levels));
}

RiskSurface solve_risk_bsde(const ModelSpec& m, const ErgodicSolution& ergodic,
                            const PayoffSpec& payoff, double T, int time_steps,
                            const pde::RecordPolicy& record, const pde::ParabolicOptions& opt) {
    const GridFn terminal =
        sample(ergodic.y.grid, [&](double v) { return payoff_at(payoff, v); });
    return solve_risk_bsde(m, ergodic, terminal, T, time_steps, record, opt);
}

double forward_entropic_risk(const RiskSurface& surface, double v, double t) {
    return surface.value(v, t);
}

Vec2 hedging_strategy(const ModelSpec& m, const ErgodicSolution& ergodic,
                      const RiskSurface& surface, double v, double t) {
    const Vec2 z = ergodic.z_at(v);
    const Vec2 base = (1.0 / m.gamma) * Vec2{theta_at(m, v) + z.x1, z.x2};
    return project_pi(m, surface.zbar(v, t) + base) - project_pi(m, base);
}

double time_consistency_check(const ModelSpec& m, const ErgodicSolution& ergodic,
                              const PayoffSpec& payoff, double T, double s, const Grid1D& grid,
                              int time_steps) {
    if (!(s > 0.0) || s > T) throw std::invalid_argument("time_consistency_check: need 0 < s <= T");
    const GridFn g = sample(grid, [&](double v) { return payoff_at(payoff, v); });
    const double dt = T / time_steps;

    const RiskSurface direct = solve_risk_bsde(m, ergodic, g, T, time_steps,
                                               pde::RecordPolicy::none());
    if (s == T) {
        // degenerate split: composition is the direct solve by construction
        return 0.0;
    }
    const int steps_tail = std::max(1, static_cast<int>(std::lround((T - s) / dt)));
    const int steps_head = std::max(1, static_cast<int>(std::lround(s / dt)));
    const RiskSurface tail = solve_risk_bsde(m, ergodic, g, T - s, steps_tail,
                                             pde::RecordPolicy::none());
    // rho_s slice becomes the new position: xi_s = -rho_s per time-consistency
    const RiskSurface head = solve_risk_bsde(m, ergodic, tail.level(0), s, steps_head,
                                             pde::RecordPolicy::none());

    double worst = 0.0;
    for (int i = 1; i + 1 < grid.n_nodes(); ++i)
        worst = std::max(worst, std::abs(head.level(0)[i] - direct.level(0)[i]));
    return worst;
}

}  // namespace fer
