#include "fer/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fer {

ClassicalSurface::ClassicalSurface(double T, Vec2 kappa, std::vector<double> times,
                                   std::vector<GridFn> levels)
    : T_(T), kappa_(kappa), times_(std::move(times)), levels_(std::move(levels)) {
    if (levels_.empty() || levels_.size() != times_.size())
        throw std::invalid_argument("ClassicalSurface: level/time mismatch");
    dlevels_.reserve(levels_.size());
    for (const GridFn& u : levels_) dlevels_.push_back(d1(u));
}

std::pair<int, double> ClassicalSurface::locate(double t) const {
    if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12)
        throw std::out_of_range("ClassicalSurface: t outside recorded range");
    if (times_.size() == 1) return {0, 0.0};
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    int k = static_cast<int>(it - times_.begin()) - 1;
    k = std::clamp(k, 0, static_cast<int>(times_.size()) - 2);
    const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return {k, std::clamp(w, 0.0, 1.0)};
}

double ClassicalSurface::value(double v, double t) const {
    const auto [k, w] = locate(t);
    if (times_.size() == 1) return interp(levels_[0], v);
    return (1.0 - w) * interp(levels_[k], v) + w * interp(levels_[k + 1], v);
}

Vec2 ClassicalSurface::q(double v, double t) const {
    const auto [k, w] = locate(t);
    double s;
    if (times_.size() == 1) {
        s = interp_clamped(dlevels_[0], v);
    } else {
        s = (1.0 - w) * interp_clamped(dlevels_[k], v) + w * interp_clamped(dlevels_[k + 1], v);
    }
    return {kappa_.x1 * s, kappa_.x2 * s};
}

namespace {

pde::Semilinear classical_operator(const ModelSpec& m, const Grid1D& grid) {
    pde::Semilinear op{grid, 0.5 * m.kappa_norm2(), {}, {}};
    op.drift.resize(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) op.drift[i] = eta_at(m, grid.node(i));
    const std::vector<double> nodes = grid.nodes();
    op.driver = [m, nodes](int i, double s, double& value, double& slope) {
        const Vec2 q{m.gamma * m.kappa.x1 * s, m.gamma * m.kappa.x2 * s};
        value = driver_f(m, nodes[i], q) / m.gamma;
        const Vec2 gr = driver_f_grad(m, nodes[i], q);
        slope = m.kappa.x1 * gr.x1 + m.kappa.x2 * gr.x2;
    };
    return op;
}

ClassicalSurface to_surface(const ModelSpec& m, double T, pde::ParabolicResult res) {
    if (res.levels.empty() || res.times.front() > 0.0) {
        res.times.insert(res.times.begin(), 0.0);
        res.levels.insert(res.levels.begin(), res.final_level);
    }
    return ClassicalSurface(T, m.kappa, std::move(res.times), std::move(res.levels));
}

}  // namespace

ClassicalSurface solve_classical(const ModelSpec& m, const GridFn& terminal, double T,
                                 int time_steps, const pde::RecordPolicy& record,
                                 const pde::ParabolicOptions& opt) {
    const pde::Semilinear op = classical_operator(m, terminal.grid);
    return to_surface(m, T, pde::parabolic_solve(op, terminal, T, time_steps, opt, record));
}

GridFn classical_entropic_risk(const ModelSpec& m, const PayoffSpec& payoff, double T,
                               const Grid1D& grid, int time_steps) {
    const GridFn g = sample(grid, [&](double v) { return payoff_at(payoff, v); });
    const ClassicalSurface pg =
        solve_classical(m, g, T, time_steps, pde::RecordPolicy::none());
    const ClassicalSurface p0 =
        solve_classical(m, GridFn(grid), T, time_steps, pde::RecordPolicy::none());
    GridFn out(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) out[i] = pg.level(0)[i] - p0.level(0)[i];
    return out;
}

double classical_time_consistency_check(const ModelSpec& m, const PayoffSpec& payoff, double T,
                                        double s, const Grid1D& grid, int time_steps) {
    if (!(s > 0.0) || s > T)
        throw std::invalid_argument("classical_time_consistency_check: need 0 < s <= T");
    const GridFn g = sample(grid, [&](double v) { return payoff_at(payoff, v); });
    const double dt = T / time_steps;
    const auto none = pde::RecordPolicy::none();

    const ClassicalSurface pg = solve_classical(m, g, T, time_steps, none);
    const ClassicalSurface p0 = solve_classical(m, GridFn(grid), T, time_steps, none);
    if (s == T) return 0.0;

    const int steps_tail = std::max(1, static_cast<int>(std::lround((T - s) / dt)));
    const int steps_head = std::max(1, static_cast<int>(std::lround(s / dt)));
    const ClassicalSurface pg_tail = solve_classical(m, g, T - s, steps_tail, none);
    const ClassicalSurface p0_tail = solve_classical(m, GridFn(grid), T - s, steps_tail, none);
    const ClassicalSurface pg_comp = solve_classical(m, pg_tail.level(0), s, steps_head, none);
    const ClassicalSurface p0_comp = solve_classical(m, p0_tail.level(0), s, steps_head, none);

    double worst = 0.0;
    for (int i = 1; i + 1 < grid.n_nodes(); ++i) {
        const double direct = pg.level(0)[i] - p0.level(0)[i];
        const double composed = pg_comp.level(0)[i] - p0_comp.level(0)[i];
        worst = std::max(worst, std::abs(composed - direct));
    }
    return worst;
}

ParityReport parity_check(const ModelSpec& m, const ErgodicSolution& ergodic,
                          const PayoffSpec& payoff, double T, const Grid1D& grid,
                          int time_steps) {
    if (!(ergodic.y.grid == grid))
        throw std::invalid_argument("parity_check: ergodic solution on a different grid");
    const GridFn g = sample(grid, [&](double v) { return payoff_at(payoff, v); });

    GridFn term_shift(grid);  // (y - lambda T) / gamma
    for (int i = 0; i < grid.n_nodes(); ++i)
        term_shift[i] = (ergodic.y[i] - ergodic.lambda * T) / m.gamma;
    GridFn term_pos(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) term_pos[i] = g[i] + term_shift[i];

    const auto all = pde::RecordPolicy::all();
    const ClassicalSurface p1 = solve_classical(m, term_pos, T, time_steps, all);
    const ClassicalSurface p2 = solve_classical(m, term_shift, T, time_steps, all);
    const RiskSurface u = solve_risk_bsde(m, ergodic, g, T, time_steps, all);

    double worst = 0.0;
    for (std::size_t k = 0; k < u.levels().size(); ++k)
        for (int i = 1; i + 1 < grid.n_nodes(); ++i)
            worst = std::max(worst, std::abs(u.level(static_cast<int>(k))[i] -
                                             (p1.level(static_cast<int>(k))[i] -
                                              p2.level(static_cast<int>(k))[i])));

    ParityReport rep{worst, u.level(0), GridFn(grid), GridFn(grid)};
    for (int i = 0; i < grid.n_nodes(); ++i)
        rep.classical_pair_t0[i] = p1.level(0)[i] - p2.level(0)[i];
    rep.classical_risk_t0 = classical_entropic_risk(m, payoff, T, grid, time_steps);
    return rep;
}

}  // namespace fer
