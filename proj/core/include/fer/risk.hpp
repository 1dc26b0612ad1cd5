#pragma once

#include <vector>

#include "fer/ergodic.hpp"
#include "fer/grid.hpp"
#include "fer/model.hpp"
#include "fer/pde.hpp"

namespace fer {

/// Space-time solution surface of the risk-measure equation: u(v, t) is the
/// measure of the position maturing at T, zbar = kappa du/dv its martingale
/// component. Levels are whatever the record policy kept (always t = 0).
class RiskSurface {
public:
    RiskSurface(double T, Vec2 kappa, std::vector<double> times, std::vector<GridFn> levels);

    double maturity() const { return T_; }
    const Grid1D& grid() const { return levels_.front().grid; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<GridFn>& levels() const { return levels_; }
    const GridFn& level(int k) const { return levels_[k]; }
    const GridFn& slope_level(int k) const { return dlevels_[k]; }

    /// Bilinear u(v, t); throws std::out_of_range outside the recorded domain.
    double value(double v, double t) const;
    /// zbar(v, t) = kappa * du/dv, clamped in v (affine beyond the domain).
    Vec2 zbar(double v, double t) const;

private:
    std::pair<int, double> locate(double t) const;
    double T_;
    Vec2 kappa_;
    std::vector<double> times_;
    std::vector<GridFn> levels_;
    std::vector<GridFn> dlevels_;
};

/// Driver G(v, z, zbar) = (F(v, z + gamma zbar) - F(v, z)) / gamma.
double driver_g(const ModelSpec& m, double v, Vec2 z, Vec2 zbar);
/// Gradient of G in zbar, i.e. grad_z F(v, z + gamma zbar).
Vec2 driver_g_grad(const ModelSpec& m, double v, Vec2 z, Vec2 zbar);

/// Backward solve of du/dt + diff u_vv + eta u_v + G(v, z(v), kappa u_v) = 0
/// with an arbitrary terminal slice (u(., T) = terminal at nodes exactly).
RiskSurface solve_risk_bsde(const ModelSpec& m, const ErgodicSolution& ergodic,
                            const GridFn& terminal, double T, int time_steps,
                            const pde::RecordPolicy& record = pde::RecordPolicy::all(),
                            const pde::ParabolicOptions& opt = {});

/// Convenience overload for the payoff presets, terminal g(V_T).
RiskSurface solve_risk_bsde(const ModelSpec& m, const ErgodicSolution& ergodic,
                            const PayoffSpec& payoff, double T, int time_steps,
                            const pde::RecordPolicy& record = pde::RecordPolicy::all(),
                            const pde::ParabolicOptions& opt = {});

/// rho_t(xi_T) for the position xi_T = -g(V_T): the u-surface read at (v, t).
double forward_entropic_risk(const RiskSurface& surface, double v, double t);

/// alpha = Proj_Pi(zbar + (z + theta e1)/gamma) - Proj_Pi((z + theta e1)/gamma).
Vec2 hedging_strategy(const ModelSpec& m, const ErgodicSolution& ergodic,
                      const RiskSurface& surface, double v, double t);

/// Solves on [s, T], re-solves on [0, s] with the slice at s as terminal, and
/// returns the sup-node gap against the direct [0, T] solve at t = 0.
double time_consistency_check(const ModelSpec& m, const ErgodicSolution& ergodic,
                              const PayoffSpec& payoff, double T, double s, const Grid1D& grid,
                              int time_steps);

}  // namespace fer
