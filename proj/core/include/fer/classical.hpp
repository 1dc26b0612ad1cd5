#pragma once

#include <vector>

#include "fer/ergodic.hpp"
#include "fer/grid.hpp"
#include "fer/model.hpp"
#include "fer/pde.hpp"
#include "fer/risk.hpp"

namespace fer {

/// Solution surface P(v, t) of the fixed-horizon quadratic equation behind the
/// classical entropic measure, with Q = kappa dP/dv.
class ClassicalSurface {
public:
    ClassicalSurface(double T, Vec2 kappa, std::vector<double> times, std::vector<GridFn> levels);

    double maturity() const { return T_; }
    const Grid1D& grid() const { return levels_.front().grid; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<GridFn>& levels() const { return levels_; }
    const GridFn& level(int k) const { return levels_[k]; }
    const GridFn& slope_level(int k) const { return dlevels_[k]; }

    double value(double v, double t) const;
    Vec2 q(double v, double t) const;  // kappa * dP/dv, clamped in v

private:
    std::pair<int, double> locate(double t) const;
    double T_;
    Vec2 kappa_;
    std::vector<double> times_;
    std::vector<GridFn> levels_;
    std::vector<GridFn> dlevels_;
};

/// Backward solve of dP/dt + diff P_vv + eta P_v + F(v, gamma kappa P_v)/gamma = 0
/// with the given terminal slice (exact at nodes).
ClassicalSurface solve_classical(const ModelSpec& m, const GridFn& terminal, double T,
                                 int time_steps,
                                 const pde::RecordPolicy& record = pde::RecordPolicy::all(),
                                 const pde::ParabolicOptions& opt = {});

/// Classical entropic risk of xi_T = -g(V_T) at t = 0 on the whole grid:
/// rho_{0,T} = P^{g} (., 0) - P^{0}(., 0).
GridFn classical_entropic_risk(const ModelSpec& m, const PayoffSpec& payoff, double T,
                               const Grid1D& grid, int time_steps);

/// Flow-property counterpart of the forward check: both defining solves are
/// restarted at s from their own slices and composed down to 0.
double classical_time_consistency_check(const ModelSpec& m, const PayoffSpec& payoff, double T,
                                        double s, const Grid1D& grid, int time_steps);

struct ParityReport {
    double max_residual = 0.0;        // over interior nodes and all time levels
    GridFn forward_t0;                // u(., 0)
    GridFn classical_pair_t0;         // P1(., 0) - P2(., 0)
    GridFn classical_risk_t0;         // rho_{0,T} = P^g(., 0) - P^0(., 0)
};

/// Decomposition check: the forward measure against the difference of the two
/// classical measures with terminal slices g + (y - lambda T)/gamma and
/// (y - lambda T)/gamma (the ergodic y is used node-exactly, no re-interpolation).
ParityReport parity_check(const ModelSpec& m, const ErgodicSolution& ergodic,
                          const PayoffSpec& payoff, double T, const Grid1D& grid, int time_steps);

}  // namespace fer
