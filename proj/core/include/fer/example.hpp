#pragma once

#include <optional>

#include "fer/classical.hpp"
#include "fer/ergodic.hpp"
#include "fer/model.hpp"
#include "fer/sde.hpp"

namespace fer {

/// Analytic value of the forward measure for the mean-reverting factor with a
/// constant market price of risk and the linear position: the factor is
/// Gaussian under the pricing measure, so the log-exponential moment is
/// explicit:
///   v0 e^{-aT} - (k1 th0 / a)(1 - e^{-aT})
///   + (gamma k2^2 / 2) |kappa|^2 (1 - e^{-2aT}) / (2a).
/// Exact under |kappa| = 1; kept independent of the Monte Carlo and PDE paths.
double gaussian_forward_value(const ModelSpec& m, double v0, double T);

/// Forward measure via the pricing-measure simulation of the one-factor case:
/// drift adjustment -kappa1 theta(v) + kappa2 z2(v), estimator
///   ln E[exp(gamma kappa2^2 g(V_T))] / (gamma kappa2^2)
/// with first-order jackknife bias removal and delta-method stderr.
/// Requires the line constraint and kappa2 != 0.
McEstimate forward_closed_form(const ModelSpec& m, const ErgodicSolution& ergodic,
                               const PayoffSpec& payoff, double T, double v0,
                               const McConfig& cfg);

/// Classical counterpart: the pricing drift uses the zero-position surface,
/// adjustment -kappa1 theta(v) + kappa2 gamma Q2^0(v, t).
McEstimate classical_closed_form(const ModelSpec& m, const ClassicalSurface& p0,
                                 const PayoffSpec& payoff, double T, double v0,
                                 const McConfig& cfg);

struct MeasureGap {
    double sup_along_paths = 0.0;  // sup over simulated paths of |kappa2 (gamma Q2^0 - z2)|
    double sup_at_t0 = 0.0;        // same field over interior nodes at t = 0
};

/// Magnitude of the density driver separating the two pricing measures; tends
/// to zero in T as the zero-position gradient approaches the ergodic field.
MeasureGap measure_comparison(const ModelSpec& m, const ErgodicSolution& ergodic,
                              const ClassicalSurface& p0, double horizon, const McConfig& cfg);

struct ClosedFormReport {
    McEstimate rho_forward_mc;
    McEstimate rho_classical_mc;
    double rho_forward_pde = 0.0;
    double rho_classical_pde = 0.0;
    std::optional<double> gaussian_oracle;
};

/// Runs both PDE routes and both simulation routes for one (T, v0) cell; the
/// Gaussian oracle is attached when its preset conditions hold.
ClosedFormReport closed_form_report(const ModelSpec& m, const ErgodicSolution& ergodic,
                                    const PayoffSpec& payoff, double T, double v0,
                                    const Grid1D& grid, int time_steps, const McConfig& cfg);

}  // namespace fer
