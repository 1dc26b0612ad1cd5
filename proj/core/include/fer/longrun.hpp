#pragma once

#include <optional>
#include <vector>

#include "fer/classical.hpp"
#include "fer/ergodic.hpp"
#include "fer/model.hpp"
#include "fer/risk.hpp"
#include "fer/sde.hpp"

namespace fer {

struct SweepRow {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double v0 = 0.0;
    double T = 0.0;
    double rho_forward = 0.0;
    double rho_classical = 0.0;
};

struct DecayFit {
    bool degenerate = true;  // too few usable maturities (flat data)
    double rate = 0.0;       // positive certifies exponential decay
    double C = 0.0;
    double L = 0.0;          // refined limit (initialized from the sweep's L_g)
    double r_squared = 0.0;  // in log-gap space, over the fitted window
    int n_points = 0;
    double window_start = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;            // full (v0, T) product grid
    std::vector<double> v0_list;
    std::vector<double> t_list;
    double L_g = 0.0;                      // forward value at largest T, averaged over v0
    std::vector<double> v0_spread;         // per T: max-min of rho_forward over v0
    std::optional<DecayFit> fit;           // forward-measure decay fit

    std::vector<double> forward_mean_by_t() const;
};

/// One forward solve and one classical pair per maturity, read at every v0.
/// Cells are independent and run in parallel with slot-indexed aggregation.
SweepResult maturity_sweep(const ModelSpec& m, const ErgodicSolution& ergodic,
                           const PayoffSpec& payoff, const std::vector<double>& v0_list,
                           const std::vector<double>& t_list, const Grid1D& grid, double dt,
                           bool with_classical = true);

/// Exponential-decay fit of the v0-averaged forward values:
///   rho(T) ~ L + C e^{-rate T}.
/// Maturities inside the burn-in (first 20% of the list), the final maturity,
/// gaps below the 1e-8 floor, and the sub-noise tail (relative floor 1e-3 of
/// the first usable gap, detected with a same-sign monotone prefix) are
/// excluded; the window start is then chosen to maximize log-space R^2 and the
/// limit L is refined jointly with (C, rate).
DecayFit fit_decay(const SweepResult& sweep);
DecayFit fit_decay(const std::vector<double>& t_list, const std::vector<double>& rho,
                   double floor = 1e-8, double rel_floor = 1e-3);

struct HedgingRow {
    double T = 0.0;
    double estimate = 0.0;  // E int_0^s |alpha_{t,T}|^2 dt
    double std_error = 0.0;
};

struct HedgingDecay {
    std::vector<HedgingRow> rows;
    bool degenerate = false;  // all estimates at zero (nothing to hedge)
    double log_slope = 0.0;   // negative certifies exponential decay in T
};

/// Per maturity: solves the risk surface on [0, T], then integrates the
/// squared hedging strategy over [0, s] along physical-measure paths. The same
/// Monte Carlo configuration (hence the same driving noise) is reused across
/// maturities so the decay in T is monotone path by path.
HedgingDecay hedging_decay(const ModelSpec& m, const ErgodicSolution& ergodic,
                           const PayoffSpec& payoff, double v0, double s,
                           const std::vector<double>& t_list, const Grid1D& grid, double dt,
                           const McConfig& cfg);

}  // namespace fer
