#include "fer/example.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fer {

namespace {

void require_example_preset(const ModelSpec& m) {
    if (m.constraint != ConstraintSet::first_coordinate_line)
        throw std::invalid_argument("closed form requires the single-stock line constraint");
    if (std::abs(m.kappa.x2) < 1e-12)
        throw std::invalid_argument("closed form degenerates at kappa2 = 0");
}

// ln-of-mean estimator of (1/c) ln E[exp(c g(V_T))] with jackknife bias
// correction; stderr by the delta method on the inner mean.
McEstimate log_exp_estimate(std::vector<double> exp_samples, double c, const McConfig& cfg) {
    if (cfg.antithetic) {
        std::vector<double> paired;
        paired.reserve(exp_samples.size() / 2);
        for (std::size_t i = 0; i + 1 < exp_samples.size(); i += 2)
            paired.push_back(0.5 * (exp_samples[i] + exp_samples[i + 1]));
        exp_samples.swap(paired);
    }
    const std::size_t n = exp_samples.size();
    double sum = 0.0;
    for (double x : exp_samples) sum += x;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : exp_samples) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    const double plain = std::log(mean) / c;
    double loo_sum = 0.0;  // leave-one-out estimates
    for (double x : exp_samples)
        loo_sum += std::log((sum - x) / static_cast<double>(n - 1)) / c;
    const double jack =
        static_cast<double>(n) * plain - (static_cast<double>(n - 1) / n) * loo_sum;
    const double se = sd / (mean * std::sqrt(static_cast<double>(n)) * std::abs(c));
    return {jack, se, static_cast<std::int64_t>(n), cfg.seed};
}

}  // namespace

double gaussian_forward_value(const ModelSpec& m, double v0, double T) {
    if (m.theta.kind != ThetaSpec::Kind::constant)
        throw std::invalid_argument("gaussian oracle needs the constant theta preset");
    const double a = m.eta.alpha;
    const double decay = std::exp(-a * T);
    const double mean = v0 * decay - (m.kappa.x1 * m.theta.theta0 / a) * (1.0 - decay);
    const double var = m.kappa_norm2() * (1.0 - decay * decay) / (2.0 * a);
    return mean + 0.5 * m.gamma * m.kappa.x2 * m.kappa.x2 * var;
}

McEstimate forward_closed_form(const ModelSpec& m, const ErgodicSolution& ergodic,
                               const PayoffSpec& payoff, double T, double v0,
                               const McConfig& cfg) {
    require_example_preset(m);
    const double c = m.gamma * m.kappa.x2 * m.kappa.x2;
    const DriftAdjust adjust = [&](double v, double) {
        return -m.kappa.x1 * theta_at(m, v) + m.kappa.x2 * interp_clamped(ergodic.z2, v);
    };
    std::vector<double> xs = for_each_path(
        m, v0, T, cfg, adjust,
        [&](std::int64_t, std::span<const double>, std::span<const double> path) {
            return std::exp(c * payoff_at(payoff, path.back()));
        });
    return log_exp_estimate(std::move(xs), c, cfg);
}

McEstimate classical_closed_form(const ModelSpec& m, const ClassicalSurface& p0,
                                 const PayoffSpec& payoff, double T, double v0,
                                 const McConfig& cfg) {
    require_example_preset(m);
    if (p0.maturity() < T)
        throw std::invalid_argument("classical_closed_form: zero-position surface too short");
    const double c = m.gamma * m.kappa.x2 * m.kappa.x2;
    const DriftAdjust adjust = [&](double v, double t) {
        const double q20 = p0.q(v, t).x2;
        return -m.kappa.x1 * theta_at(m, v) + m.kappa.x2 * m.gamma * q20;
    };
    std::vector<double> xs = for_each_path(
        m, v0, T, cfg, adjust,
        [&](std::int64_t, std::span<const double>, std::span<const double> path) {
            return std::exp(c * payoff_at(payoff, path.back()));
        });
    return log_exp_estimate(std::move(xs), c, cfg);
}

MeasureGap measure_comparison(const ModelSpec& m, const ErgodicSolution& ergodic,
                              const ClassicalSurface& p0, double horizon, const McConfig& cfg) {
    require_example_preset(m);
    const double k2 = m.kappa.x2;
    const auto field = [&](double v, double t) {
        return std::abs(k2 * (m.gamma * p0.q(v, t).x2 - interp_clamped(ergodic.z2, v)));
    };
    const std::vector<double> sups = for_each_path(
        m, 0.0, horizon, cfg, {},
        [&](std::int64_t, std::span<const double> times, std::span<const double> path) {
            double w = 0.0;
            for (std::size_t k = 0; k < times.size(); ++k) w = std::max(w, field(path[k], times[k]));
            return w;
        });
    MeasureGap gap;
    for (double s : sups) gap.sup_along_paths = std::max(gap.sup_along_paths, s);
    const Grid1D& grid = p0.grid();
    for (int i = 1; i + 1 < grid.n_nodes(); ++i)
        gap.sup_at_t0 = std::max(gap.sup_at_t0, field(grid.node(i), 0.0));
    return gap;
}

ClosedFormReport closed_form_report(const ModelSpec& m, const ErgodicSolution& ergodic,
                                    const PayoffSpec& payoff, double T, double v0,
                                    const Grid1D& grid, int time_steps, const McConfig& cfg) {
    ClosedFormReport rep;
    const RiskSurface u =
        solve_risk_bsde(m, ergodic, payoff, T, time_steps, pde::RecordPolicy::none());
    rep.rho_forward_pde = u.value(v0, 0.0);

    const GridFn g = sample(grid, [&](double v) { return payoff_at(payoff, v); });
    const ClassicalSurface pg =
        solve_classical(m, g, T, time_steps, pde::RecordPolicy::none());
    const ClassicalSurface p0 =
        solve_classical(m, GridFn(grid), T, time_steps, pde::RecordPolicy::all());
    rep.rho_classical_pde = pg.value(v0, 0.0) - p0.value(v0, 0.0);

    rep.rho_forward_mc = forward_closed_form(m, ergodic, payoff, T, v0, cfg);
    rep.rho_classical_mc = classical_closed_form(m, p0, payoff, T, v0, cfg);

    if (m.theta.kind == ThetaSpec::Kind::constant && payoff.kind == PayoffSpec::Kind::linear)
        rep.gaussian_oracle = gaussian_forward_value(m, v0, T);
    return rep;
}

}  // namespace fer
