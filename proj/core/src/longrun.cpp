#include "fer/longrun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fer/parallel.hpp"

namespace fer {

std::vector<double> SweepResult::forward_mean_by_t() const {
    std::vector<double> out(t_list.size(), 0.0);
    std::vector<int> counts(t_list.size(), 0);
    for (const SweepRow& r : rows) {
        for (std::size_t k = 0; k < t_list.size(); ++k)
            if (r.T == t_list[k]) {
                out[k] += r.rho_forward;
                ++counts[k];
                break;
            }
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        if (counts[k] > 0) out[k] /= counts[k];
    return out;
}

SweepResult maturity_sweep(const ModelSpec& m, const ErgodicSolution& ergodic,
                           const PayoffSpec& payoff, const std::vector<double>& v0_list,
                           const std::vector<double>& t_list, const Grid1D& grid, double dt,
                           bool with_classical) {
    if (t_list.empty() || v0_list.empty())
        throw std::invalid_argument("maturity_sweep: empty sweep axes");
    for (std::size_t k = 1; k < t_list.size(); ++k)
        if (!(t_list[k] > t_list[k - 1]))
            throw std::invalid_argument("maturity_sweep: maturities must increase");

    const GridFn g = sample(grid, [&](double v) { return payoff_at(payoff, v); });
    struct Cell {
        std::vector<double> fwd, cls;
    };
    std::vector<Cell> cells(t_list.size());

    parallel::parallel_for(t_list.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double T = t_list[k];
            const int steps = std::max(1, static_cast<int>(std::lround(T / dt)));
            const auto none = pde::RecordPolicy::none();
            const RiskSurface u = solve_risk_bsde(m, ergodic, g, T, steps, none);
            Cell& cell = cells[k];
            for (double v0 : v0_list) cell.fwd.push_back(u.value(v0, 0.0));
            if (with_classical) {
                const ClassicalSurface pg = solve_classical(m, g, T, steps, none);
                const ClassicalSurface p0 = solve_classical(m, GridFn(grid), T, steps, none);
                for (double v0 : v0_list)
                    cell.cls.push_back(pg.value(v0, 0.0) - p0.value(v0, 0.0));
            } else {
                cell.cls.assign(v0_list.size(), 0.0);
            }
        }
    });

    SweepResult res;
    res.v0_list = v0_list;
    res.t_list = t_list;
    for (std::size_t k = 0; k < t_list.size(); ++k) {
        double lo = cells[k].fwd.front(), hi = lo;
        for (std::size_t j = 0; j < v0_list.size(); ++j) {
            res.rows.push_back({m.kappa.x1, m.kappa.x2, v0_list[j], t_list[k], cells[k].fwd[j],
                                cells[k].cls[j]});
            lo = std::min(lo, cells[k].fwd[j]);
            hi = std::max(hi, cells[k].fwd[j]);
        }
        res.v0_spread.push_back(hi - lo);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < v0_list.size(); ++j) acc += cells.back().fwd[j];
    res.L_g = acc / static_cast<double>(v0_list.size());
    res.fit = fit_decay(res);
    return res;
}

namespace {

struct LinearFit {
    double L = 0.0, C = 0.0, sse = 0.0;
};

// least squares of y ~ L + C e^{-r T} for fixed r
LinearFit fit_lc(const std::vector<double>& T, const std::vector<double>& y, double r) {
    const std::size_t n = T.size();
    double se = 0.0, see = 0.0, sy = 0.0, sye = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(-r * T[i]);
        se += e;
        see += e * e;
        sy += y[i];
        sye += y[i] * e;
    }
    const double det = static_cast<double>(n) * see - se * se;
    LinearFit f;
    if (std::abs(det) < 1e-300) {
        f.L = sy / static_cast<double>(n);
        f.C = 0.0;
    } else {
        f.L = (see * sy - se * sye) / det;
        f.C = (static_cast<double>(n) * sye - se * sy) / det;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - f.L - f.C * std::exp(-r * T[i]);
        f.sse += d * d;
    }
    return f;
}

double golden_min_rate(const std::vector<double>& T, const std::vector<double>& y, double lo,
                       double hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = fit_lc(T, y, x1).sse, f2 = fit_lc(T, y, x2).sse;
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + b); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = fit_lc(T, y, x1).sse;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = fit_lc(T, y, x2).sse;
        }
    }
    return 0.5 * (a + b);
}

struct WindowFit {
    double rate = 0.0, C = 0.0, L = 0.0, r2 = 0.0;
};

WindowFit fit_window(const std::vector<double>& T, const std::vector<double>& y) {
    // log-spaced scan, then golden refinement between the scan neighbors
    double best_sse = 0.0, best_r = 1e-4;
    bool first = true;
    const int n_scan = 600;
    for (int i = 0; i < n_scan; ++i) {
        const double r = 1e-4 * std::pow(5.0 / 1e-4, static_cast<double>(i) / (n_scan - 1));
        const double sse = fit_lc(T, y, r).sse;
        if (first || sse < best_sse) {
            best_sse = sse;
            best_r = r;
            first = false;
        }
    }
    const double step = std::pow(5.0 / 1e-4, 1.0 / (n_scan - 1));
    const double r = golden_min_rate(T, y, best_r / step, best_r * step);
    const LinearFit lc = fit_lc(T, y, r);

    WindowFit w{r, lc.C, lc.L, 0.0};
    double s_tot = 0.0, s_res = 0.0, mean = 0.0;
    std::size_t used = 0;
    std::vector<double> logs;
    for (std::size_t i = 0; i < T.size(); ++i) {
        const double gap = std::abs(y[i] - lc.L);
        if (gap <= 0.0) continue;
        logs.push_back(std::log(gap));
        mean += logs.back();
        ++used;
    }
    if (used < 2) return w;
    mean /= static_cast<double>(used);
    std::size_t j = 0;
    for (std::size_t i = 0; i < T.size(); ++i) {
        const double gap = std::abs(y[i] - lc.L);
        if (gap <= 0.0) continue;
        const double pred = std::log(std::abs(lc.C)) - r * T[i];
        s_res += (logs[j] - pred) * (logs[j] - pred);
        s_tot += (logs[j] - mean) * (logs[j] - mean);
        ++j;
    }
    w.r2 = s_tot > 0.0 ? 1.0 - s_res / s_tot : 0.0;
    return w;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t_list, const std::vector<double>& rho,
                   double floor, double rel_floor) {
    if (t_list.size() != rho.size() || t_list.size() < 6) return {};
    const std::size_t burn = static_cast<std::size_t>(
        std::ceil(0.2 * static_cast<double>(t_list.size())));
    const double L0 = rho.back();

    std::vector<double> T, y, gap;
    for (std::size_t k = burn; k + 1 < t_list.size(); ++k) {  // drop the final maturity
        const double g = rho[k] - L0;
        if (std::abs(g) > floor) {
            T.push_back(t_list[k]);
            y.push_back(rho[k]);
            gap.push_back(g);
        }
    }
    if (T.size() < 4) return {};

    // same-sign, strictly shrinking prefix: past it the gaps are either
    // oscillating through zero or at the scheme-noise floor
    std::size_t m = 1;
    const double gmax = std::abs(gap[0]);
    while (m < gap.size() && std::signbit(gap[m]) == std::signbit(gap[0]) &&
           std::abs(gap[m]) < std::abs(gap[m - 1]) && std::abs(gap[m]) > rel_floor * gmax)
        ++m;

    DecayFit best;
    for (std::size_t s = 0; s + 6 <= m && s < 7; ++s) {
        const std::vector<double> Tw(T.begin() + s, T.begin() + m);
        const std::vector<double> yw(y.begin() + s, y.begin() + m);
        const WindowFit w = fit_window(Tw, yw);
        if (best.degenerate || w.r2 > best.r_squared + 1e-12) {
            best.degenerate = false;
            best.rate = w.rate;
            best.C = w.C;
            best.L = w.L;
            best.r_squared = w.r2;
            best.n_points = static_cast<int>(Tw.size());
            best.window_start = Tw.front();
        }
    }
    return best;
}

DecayFit fit_decay(const SweepResult& sweep) {
    return fit_decay(sweep.t_list, sweep.forward_mean_by_t());
}

HedgingDecay hedging_decay(const ModelSpec& m, const ErgodicSolution& ergodic,
                           const PayoffSpec& payoff, double v0, double s,
                           const std::vector<double>& t_list, const Grid1D& grid, double dt,
                           const McConfig& cfg) {
    if (t_list.empty()) throw std::invalid_argument("hedging_decay: empty maturity list");
    if (!(s > 0.0) || s >= t_list.front())
        throw std::invalid_argument("hedging_decay: need 0 < s < min maturity");
    if (!(ergodic.y.grid == grid))
        throw std::invalid_argument("hedging_decay: ergodic solution on a different grid");

    HedgingDecay out;
    for (double T : t_list) {
        const int steps = std::max(1, static_cast<int>(std::lround(T / dt)));
        const RiskSurface u = solve_risk_bsde(m, ergodic, payoff, T, steps,
                                              pde::RecordPolicy::until(s));
        const std::vector<double> samples = for_each_path(
            m, v0, s, cfg, {},
            [&](std::int64_t, std::span<const double> times, std::span<const double> path) {
                const double dtp = times[1] - times[0];
                double acc = 0.0;
                for (std::size_t k = 0; k + 1 < times.size(); ++k) {
                    const Vec2 a = hedging_strategy(m, ergodic, u, path[k], times[k]);
                    acc += a.norm2() * dtp;
                }
                return acc;
            });
        const McEstimate est = make_estimate(samples, cfg);
        out.rows.push_back({T, est.mean, est.std_error});
    }

    // squared solver roundoff on an identically-zero strategy sits near 1e-26
    const double floor = 1e-24;
    std::vector<double> Ts, logs;
    for (const HedgingRow& r : out.rows)
        if (r.estimate > floor) {
            Ts.push_back(r.T);
            logs.push_back(std::log(r.estimate));
        }
    if (Ts.size() < 2) {
        out.degenerate = true;
        return out;
    }
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        st += Ts[i];
        sy += logs[i];
        stt += Ts[i] * Ts[i];
        sty += Ts[i] * logs[i];
    }
    const double n = static_cast<double>(Ts.size());
    out.log_slope = (n * sty - st * sy) / (n * stt - st * st);
    return out;
}

}  // namespace fer
