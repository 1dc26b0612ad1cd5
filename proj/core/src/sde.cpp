#include "fer/sde.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fer/csv.hpp"
#include "fer/parallel.hpp"
#include "fer/rng.hpp"

namespace fer {

namespace {

void check_cfg(const McConfig& cfg) {
    if (cfg.n_paths <= 0 || cfg.n_steps <= 0)
        throw std::invalid_argument("McConfig: n_paths and n_steps must be positive");
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw std::invalid_argument("McConfig: antithetic requires an even path count");
}

// Fills path[0..n_steps] for one path id. Antithetic odd paths reuse the even
// partner's draws with flipped sign, keeping each path a pure function of its id.
void generate_path(const ModelSpec& m, double v0, double dt, const McConfig& cfg,
                   const DriftAdjust& adjust, std::int64_t path_id, std::span<double> path) {
    const std::uint64_t stream = cfg.antithetic ? static_cast<std::uint64_t>(path_id / 2)
                                                : static_cast<std::uint64_t>(path_id);
    const double sign = (cfg.antithetic && (path_id & 1)) ? -1.0 : 1.0;
    const double sdt = std::sqrt(dt);
    double v = v0;
    path[0] = v;
    for (int k = 0; k < cfg.n_steps; ++k) {
        double drift = eta_at(m, v);
        if (adjust) {
            const double a = adjust(v, k * dt);
            if (!std::isfinite(a)) throw std::runtime_error("simulate_factor: non-finite drift adjustment");
            drift += a;
        }
        const rng::NormalPair nz =
            rng::draw_normal_pair(cfg.seed, stream, static_cast<std::uint64_t>(k));
        v += drift * dt + sdt * sign * (m.kappa.x1 * nz.z1 + m.kappa.x2 * nz.z2);
        path[k + 1] = v;
    }
}

}  // namespace

PathEnsemble simulate_factor(const ModelSpec& m, double v0, double horizon, const McConfig& cfg,
                             const DriftAdjust& adjust) {
    check_cfg(cfg);
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_factor: horizon must be positive");
    const double dt = horizon / cfg.n_steps;
    PathEnsemble out;
    out.n_paths = cfg.n_paths;
    out.times.resize(cfg.n_steps + 1);
    for (int k = 0; k <= cfg.n_steps; ++k) out.times[k] = k * dt;
    out.values.resize(static_cast<std::size_t>(cfg.n_paths) * out.times.size());
    const std::size_t stride = out.times.size();
    parallel::parallel_for(static_cast<std::size_t>(cfg.n_paths),
                           [&](std::size_t begin, std::size_t end) {
                               for (std::size_t p = begin; p < end; ++p)
                                   generate_path(m, v0, dt, cfg, adjust,
                                                 static_cast<std::int64_t>(p),
                                                 std::span<double>(&out.values[p * stride], stride));
                           });
    return out;
}

std::vector<double> for_each_path(const ModelSpec& m, double v0, double horizon,
                                  const McConfig& cfg, const DriftAdjust& adjust,
                                  const PathVisitor& visit) {
    check_cfg(cfg);
    if (!(horizon > 0.0)) throw std::invalid_argument("for_each_path: horizon must be positive");
    const double dt = horizon / cfg.n_steps;
    std::vector<double> times(cfg.n_steps + 1);
    for (int k = 0; k <= cfg.n_steps; ++k) times[k] = k * dt;
    std::vector<double> results(cfg.n_paths);
    parallel::parallel_for(
        static_cast<std::size_t>(cfg.n_paths), [&](std::size_t begin, std::size_t end) {
            std::vector<double> buf(times.size());
            for (std::size_t p = begin; p < end; ++p) {
                generate_path(m, v0, dt, cfg, adjust, static_cast<std::int64_t>(p), buf);
                results[p] = visit(static_cast<std::int64_t>(p), times, buf);
            }
        });
    return results;
}

McEstimate make_estimate(std::span<const double> samples, const McConfig& cfg) {
    std::vector<double> eff;
    if (cfg.antithetic) {
        eff.reserve(samples.size() / 2);
        for (std::size_t i = 0; i + 1 < samples.size(); i += 2)
            eff.push_back(0.5 * (samples[i] + samples[i + 1]));
    } else {
        eff.assign(samples.begin(), samples.end());
    }
    const std::size_t n = eff.size();
    double mean = 0.0;
    for (double x : eff) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : eff) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    return {mean, sd / std::sqrt(static_cast<double>(n)),
            static_cast<std::int64_t>(samples.size()), cfg.seed};
}

McEstimate mc_terminal(const ModelSpec& m, double v0, double horizon, const McConfig& cfg,
                       const DriftAdjust& adjust, const std::function<double(double)>& f) {
    const std::vector<double> vals = for_each_path(
        m, v0, horizon, cfg, adjust,
        [&](std::int64_t, std::span<const double>, std::span<const double> path) {
            return f(path.back());
        });
    return make_estimate(vals, cfg);
}

double contraction_diagnostic(const ModelSpec& m, double v, double vbar, double horizon,
                              const McConfig& cfg) {
    if (v == vbar) throw std::invalid_argument("contraction_diagnostic: v == vbar");
    check_cfg(cfg);
    const double dt = horizon / cfg.n_steps;
    const double gap2 = (v - vbar) * (v - vbar);
    std::vector<double> worst(cfg.n_paths, 0.0);
    parallel::parallel_for(
        static_cast<std::size_t>(cfg.n_paths), [&](std::size_t begin, std::size_t end) {
            for (std::size_t p = begin; p < end; ++p) {
                double a = v, b = vbar, w = 0.0;
                for (int k = 0; k < cfg.n_steps; ++k) {
                    const rng::NormalPair nz =
                        rng::draw_normal_pair(cfg.seed, p, static_cast<std::uint64_t>(k));
                    const double noise =
                        std::sqrt(dt) * (m.kappa.x1 * nz.z1 + m.kappa.x2 * nz.z2);
                    a += eta_at(m, a) * dt + noise;  // coupled: same noise
                    b += eta_at(m, b) * dt + noise;
                    const double t = (k + 1) * dt;
                    const double ratio = (a - b) * (a - b) * std::exp(2.0 * m.c_eta * t) / gap2;
                    if (ratio > w) w = ratio;
                }
                worst[p] = w;
            }
        });
    double out = 0.0;
    for (double w : worst) out = std::max(out, w);
    return out;
}

McEstimate moment_diagnostic(const ModelSpec& m, double v0, double horizon, const McConfig& cfg,
                             double p, const DriftAdjust& adjust) {
    if (!(p >= 1.0)) throw std::invalid_argument("moment_diagnostic: p must be >= 1");
    return mc_terminal(m, v0, horizon, cfg, adjust,
                       [p](double v) { return std::pow(std::abs(v), p); });
}

void write_paths_csv(std::ostream& os, const PathEnsemble& paths) {
    os << "path_id,t,v\n";
    for (std::int64_t p = 0; p < paths.n_paths; ++p)
        for (std::size_t k = 0; k < paths.times.size(); ++k)
            os << p << ',' << csv::fmt(paths.times[k]) << ',' << csv::fmt(paths.at(p, k)) << '\n';
}

}  // namespace fer
