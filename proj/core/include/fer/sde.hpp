#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fer/model.hpp"

namespace fer {

struct McConfig {
    std::int64_t n_paths = 10000;
    int n_steps = 100;
    std::uint64_t seed = 12345;
    bool antithetic = false;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample sd / sqrt(n effective samples)
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Extra drift added to eta(v); must stay finite on the visited domain.
using DriftAdjust = std::function<double(double v, double t)>;

/// Dense path storage for diagnostics and CSV dumps; values are row-major
/// (path, step).
struct PathEnsemble {
    std::vector<double> times;
    std::vector<double> values;
    std::int64_t n_paths = 0;

    double at(std::int64_t path, std::size_t step) const {
        return values[static_cast<std::size_t>(path) * times.size() + step];
    }
};

/// Euler-Maruyama paths of dV = (eta(V) + adjust(V,t)) dt + kappa1 dW1 + kappa2 dW2.
/// Deterministic in (model, v0, horizon, cfg, adjust); parallel execution is
/// schedule-independent. Throws std::runtime_error on a non-finite drift.
PathEnsemble simulate_factor(const ModelSpec& m, double v0, double horizon, const McConfig& cfg,
                             const DriftAdjust& adjust = {});

/// Streaming variant: visit(path_id, times, path) is called once per path and
/// returns a per-path scalar. Results come back indexed by path, so reductions
/// are thread-count independent.
using PathVisitor = std::function<double(std::int64_t, std::span<const double>,
                                         std::span<const double>)>;
std::vector<double> for_each_path(const ModelSpec& m, double v0, double horizon,
                                  const McConfig& cfg, const DriftAdjust& adjust,
                                  const PathVisitor& visit);

/// Mean/stderr of per-path samples; with antithetic pairing the consecutive
/// pair means are treated as the independent samples.
McEstimate make_estimate(std::span<const double> samples, const McConfig& cfg);

/// Terminal-functional Monte Carlo: estimate of f(V_horizon).
McEstimate mc_terminal(const ModelSpec& m, double v0, double horizon, const McConfig& cfg,
                       const DriftAdjust& adjust, const std::function<double(double)>& f);

/// Worst-case coupled-path contraction ratio
///   max over paths, steps t>0 of |V_t^v - V_t^vbar|^2 e^{2 c_eta t} / |v - vbar|^2.
/// Values <= 1 + tol certify the dissipativity estimate on the sampled paths.
double contraction_diagnostic(const ModelSpec& m, double v, double vbar, double horizon,
                              const McConfig& cfg);

/// Estimate of |V_horizon|^p (p >= 1), optionally under a drift adjustment.
McEstimate moment_diagnostic(const ModelSpec& m, double v0, double horizon, const McConfig& cfg,
                             double p, const DriftAdjust& adjust = {});

/// Debug dump, schema: path_id, t, v.
void write_paths_csv(std::ostream& os, const PathEnsemble& paths);

}  // namespace fer
