#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "fer/model.hpp"

namespace fer {

/// Malformed or unknown config input; line is 1-based.
struct ConfigError : std::runtime_error {
    ConfigError(int line_no, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
    int line;
};

/// Everything a run needs besides solver knobs: the model, the position, and
/// the truncation domain.
struct RunConfig {
    ModelSpec model;
    PayoffSpec payoff;
    double v_min = -30.0;
    double v_max = 30.0;

    Grid1D make_grid(int n_nodes) const { return Grid1D(v_min, v_max, n_nodes); }
};

/// The third figure scenario: gamma = 1, alpha = 0.1, capped market price of
/// risk and put-like position at level 10, kappa = (0, 1), line constraint.
RunConfig default_config();

/// Plain `key = value` lines; '#' comments and blank lines are skipped.
/// Keys: gamma, kappa1, kappa2, eta.alpha, theta.kind, theta.theta0, theta.K2,
/// payoff.kind, payoff.c, payoff.K1, constraint, v_min, v_max.
/// Unknown keys and malformed lines raise ConfigError with the line number.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Round-trip serialization of the resolved configuration.
std::string serialize_config(const RunConfig& cfg);

}  // namespace fer
