#pragma once

#include <functional>
#include <vector>

#include "fer/grid.hpp"

namespace fer::pde {

/// Driver evaluation at one node: value = N(v_i, s) and slope = dN/ds, with
/// s the discrete first derivative of the unknown at that node. The slope is
/// what the frozen-gradient linearization folds into the implicit drift.
using DriverEval = std::function<void(int node, double s, double& value, double& slope)>;

/// Semilinear operator diff * u_vv + drift(v) * u_v + N(v, u_v) on a grid,
/// with linear-extrapolation (zero second derivative) boundary rows.
struct Semilinear {
    Grid1D grid;
    double diff;                 // one-half |kappa|^2
    std::vector<double> drift;   // eta at nodes
    DriverEval driver;
};

struct EllipticOptions {
    double damping = 0.5;
    double tol = 1e-10;      // sup-norm of the discounted-equation residual
    int max_iters = 300;
    int min_iters = 25;
    int stall_window = 20;   // accept once the residual stops improving
};

struct EllipticResult {
    GridFn y;            // normalized: y(0) = 0
    double lambda_rho;   // rho * y_rho(0)
    double residual;     // final discounted-equation residual (interior sup)
    int iters;
};

/// Damped frozen-gradient solve of the discounted equation
///   rho (y + c) = diff y'' + drift y' + N(v, y'),   y(0) = 0, lambda_rho = rho c.
/// The normalization is pinned inside the linear solve so iterates stay O(1)
/// even as rho -> 0. Throws on genuine non-convergence.
EllipticResult elliptic_discounted_solve(const Semilinear& op, double rho, const GridFn& y_init,
                                         double c_init, const EllipticOptions& opt = {});

struct ParabolicOptions {
    double tol = 1e-12;    // per-step successive sup-norm, scaled by data size
    int max_iters = 80;
    int rannacher_steps = 2;
};

struct RecordPolicy {
    enum class Kind { none, all, until };
    Kind kind = Kind::all;
    double keep_until = 0.0;

    static RecordPolicy none() { return {Kind::none, 0.0}; }
    static RecordPolicy all() { return {Kind::all, 0.0}; }
    static RecordPolicy until(double t) { return {Kind::until, t}; }
};

struct ParabolicResult {
    std::vector<double> times;    // recorded levels, ascending
    std::vector<GridFn> levels;   // u(., times[k])
    GridFn final_level;           // u(., 0)
};

/// Backward theta-scheme (Crank-Nicolson with implicit-Euler start steps) for
///   du/dt + diff u_vv + drift u_v + N(v, u_v) = 0,  u(., T) = terminal.
/// Per-step nonlinearity by frozen-gradient iteration on the implicit system.
ParabolicResult parabolic_solve(const Semilinear& op, const GridFn& terminal, double T,
                                int n_steps, const ParabolicOptions& opt = {},
                                const RecordPolicy& record = RecordPolicy::all());

}  // namespace fer::pde
