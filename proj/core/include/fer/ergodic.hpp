#pragma once

#include <vector>

#include "fer/grid.hpp"
#include "fer/model.hpp"
#include "fer/pde.hpp"

namespace fer {

/// Markovian solution of the infinite-horizon equation behind the exponential
/// forward criterion: scalar lambda plus grid functions y (normalized y(0)=0)
/// and z = kappa y'.
struct ErgodicSolution {
    double lambda = 0.0;
    GridFn y;
    GridFn dy;            // y'
    GridFn z1, z2;        // kappa1 y', kappa2 y'
    std::vector<double> rho_used;
    double residual = 0.0;  // sup interior |diff y'' + eta y' + F(v, z) - lambda|

    Vec2 z_at(double v) const { return {interp_clamped(z1, v), interp_clamped(z2, v)}; }
};

/// Driver F(v,z) = (gamma^2/2) dist^2{Pi, (z + theta e1)/gamma}
///               - |z + theta e1|^2 / 2 + |z|^2 / 2.
double driver_f(const ModelSpec& m, double v, Vec2 z);
/// Gradient of F in z (dist^2 is differentiable for convex Pi).
Vec2 driver_f_grad(const ModelSpec& m, double v, Vec2 z);

struct ErgodicOptions {
    // decreasing discount schedule; lambda is Richardson-extrapolated from the
    // two finest entries and y is taken at the finest
    std::vector<double> rho_schedule{1e-2, 1e-3, 1e-4, 1e-5};
    pde::EllipticOptions inner{};
    int ref_node = -1;  // normalization node; -1 means the v = 0 node
};

/// Vanishing-discount construction: for each rho solves
///   rho y_rho = diff y'' + eta y' + F(v, kappa y'),
/// reads lambda_rho at the reference node, warm-starts the next leg, and
/// extrapolates lambda in rho.
ErgodicSolution solve_ergodic(const ModelSpec& m, const Grid1D& grid,
                              const ErgodicOptions& opt = {});

/// U(x, t) = -exp(-gamma x + y(v) - lambda t).
double forward_performance(const ErgodicSolution& sol, const ModelSpec& m, double x, double t,
                           double v);

/// Optimal investment pi* = Proj_Pi((theta(v) e1 + z(v)) / gamma).
Vec2 optimal_strategy(const ErgodicSolution& sol, const ModelSpec& m, double v);

/// The semilinear operator shared with the finite-horizon solvers,
/// specialized with driver N(v, s) = F(v, kappa s).
pde::Semilinear ergodic_operator(const ModelSpec& m, const Grid1D& grid);

}  // namespace fer
