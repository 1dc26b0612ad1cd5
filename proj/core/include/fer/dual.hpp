#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fer/ergodic.hpp"
#include "fer/model.hpp"
#include "fer/risk.hpp"
#include "fer/sde.hpp"

namespace fer {

/// Convex dual G*(v, z, q) = sup_zbar (zbar.q - G(v, z, zbar)); +infinity is a
/// legal value. Closed forms for the shipped constraint sets:
///   line:  |q2 - z2|^2 / (2 gamma) on {q1 = -theta(v)}, +inf elsewhere
///   full:  0 at q = (-theta(v), 0), +inf elsewhere.
double g_star(const ModelSpec& m, double v, Vec2 z, Vec2 q);

/// Brute-force conjugate over a zbar lattice, for cross-checking the closed
/// forms (a lower bound of the true sup; exact up to the lattice resolution).
double g_star_numeric(const ModelSpec& m, double v, Vec2 z, Vec2 q, double zbar_box, int n);

/// Fenchel-Moreau recovery gap G(v,z,zbar) - max_q (zbar.q - G*(v,z,q)) over a
/// q lattice restricted to the finite-penalty region. Nonnegative; bounded by
/// the lattice spacing squared over 2 gamma.
double fenchel_moreau_check(const ModelSpec& m, double v, Vec2 z, Vec2 zbar, double q_box,
                            int n_q);

/// Subgradient maximizer q* of zbar |-> G: q* = (-theta(v), z2 + gamma zbar2)
/// for the line constraint, (-theta(v), 0) for the full space. Satisfies
/// G - zbar.q* + G*(q*) = 0.
Vec2 optimal_density(const ModelSpec& m, double v, Vec2 z, Vec2 zbar);

/// Bounded density perturbation along one coordinate: q = q* + epsilon * field(v) e_k.
/// Only the second coordinate keeps the penalty finite; others are rejected.
struct Perturbation {
    std::string id;
    double epsilon = 0.0;
    int component = 1;  // 0-based
    std::function<double(double)> field;
};

/// The shipped probe set (five bounded fields at epsilon = 0.2).
std::vector<Perturbation> default_perturbations();

struct DualRow {
    std::string id;
    double epsilon = 0.0;
    double objective = 0.0;  // E_q[ xi_T + int G* ds ]
    double std_error = 0.0;
};

struct DualReport {
    DualRow optimum;                 // at q*
    std::vector<DualRow> perturbed;
    double rho_pde = 0.0;            // u(v0, 0) from the surface
    double gap(std::size_t k) const { return perturbed[k].objective - optimum.objective; }
};

/// Monte Carlo verification of the dual representation: simulates the factor
/// under the q-adjusted drift eta + kappa.q (valid because every q field is
/// Markovian), accumulates the penalty integral, and reports the objective at
/// q* and at each perturbation. Minimality holds when every perturbed
/// objective is >= the optimum within Monte Carlo error.
DualReport dual_gap_mc(const ModelSpec& m, const ErgodicSolution& ergodic,
                       const RiskSurface& surface, const PayoffSpec& payoff, double v0,
                       const McConfig& cfg,
                       const std::vector<Perturbation>& perturbations = default_perturbations());

}  // namespace fer
