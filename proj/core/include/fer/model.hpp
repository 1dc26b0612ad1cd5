#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fer/grid.hpp"

namespace fer {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
    double norm2() const { return x1 * x1 + x2 * x2; }
    double norm() const { return std::sqrt(norm2()); }
};

/// Admissible strategy cone: the whole plane or the first coordinate axis.
enum class ConstraintSet { full_space, first_coordinate_line };

/// Market price of risk preset.
struct ThetaSpec {
    enum class Kind { constant, capped_linear };
    Kind kind = Kind::constant;
    double theta0 = 0.0;  // constant: theta(v) = theta0
    double K2 = 0.0;      // capped_linear: theta(v) = max(K2 - |v|, 0)

    static ThetaSpec constant(double theta0) { return {Kind::constant, theta0, 0.0}; }
    static ThetaSpec capped_linear(double K2) { return {Kind::capped_linear, 0.0, K2}; }
};

/// Factor drift preset; only the mean-reverting eta(v) = -alpha v form is shipped.
struct EtaSpec {
    double alpha = 0.1;
    static EtaSpec ou(double alpha) { return {alpha}; }
};

struct PayoffSpec {
    enum class Kind { constant, linear, put_like };
    Kind kind = Kind::put_like;
    double c = 0.0;   // constant: g(v) = c
    double K1 = 0.0;  // put_like: g(v) = max(K1 - |v|, 0)
    double c_g = 1.0; // Lipschitz constant of g

    static PayoffSpec constant(double c) { return {Kind::constant, c, 0.0, 0.0}; }
    static PayoffSpec linear() { return {Kind::linear, 0.0, 0.0, 1.0}; }
    static PayoffSpec put_like(double K1) { return {Kind::put_like, 0.0, K1, 1.0}; }
    bool bounded() const { return kind != Kind::linear; }
};

/// Market and factor coefficients plus the constants entering the bound checks.
/// Immutable by convention once built; safe to share across workers.
struct ModelSpec {
    double gamma = 1.0;
    Vec2 kappa{0.0, 1.0};
    EtaSpec eta = EtaSpec::ou(0.1);
    ThetaSpec theta = ThetaSpec::capped_linear(10.0);
    ConstraintSet constraint = ConstraintSet::first_coordinate_line;
    // dissipativity constant; equals eta.alpha for the shipped drift preset
    double c_eta = 0.1;
    // driver Lipschitz constants, estimated on the truncated domain (see
    // estimate_lipschitz_constants); unset until estimated
    std::optional<double> c_v;
    std::optional<double> c_z;

    double kappa_norm2() const { return kappa.norm2(); }
};

double theta_at(const ModelSpec& m, double v);
double eta_at(const ModelSpec& m, double v);
double payoff_at(const PayoffSpec& g, double v);

/// Projection onto the constraint set and squared distance to it.
Vec2 project_pi(const ModelSpec& m, Vec2 w);
double dist2_pi(const ModelSpec& m, Vec2 w);

/// Uniform bound and Lipschitz constant of the theta preset.
double theta_bound(const ModelSpec& m);
double theta_lipschitz(const ModelSpec& m);

struct LipschitzEstimate {
    double c_v = 0.0;
    double c_z = 0.0;
};

/// Smallest constants such that, over all sampled node pairs and a |z|-box,
///   |F(v1,z)-F(v2,z)|   <= c_v (1+|z|) |v1-v2|
///   |F(v,z1)-F(v,z2)|   <= c_z (1+|z1|+|z2|) |z1-z2|.
/// Deterministic sampling: adjacent node pairs plus strided pairs in v and a
/// lattice of z values with |z_i| <= z_box.
LipschitzEstimate estimate_lipschitz_constants(const ModelSpec& m, const Grid1D& grid,
                                               double z_box = 2.0);

/// Copy of m with c_v/c_z filled in from the estimate.
ModelSpec with_lipschitz_constants(ModelSpec m, const Grid1D& grid, double z_box = 2.0);

/// Hard validation (throws std::invalid_argument) plus soft assumption checks:
/// returns warning strings for |kappa| != 1 and for c_eta <= c_v.
std::vector<std::string> validate(const ModelSpec& m);

/// Prop. state-gradient bound c_v/(c_eta - c_v); empty when c_eta <= c_v or c_v unknown.
std::optional<double> ergodic_z_bound(const ModelSpec& m);

/// Uniform bound q on |zbar + z/gamma| for the risk-measure solution; empty
/// when c_eta <= c_v or c_v unknown.
std::optional<double> zhat_bound(const ModelSpec& m, const PayoffSpec& g);

}  // namespace fer
