#include "fer/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fer/ergodic.hpp"

namespace fer {

double theta_at(const ModelSpec& m, double v) {
    switch (m.theta.kind) {
        case ThetaSpec::Kind::constant: return m.theta.theta0;
        case ThetaSpec::Kind::capped_linear: return std::max(m.theta.K2 - std::abs(v), 0.0);
    }
    return 0.0;
}

double eta_at(const ModelSpec& m, double v) { return -m.eta.alpha * v; }

double payoff_at(const PayoffSpec& g, double v) {
    switch (g.kind) {
        case PayoffSpec::Kind::constant: return g.c;
        case PayoffSpec::Kind::linear: return v;
        case PayoffSpec::Kind::put_like: return std::max(g.K1 - std::abs(v), 0.0);
    }
    return 0.0;
}

Vec2 project_pi(const ModelSpec& m, Vec2 w) {
    switch (m.constraint) {
        case ConstraintSet::full_space: return w;
        case ConstraintSet::first_coordinate_line: return {w.x1, 0.0};
    }
    return w;
}

double dist2_pi(const ModelSpec& m, Vec2 w) { return (w - project_pi(m, w)).norm2(); }

double theta_bound(const ModelSpec& m) {
    return m.theta.kind == ThetaSpec::Kind::constant ? std::abs(m.theta.theta0) : m.theta.K2;
}

double theta_lipschitz(const ModelSpec& m) {
    return m.theta.kind == ThetaSpec::Kind::constant ? 0.0 : 1.0;
}

LipschitzEstimate estimate_lipschitz_constants(const ModelSpec& m, const Grid1D& grid,
                                               double z_box) {
    const int n = grid.n_nodes();
    const int stride = std::max(1, n / 48);

    // z lattice covering the box
    std::vector<Vec2> zs;
    const int nz = 9;
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nz; ++j)
            zs.push_back({-z_box + 2.0 * z_box * i / (nz - 1), -z_box + 2.0 * z_box * j / (nz - 1)});

    double c_v = 0.0;
    // adjacent node pairs capture the local ratio; strided pairs the global one
    for (const Vec2& z : zs) {
        const double denom_z = 1.0 + z.norm();
        double prev = driver_f(m, grid.node(0), z);
        for (int i = 1; i < n; ++i) {
            const double cur = driver_f(m, grid.node(i), z);
            c_v = std::max(c_v, std::abs(cur - prev) / (denom_z * grid.spacing()));
            prev = cur;
        }
        for (int i = 0; i < n; i += stride) {
            const double fi = driver_f(m, grid.node(i), z);
            for (int j = i + stride; j < n; j += stride) {
                const double fj = driver_f(m, grid.node(j), z);
                const double dv = grid.node(j) - grid.node(i);
                c_v = std::max(c_v, std::abs(fj - fi) / (denom_z * dv));
            }
        }
        if (!std::isfinite(c_v)) throw std::runtime_error("lipschitz estimate diverged in v");
    }

    double c_z = 0.0;
    const double dz_small = 1e-3;  // local pairs capture the gradient-scale ratio
    for (int i = 0; i < n; i += stride) {
        const double v = grid.node(i);
        std::vector<double> fv(zs.size());
        for (std::size_t a = 0; a < zs.size(); ++a) fv[a] = driver_f(m, v, zs[a]);
        for (std::size_t a = 0; a < zs.size(); ++a)
            for (std::size_t b = a + 1; b < zs.size(); ++b) {
                const double dz = (zs[a] - zs[b]).norm();
                if (dz == 0.0) continue;
                const double denom = (1.0 + zs[a].norm() + zs[b].norm()) * dz;
                c_z = std::max(c_z, std::abs(fv[a] - fv[b]) / denom);
            }
        for (const Vec2& z : zs)
            for (const Vec2 zp : {Vec2{z.x1 + dz_small, z.x2}, Vec2{z.x1, z.x2 + dz_small}}) {
                const double denom = (1.0 + z.norm() + zp.norm()) * dz_small;
                c_z = std::max(c_z, std::abs(driver_f(m, v, zp) - driver_f(m, v, z)) / denom);
            }
    }
    if (!std::isfinite(c_z)) throw std::runtime_error("lipschitz estimate diverged in z");
    return {c_v, c_z};
}

ModelSpec with_lipschitz_constants(ModelSpec m, const Grid1D& grid, double z_box) {
    const LipschitzEstimate est = estimate_lipschitz_constants(m, grid, z_box);
    m.c_v = est.c_v;
    m.c_z = est.c_z;
    return m;
}

std::vector<std::string> validate(const ModelSpec& m) {
    if (!(m.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(m.eta.alpha > 0.0)) throw std::invalid_argument("eta.alpha must be positive");
    if (m.theta.kind == ThetaSpec::Kind::capped_linear && !(m.theta.K2 > 0.0))
        throw std::invalid_argument("theta.K2 must be positive");
    if (!(m.c_eta > 0.0)) throw std::invalid_argument("c_eta must be positive");
    if (m.kappa.norm2() == 0.0) throw std::invalid_argument("kappa must be nonzero");

    std::vector<std::string> warnings;
    if (std::abs(m.kappa_norm2() - 1.0) > 1e-12)
        warnings.push_back("|kappa| != 1: closed-form Monte Carlo routes assume the normalized "
                           "loading; PDE routes are unaffected");
    if (m.c_v && m.c_eta <= *m.c_v)
        warnings.push_back("c_eta <= c_v: gradient/q bound checks are not applicable");
    return warnings;
}

std::optional<double> ergodic_z_bound(const ModelSpec& m) {
    if (!m.c_v || m.c_eta <= *m.c_v) return std::nullopt;
    return *m.c_v / (m.c_eta - *m.c_v);
}

std::optional<double> zhat_bound(const ModelSpec& m, const PayoffSpec& g) {
    if (!m.c_v || m.c_eta <= *m.c_v) return std::nullopt;
    const double cv = *m.c_v, ce = m.c_eta, ga = m.gamma;
    return (ga * ce * g.c_g + cv) / (ga * (ce - cv)) + ce * cv / (ga * (ce - cv) * (ce - cv));
}

}  // namespace fer
