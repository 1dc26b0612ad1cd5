#include "fer/dual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fer {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPinTol = 1e-9;  // tolerance on the forced coordinate q1 = -theta(v)
}  // namespace

double g_star(const ModelSpec& m, double v, Vec2 z, Vec2 q) {
    const double th = theta_at(m, v);
    if (std::abs(q.x1 + th) > kPinTol * (1.0 + std::abs(th))) return kInf;
    switch (m.constraint) {
        case ConstraintSet::first_coordinate_line: {
            const double d = q.x2 - z.x2;
            return d * d / (2.0 * m.gamma);
        }
        case ConstraintSet::full_space:
            return std::abs(q.x2) > kPinTol ? kInf : 0.0;
    }
    return kInf;
}

double g_star_numeric(const ModelSpec& m, double v, Vec2 z, Vec2 q, double zbar_box, int n) {
    double best = -kInf;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 zb{-zbar_box + 2.0 * zbar_box * i / (n - 1),
                          -zbar_box + 2.0 * zbar_box * j / (n - 1)};
            best = std::max(best, zb.x1 * q.x1 + zb.x2 * q.x2 - driver_g(m, v, z, zb));
        }
    return best;
}

double fenchel_moreau_check(const ModelSpec& m, double v, Vec2 z, Vec2 zbar, double q_box,
                            int n_q) {
    const double th = theta_at(m, v);
    double best = -kInf;
    switch (m.constraint) {
        case ConstraintSet::first_coordinate_line:
            for (int j = 0; j < n_q; ++j) {
                const double q2 = z.x2 - q_box + 2.0 * q_box * j / (n_q - 1);
                const Vec2 q{-th, q2};
                best = std::max(best, zbar.x1 * q.x1 + zbar.x2 * q.x2 - g_star(m, v, z, q));
            }
            break;
        case ConstraintSet::full_space: {
            const Vec2 q{-th, 0.0};
            best = zbar.x1 * q.x1 + zbar.x2 * q.x2;
            break;
        }
    }
    return driver_g(m, v, z, zbar) - best;
}

Vec2 optimal_density(const ModelSpec& m, double v, Vec2 z, Vec2 zbar) {
    const double th = theta_at(m, v);
    switch (m.constraint) {
        case ConstraintSet::first_coordinate_line: return {-th, z.x2 + m.gamma * zbar.x2};
        case ConstraintSet::full_space: return {-th, 0.0};
    }
    return {-th, 0.0};
}

std::vector<Perturbation> default_perturbations() {
    std::vector<Perturbation> out;
    out.push_back({"const", 0.2, 1, [](double) { return 1.0; }});
    out.push_back({"sin_v", 0.2, 1, [](double v) { return std::sin(v); }});
    out.push_back({"cos_v", 0.2, 1, [](double v) { return std::cos(v); }});
    out.push_back({"tanh_v", 0.2, 1, [](double v) { return std::tanh(v); }});
    out.push_back({"cauchy_v", 0.2, 1, [](double v) { return 1.0 / (1.0 + v * v); }});
    return out;
}

namespace {

DualRow run_density(const ModelSpec& m, const ErgodicSolution& ergodic,
                    const RiskSurface& surface, const PayoffSpec& payoff, double v0,
                    const McConfig& cfg, const std::string& id, double eps,
                    const std::function<double(double)>& field) {
    const double T = surface.maturity();
    // q(v,t) = (-theta(v), z2(v) + gamma zbar2(v,t) + eps b(v)); drift add kappa.q
    const DriftAdjust adjust = [&](double v, double t) {
        const double q1 = -theta_at(m, v);
        double q2 = interp_clamped(ergodic.z2, v) + m.gamma * surface.zbar(v, t).x2;
        if (eps != 0.0) q2 += eps * field(v);
        return m.kappa.x1 * q1 + m.kappa.x2 * q2;
    };
    const std::vector<double> samples = for_each_path(
        m, v0, T, cfg, adjust,
        [&](std::int64_t, std::span<const double> times, std::span<const double> path) {
            const double dt = times[1] - times[0];
            double penalty = 0.0;
            for (std::size_t k = 0; k + 1 < times.size(); ++k) {
                const double z2 = interp_clamped(ergodic.z2, path[k]);
                double q2 = z2 + m.gamma * surface.zbar(path[k], times[k]).x2;
                if (eps != 0.0) q2 += eps * field(path[k]);
                const double d = q2 - z2;
                penalty += d * d / (2.0 * m.gamma) * dt;
            }
            // xi_T = -g(V_T)
            return -payoff_at(payoff, path.back()) + penalty;
        });
    const McEstimate est = make_estimate(samples, cfg);
    return {id, eps, est.mean, est.std_error};
}

}  // namespace

DualReport dual_gap_mc(const ModelSpec& m, const ErgodicSolution& ergodic,
                       const RiskSurface& surface, const PayoffSpec& payoff, double v0,
                       const McConfig& cfg, const std::vector<Perturbation>& perturbations) {
    if (m.constraint != ConstraintSet::first_coordinate_line)
        throw std::invalid_argument(
            "dual_gap_mc: only the line constraint admits nonzero perturbations; "
            "the full-space penalty is infinite off q = (-theta, 0)");
    for (const Perturbation& p : perturbations)
        if (p.component != 1)
            throw std::invalid_argument("dual_gap_mc: perturbation '" + p.id +
                                        "' leaves the finite-penalty region (q1 is pinned to "
                                        "-theta)");

    DualReport rep;
    rep.rho_pde = surface.value(v0, 0.0);
    rep.optimum = run_density(m, ergodic, surface, payoff, v0, cfg, "qstar", 0.0, {});
    for (const Perturbation& p : perturbations)
        rep.perturbed.push_back(
            run_density(m, ergodic, surface, payoff, v0, cfg, p.id, p.epsilon, p.field));
    return rep;
}

}  // namespace fer
