#include "fer/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fer::pde {

namespace {

// Interior tridiagonal system over nodes 1..n-2 with the two boundary
// extrapolation rows (u0 = 2u1 - u2, u_{n-1} = 2u_{n-2} - u_{n-3}) folded into
// the first and last interior rows.
struct InteriorSystem {
    std::vector<double> sub, dia, sup, rhs;

    void fold_boundaries() {
        dia.front() += 2.0 * sub.front();
        sup.front() += -sub.front();
        sub.front() = 0.0;
        dia.back() += 2.0 * sup.back();
        sub.back() += -sup.back();
        sup.back() = 0.0;
    }
};

std::vector<double> solve_full(const InteriorSystem& sys) {
    std::vector<double> wi = solve_tridiag(sys.sub, sys.dia, sys.sup, sys.rhs);
    const std::size_t m = wi.size();
    std::vector<double> w(m + 2);
    std::copy(wi.begin(), wi.end(), w.begin() + 1);
    w[0] = 2.0 * w[1] - w[2];
    w[m + 1] = 2.0 * w[m] - w[m - 1];
    return w;
}

std::vector<double> first_derivative(const Grid1D& g, const std::vector<double>& u) {
    const int n = g.n_nodes();
    const double h = g.spacing();
    std::vector<double> s(n);
    for (int i = 1; i + 1 < n; ++i) s[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    s[0] = (u[1] - u[0]) / h;
    s[n - 1] = (u[n - 1] - u[n - 2]) / h;
    return s;
}

}  // namespace

EllipticResult elliptic_discounted_solve(const Semilinear& op, double rho, const GridFn& y_init,
                                         double c_init, const EllipticOptions& opt) {
    const Grid1D& g = op.grid;
    const int n = g.n_nodes();
    const int i0 = g.zero_node();
    if (i0 < 1 || i0 > n - 2) throw std::invalid_argument("elliptic solve: v = 0 not interior");
    const double h = g.spacing();
    const double D = op.diff / (h * h);

    std::vector<double> y = y_init.values;
    double c = c_init;
    std::vector<double> nval(n), nslope(n), sub(n), dia(n), sup(n), rhs(n);

    auto residual_of = [&](const std::vector<double>& u, double cc) {
        const std::vector<double> s = first_derivative(g, u);
        double worst = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            double val, sl;
            op.driver(i, s[i], val, sl);
            const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
            const double r = rho * (u[i] + cc) - (op.diff * lap + op.drift[i] * s[i] + val);
            worst = std::max(worst, std::abs(r));
        }
        return worst;
    };

    double res = residual_of(y, c);
    double best = res;
    int stall = 0;
    int it = 0;
    for (; it < opt.max_iters; ++it) {
        if (res < opt.tol) break;
        const std::vector<double> s = first_derivative(g, y);
        for (int i = 0; i < n; ++i) {
            op.driver(i, s[i], nval[i], nslope[i]);
            const double E = (op.drift[i] + nslope[i]) / (2.0 * h);
            sub[i] = -(D - E);
            dia[i] = rho + 2.0 * D;
            sup[i] = -(D + E);
            rhs[i] = nval[i] - nslope[i] * s[i];
        }

        InteriorSystem base;
        base.sub.assign(sub.begin() + 1, sub.end() - 1);
        base.dia.assign(dia.begin() + 1, dia.end() - 1);
        base.sup.assign(sup.begin() + 1, sup.end() - 1);
        base.fold_boundaries();
        const int j0 = i0 - 1;
        base.sub[j0] = 0.0;
        base.dia[j0] = 1.0;
        base.sup[j0] = 0.0;

        // response to the driver rhs and to a unit of the scalar c
        InteriorSystem s_rhs = base;
        s_rhs.rhs.assign(rhs.begin() + 1, rhs.end() - 1);
        s_rhs.rhs[j0] = 0.0;
        const std::vector<double> w0 = solve_full(s_rhs);

        InteriorSystem s_one = base;
        s_one.rhs.assign(static_cast<std::size_t>(n - 2), -rho);
        s_one.rhs[j0] = 0.0;
        const std::vector<double> w1 = solve_full(s_one);

        // the pinned node's own equation fixes c:
        //   sub*w[i0-1] + dia*0 + sup*w[i0+1] + rho*c = rhs[i0]
        const double a0 = sub[i0] * w0[i0 - 1] + sup[i0] * w0[i0 + 1];
        const double a1 = sub[i0] * w1[i0 - 1] + sup[i0] * w1[i0 + 1];
        const double denom = rho + a1;
        if (denom == 0.0) throw std::runtime_error("elliptic solve: singular normalization");
        const double c_new = (rhs[i0] - a0) / denom;

        for (int i = 0; i < n; ++i) {
            const double target = w0[i] + c_new * w1[i];
            y[i] += opt.damping * (target - y[i]);
        }
        c += opt.damping * (c_new - c);

        res = residual_of(y, c);
        if (res < 0.5 * best) {
            best = res;
            stall = 0;
        } else {
            ++stall;
        }
        if (it >= opt.min_iters && stall >= opt.stall_window) break;
    }

    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        double val, sl;
        op.driver(i, 0.0, val, sl);
        scale = std::max(scale, std::abs(val));
    }
    if (res > 1e-3 * scale)
        throw std::runtime_error("elliptic solve: no convergence (check domain and discount schedule)");

    GridFn out(g, std::move(y));
    const double shift = out[i0];
    for (double& u : out.values) u -= shift;
    return {std::move(out), rho * (c + shift), res, it};
}

ParabolicResult parabolic_solve(const Semilinear& op, const GridFn& terminal, double T,
                                int n_steps, const ParabolicOptions& opt,
                                const RecordPolicy& record) {
    if (!(T > 0.0) || n_steps < 1) throw std::invalid_argument("parabolic solve: bad horizon");
    if (!(terminal.grid == op.grid)) throw std::invalid_argument("parabolic solve: grid mismatch");
    const Grid1D& g = op.grid;
    const int n = g.n_nodes();
    const double h = g.spacing();
    const double dt = T / n_steps;
    const double D = op.diff / (h * h);

    double scale = 1.0;
    for (double x : terminal.values) scale = std::max(scale, std::abs(x));
    const double tol = opt.tol * scale;

    std::vector<double> u = terminal.values;
    std::vector<double> nval(n), nslope(n);

    std::vector<double> rec_times;
    std::vector<GridFn> rec_levels;
    auto want = [&](int m) {
        switch (record.kind) {
            case RecordPolicy::Kind::none: return false;
            case RecordPolicy::Kind::all: return true;
            case RecordPolicy::Kind::until: return m * dt <= record.keep_until + 1.5 * dt;
        }
        return false;
    };
    if (want(n_steps)) {
        rec_times.push_back(T);
        rec_levels.emplace_back(g, u);
    }

    for (int m = n_steps - 1; m >= 0; --m) {
        const double ths = (n_steps - 1 - m) < opt.rannacher_steps ? 1.0 : 0.5;
        // explicit part at the known level
        std::vector<double> expl(n);
        {
            const std::vector<double> s = first_derivative(g, u);
            for (int i = 1; i + 1 < n; ++i) {
                double val, sl;
                op.driver(i, s[i], val, sl);
                const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
                expl[i] = u[i] + dt * (1.0 - ths) * (op.diff * lap + op.drift[i] * s[i] + val);
            }
        }

        std::vector<double> unew = u;
        double delta = 0.0, best = 1e300;
        int stall = 0;
        bool done = false;
        for (int it = 0; it < opt.max_iters; ++it) {
            const std::vector<double> s = first_derivative(g, unew);
            InteriorSystem sys;
            sys.sub.resize(n - 2);
            sys.dia.resize(n - 2);
            sys.sup.resize(n - 2);
            sys.rhs.resize(n - 2);
            for (int i = 1; i + 1 < n; ++i) {
                op.driver(i, s[i], nval[i], nslope[i]);
                const double E = (op.drift[i] + nslope[i]) / (2.0 * h);
                sys.sub[i - 1] = -ths * dt * (D - E);
                sys.dia[i - 1] = 1.0 + 2.0 * ths * dt * D;
                sys.sup[i - 1] = -ths * dt * (D + E);
                sys.rhs[i - 1] = expl[i] + ths * dt * (nval[i] - nslope[i] * s[i]);
            }
            sys.fold_boundaries();
            const std::vector<double> w = solve_full(sys);
            delta = 0.0;
            for (int i = 0; i < n; ++i) delta = std::max(delta, std::abs(w[i] - unew[i]));
            unew = w;
            if (delta < tol) {
                done = true;
                break;
            }
            if (delta < 0.5 * best) {
                best = delta;
                stall = 0;
            } else if (++stall > 8 && delta < 1e-9 * scale) {
                done = true;  // roundoff floor
                break;
            }
        }
        if (!done)
            throw std::runtime_error(
                "parabolic solve: per-step iteration did not converge; refine the time step");
        u = std::move(unew);
        if (want(m)) {
            rec_times.push_back(m * dt);
            rec_levels.emplace_back(g, u);
        }
    }

    std::reverse(rec_times.begin(), rec_times.end());
    std::reverse(rec_levels.begin(), rec_levels.end());
    return {std::move(rec_times), std::move(rec_levels), GridFn(g, std::move(u))};
}

}  // namespace fer::pde
