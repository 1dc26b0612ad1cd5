#include "fer/grid.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "fer/csv.hpp"

namespace fer {

Grid1D::Grid1D(double v_min, double v_max, int n_nodes)
    : v_min_(v_min), v_max_(v_max), n_nodes_(n_nodes) {
    if (!(v_min < 0.0 && v_max > 0.0)) throw std::invalid_argument("grid must straddle v = 0");
    if (n_nodes < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    h_ = (v_max - v_min) / (n_nodes - 1);
    const double k = -v_min / h_;
    i0_ = static_cast<int>(std::lround(k));
    if (std::abs(k - i0_) > 1e-9) throw std::invalid_argument("v = 0 must be a grid node");
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(n_nodes_);
    for (int i = 0; i < n_nodes_; ++i) out[i] = node(i);
    return out;
}

GridFn::GridFn(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.n_nodes())
        throw std::invalid_argument("GridFn: value count does not match grid");
}

GridFn::GridFn(Grid1D g) : grid(g), values(g.n_nodes(), 0.0) {}

GridFn d1(const GridFn& f) {
    const int n = f.size();
    const double h = f.grid.spacing();
    GridFn out(f.grid);
    for (int i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[0] = (f[1] - f[0]) / h;
    out[n - 1] = (f[n - 1] - f[n - 2]) / h;
    return out;
}

GridFn d2(const GridFn& f) {
    const int n = f.size();
    const double h2 = f.grid.spacing() * f.grid.spacing();
    GridFn out(f.grid);
    for (int i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    out[0] = (f[2] - 2.0 * f[1] + f[0]) / h2;
    out[n - 1] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
    return out;
}

static double interp_at(const GridFn& f, double v) {
    const Grid1D& g = f.grid;
    const double x = (v - g.v_min()) / g.spacing();
    const int nearest = static_cast<int>(std::lround(x));
    if (nearest >= 0 && nearest < g.n_nodes() && std::abs(x - nearest) < 1e-9)
        return f[nearest];  // exact at nodes
    int i = static_cast<int>(x);
    if (i >= g.n_nodes() - 1) i = g.n_nodes() - 2;
    if (i < 0) i = 0;
    const double w = x - i;
    return f[i] * (1.0 - w) + f[i + 1] * w;
}

double interp(const GridFn& f, double v) {
    if (!f.grid.contains(v)) throw std::out_of_range("interp: v outside grid");
    return interp_at(f, v);
}

double interp_clamped(const GridFn& f, double v) {
    if (v < f.grid.v_min()) v = f.grid.v_min();
    if (v > f.grid.v_max()) v = f.grid.v_max();
    return interp_at(f, v);
}

void write_grid_fn_csv(std::ostream& os, const GridFn& f) {
    os << "v,value\n";
    for (int i = 0; i < f.size(); ++i)
        os << csv::fmt(f.grid.node(i)) << ',' << csv::fmt(f[i]) << '\n';
}

std::vector<double> solve_tridiag(std::span<const double> sub, std::span<const double> diag,
                                  std::span<const double> sup, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiag: size mismatch");
    std::vector<double> c(n), d(n);
    double piv = diag[0];
    if (std::abs(piv) < 1e-300) throw std::runtime_error("solve_tridiag: zero pivot");
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * c[i - 1];
        if (std::abs(piv) < 1e-300) throw std::runtime_error("solve_tridiag: zero pivot");
        c[i] = sup[i] / piv;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    return d;
}

}  // namespace fer
