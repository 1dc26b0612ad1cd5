#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace fer {

/// Uniform 1-d grid on [v_min, v_max]. v = 0 must be a node; every PDE in the
/// library normalizes or reads values there.
class Grid1D {
public:
    Grid1D(double v_min, double v_max, int n_nodes);

    double v_min() const { return v_min_; }
    double v_max() const { return v_max_; }
    int n_nodes() const { return n_nodes_; }
    double spacing() const { return h_; }
    double node(int i) const { return v_min_ + h_ * i; }
    int zero_node() const { return i0_; }

    bool contains(double v) const { return v >= v_min_ && v <= v_max_; }
    std::vector<double> nodes() const;

    friend bool operator==(const Grid1D& a, const Grid1D& b) {
        return a.v_min_ == b.v_min_ && a.v_max_ == b.v_max_ && a.n_nodes_ == b.n_nodes_;
    }

private:
    double v_min_, v_max_, h_;
    int n_nodes_, i0_;
};

/// Nodal values of a scalar function on a Grid1D.
struct GridFn {
    Grid1D grid;
    std::vector<double> values;

    GridFn(Grid1D g, std::vector<double> v);
    explicit GridFn(Grid1D g);  // zero-initialized

    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
};

/// Sample fn at every node.
template <class F>
GridFn sample(const Grid1D& grid, F&& fn) {
    GridFn out(grid);
    for (int i = 0; i < grid.n_nodes(); ++i) out.values[i] = fn(grid.node(i));
    return out;
}

// Second-order centered first derivative, one-sided at the two boundary nodes.
GridFn d1(const GridFn& f);
// Second derivative; boundary nodes copy the adjacent 3-point stencil.
GridFn d2(const GridFn& f);

// Linear interpolation, exact at nodes. Throws std::out_of_range outside the grid.
double interp(const GridFn& f, double v);
// As interp, but clamps v into the grid (fields are affine beyond the
// truncation domain, so constant extension of derivatives is consistent).
double interp_clamped(const GridFn& f, double v);

/// Debug dump, schema: v, value.
void write_grid_fn_csv(std::ostream& os, const GridFn& f);

/// Thomas solve of the tridiagonal system
///   sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1] = rhs[i]
/// (sub[0] and sup[n-1] ignored). Throws std::runtime_error on a vanishing pivot.
std::vector<double> solve_tridiag(std::span<const double> sub, std::span<const double> diag,
                                  std::span<const double> sup, std::span<const double> rhs);

}  // namespace fer
