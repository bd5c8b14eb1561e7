#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hessmfg/sym_matrix.hpp"

namespace hessmfg {

// Uniform grid on an axis-aligned box, d in {1,2}, with the same interval on
// every axis. The two outermost node layers per side are clamped to boundary
// data; the remaining (n-4)^d nodes are free.
struct Grid {
    int d = 1;
    int n = 5;          // nodes per axis
    double lo = 0.0;    // box = (lo, hi)^d
    double hi = 1.0;
    double h = 0.25;

    static constexpr int clamp_width = 2;

    static Grid line(int n, double lo = 0.0, double hi = 1.0);
    static Grid square(int n, double lo = -1.0, double hi = 1.0);

    std::size_t size() const { return d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }
    std::size_t num_free() const {
        const std::size_t m = static_cast<std::size_t>(n - 2 * clamp_width);
        return d == 1 ? m : m * m;
    }

    // Row-major flat index, x fastest: flat = j*n + i.
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * n + i; }
    int ix(std::size_t flat) const { return static_cast<int>(flat % n); }
    int iy(std::size_t flat) const { return static_cast<int>(flat / n); }

    double coord(int i) const { return lo + i * h; }
    double x(std::size_t flat) const { return coord(ix(flat)); }
    double y(std::size_t flat) const { return coord(iy(flat)); }

    bool axis_free(int i) const { return i >= clamp_width && i <= n - 1 - clamp_width; }
    bool is_free(std::size_t flat) const {
        return d == 1 ? axis_free(ix(flat)) : axis_free(ix(flat)) && axis_free(iy(flat));
    }

    // Flat indices of free nodes in increasing flat order.
    std::vector<std::size_t> free_nodes() const;

    double span() const { return hi - lo; }
};

// Scalar values at every node of a grid, plus the boundary data pinned on the
// clamped layers. clamp() re-imposes the data; mutating code calls it after
// every interior update so the clamp invariant always holds.
struct GridFunction {
    Grid grid;
    std::vector<double> values;         // size grid.size()
    std::vector<double> boundary_data;  // size grid.size(); read at clamped nodes only

    GridFunction() = default;
    GridFunction(const Grid& g, std::vector<double> vals, std::vector<double> bdata);

    void clamp();  // copy boundary_data onto the clamped node layers

    // Overwrite free-node values from a packed vector ordered like free_nodes().
    void set_free(const std::vector<std::size_t>& free, const std::vector<double>& packed);
    std::vector<double> get_free(const std::vector<std::size_t>& free) const;
};

// Centered second-difference Hessian at a free node.
SymMatrix hessian_at(const GridFunction& u, std::size_t flat);

struct HessianField {
    Grid grid;
    std::vector<SymMatrix> values;  // one per free node, in free_nodes() order
};

HessianField hessian(const GridFunction& u);

// Midpoint-type quadrature: sum of f over free nodes times h^d.
double integrate(const Grid& grid, const std::function<double(std::size_t)>& f_at_flat);
double integrate_free(const Grid& grid, const std::vector<double>& f_packed);

// Replace the clamped layers of u with g (full-length vector), interior untouched.
GridFunction clamp_boundary(const GridFunction& u, const std::vector<double>& g);

// Boundary-data catalog (full-length value vectors).
std::vector<double> make_affine_data(const Grid& grid, double a, double b, double c = 0.0);
std::vector<double> make_quadratic_data(const Grid& grid, double c);
std::vector<double> sample_function(const Grid& grid, const std::function<double(double, double)>& f);

// Persistence: {d, n, box, values[], g[]} as JSON with 17-significant-digit
// decimals; values round-trip bit-exactly.
void save_solution(const std::string& path, const GridFunction& u);
GridFunction load_solution(const std::string& path);

}  // namespace hessmfg
