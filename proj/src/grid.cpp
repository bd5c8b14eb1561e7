#include "hessmfg/grid.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hessmfg/io.hpp"
#include "hessmfg/parallel.hpp"

namespace hessmfg {

Grid Grid::line(int n, double lo, double hi) {
    if (n < 5) throw std::invalid_argument("grid: need n >= 5");
    if (!(hi > lo)) throw std::invalid_argument("grid: need hi > lo");
    Grid g;
    g.d = 1;
    g.n = n;
    g.lo = lo;
    g.hi = hi;
    g.h = (hi - lo) / (n - 1);
    return g;
}

Grid Grid::square(int n, double lo, double hi) {
    Grid g = line(n, lo, hi);
    g.d = 2;
    return g;
}

std::vector<std::size_t> Grid::free_nodes() const {
    std::vector<std::size_t> out;
    out.reserve(num_free());
    if (d == 1) {
        for (int i = clamp_width; i <= n - 1 - clamp_width; ++i) out.push_back(index(i));
    } else {
        for (int j = clamp_width; j <= n - 1 - clamp_width; ++j)
            for (int i = clamp_width; i <= n - 1 - clamp_width; ++i) out.push_back(index(i, j));
    }
    return out;
}

GridFunction::GridFunction(const Grid& g, std::vector<double> vals, std::vector<double> bdata)
    : grid(g), values(std::move(vals)), boundary_data(std::move(bdata)) {
    if (values.size() != grid.size() || boundary_data.size() != grid.size())
        throw std::invalid_argument("grid function: value arrays must cover every node");
    clamp();
}

void GridFunction::clamp() {
    const std::size_t N = grid.size();
    for (std::size_t k = 0; k < N; ++k)
        if (!grid.is_free(k)) values[k] = boundary_data[k];
}

void GridFunction::set_free(const std::vector<std::size_t>& free, const std::vector<double>& packed) {
    if (free.size() != packed.size())
        throw std::invalid_argument("set_free: size mismatch");
    for (std::size_t k = 0; k < free.size(); ++k) values[free[k]] = packed[k];
    clamp();
}

std::vector<double> GridFunction::get_free(const std::vector<std::size_t>& free) const {
    std::vector<double> out(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) out[k] = values[free[k]];
    return out;
}

SymMatrix hessian_at(const GridFunction& u, std::size_t flat) {
    const Grid& g = u.grid;
    const double h2 = g.h * g.h;
    const std::vector<double>& v = u.values;
    if (g.d == 1) {
        const double zxx = (v[flat - 1] - 2.0 * v[flat] + v[flat + 1]) / h2;
        return SymMatrix::scalar(zxx);
    }
    const std::size_t n = static_cast<std::size_t>(g.n);
    const double zxx = (v[flat - 1] - 2.0 * v[flat] + v[flat + 1]) / h2;
    const double zyy = (v[flat - n] - 2.0 * v[flat] + v[flat + n]) / h2;
    const double zxy =
        (v[flat + n + 1] - v[flat + n - 1] - v[flat - n + 1] + v[flat - n - 1]) / (4.0 * h2);
    return SymMatrix::of2(zxx, zyy, zxy);
}

HessianField hessian(const GridFunction& u) {
    HessianField out;
    out.grid = u.grid;
    const auto free = u.grid.free_nodes();
    out.values.resize(free.size());
    parallel_apply(free.size(), [&](std::size_t b0, std::size_t b1) {
        for (std::size_t k = b0; k < b1; ++k) out.values[k] = hessian_at(u, free[k]);
    });
    return out;
}

double integrate(const Grid& grid, const std::function<double(std::size_t)>& f_at_flat) {
    const auto free = grid.free_nodes();
    const double hd = grid.d == 1 ? grid.h : grid.h * grid.h;
    const double s = ordered_block_sum(free.size(), [&](std::size_t k) { return f_at_flat(free[k]); });
    return s * hd;
}

double integrate_free(const Grid& grid, const std::vector<double>& f_packed) {
    if (f_packed.size() != grid.num_free())
        throw std::invalid_argument("integrate_free: field must cover the free nodes");
    const double hd = grid.d == 1 ? grid.h : grid.h * grid.h;
    const double s = ordered_block_sum(f_packed.size(), [&](std::size_t k) { return f_packed[k]; });
    return s * hd;
}

GridFunction clamp_boundary(const GridFunction& u, const std::vector<double>& g) {
    if (g.size() != u.grid.size())
        throw std::invalid_argument("clamp_boundary: data must cover every node");
    GridFunction out = u;
    out.boundary_data = g;
    out.clamp();
    return out;
}

std::vector<double> make_affine_data(const Grid& grid, double a, double b, double c) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = a + b * grid.x(k) + (grid.d == 2 ? c * grid.y(k) : 0.0);
    return out;
}

std::vector<double> make_quadratic_data(const Grid& grid, double c) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double x = grid.x(k);
        out[k] = grid.d == 1 ? c * x * x : c * 0.5 * (x * x + grid.y(k) * grid.y(k));
    }
    return out;
}

std::vector<double> sample_function(const Grid& grid,
                                    const std::function<double(double, double)>& f) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = f(grid.x(k), grid.d == 2 ? grid.y(k) : 0.0);
    return out;
}

void save_solution(const std::string& path, const GridFunction& u) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"d\": " << u.grid.d << ",\n";
    os << "  \"n\": " << u.grid.n << ",\n";
    os << "  \"box\": [" << fmt17(u.grid.lo) << ", " << fmt17(u.grid.hi) << "],\n";
    os << "  \"values\": [";
    for (std::size_t k = 0; k < u.values.size(); ++k)
        os << (k ? ", " : "") << fmt17(u.values[k]);
    os << "],\n";
    os << "  \"g\": [";
    for (std::size_t k = 0; k < u.boundary_data.size(); ++k)
        os << (k ? ", " : "") << fmt17(u.boundary_data[k]);
    os << "]\n}\n";
    write_text_file(path, os.str());
}

GridFunction load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("cannot open solution record '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FileFormatError("solution record '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        const int d = j.at("d").get<int>();
        const int n = j.at("n").get<int>();
        const auto box = j.at("box");
        if (!box.is_array() || box.size() != 2)
            throw FileFormatError("solution record: 'box' must be [lo, hi]");
        const double lo = box[0].get<double>();
        const double hi = box[1].get<double>();
        Grid g = d == 1 ? Grid::line(n, lo, hi) : Grid::square(n, lo, hi);
        std::vector<double> vals = j.at("values").get<std::vector<double>>();
        std::vector<double> bdata = j.at("g").get<std::vector<double>>();
        if (vals.size() != g.size() || bdata.size() != g.size())
            throw FileFormatError("solution record: array lengths do not match the grid");
        return GridFunction(g, std::move(vals), std::move(bdata));
    } catch (const FileFormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FileFormatError("solution record '" + path + "' is malformed: " + e.what());
    }
}

}  // namespace hessmfg
