#include "hessmfg/explicit1d.hpp"

#include <cmath>
#include <stdexcept>

#include "hessmfg/energy.hpp"

namespace hessmfg {

namespace {

double big_s(double t, int p) {  // S(t) = t^2 * sr(t), antiderivative core
    return t * t * signed_root(t, p - 1);
}

void validate_p(int p) {
    if (p < 2) throw std::invalid_argument("explicit family: p must be >= 2");
}

}  // namespace

double signed_root(double t, int k) {
    if (k < 1) throw std::invalid_argument("signed_root: k must be >= 1");
    if (k == 1) return t;
    const double r = std::pow(std::abs(t), 1.0 / k);
    return t < 0.0 ? -r : r;
}

bool params_admissible(const ExplicitParams& params) {
    if (params.p < 2) return false;
    if (params.p % 2 == 0) return true;
    if (params.B > 0.0) return false;
    // T = (p-1)x - B >= 0 on [0,1]; u''^p is monotone in T, so its minimum
    // over [0,1] sits at an endpoint.
    const double end0 = ipow(explicit_uxx(params, 0.0), params.p);
    const double end1 = ipow(explicit_uxx(params, 1.0), params.p);
    return 1.0 + std::min(end0, end1) > 0.0;
}

double explicit_u(const ExplicitParams& params, double x) {
    validate_p(params.p);
    const double T = (params.p - 1) * x - params.B;
    return params.A * big_s(T, params.p) / (params.p * (2.0 * params.p - 1.0)) +
           params.C * x + params.D;
}

double explicit_uxx(const ExplicitParams& params, double x) {
    validate_p(params.p);
    const double T = (params.p - 1) * x - params.B;
    return params.A * signed_root(T, params.p - 1);
}

double explicit_m(const ExplicitParams& params, double x) {
    validate_p(params.p);
    const double z = explicit_uxx(params, x);
    const double base = 1.0 + ipow(z, params.p);
    if (base <= 0.0)
        throw std::invalid_argument("explicit family: density undefined (1 + u''^p <= 0)");
    return std::pow(base, (params.p - 1.0) / params.p);
}

double explicit_energy(const ExplicitParams& params) {
    if (!params_admissible(params))
        throw std::invalid_argument("explicit family: inadmissible parameters");
    const int p = params.p;
    const double hi = big_s((p - 1) - params.B, p);
    const double lo = big_s(-params.B, p);
    return 1.0 + ipow(params.A, p) * (hi - lo) / (2.0 * p - 1.0);
}

ExplicitParams minimizing_solution(int p, double g0, double g1) {
    validate_p(p);
    ExplicitParams params;
    params.A = 0.0;
    params.B = 0.0;
    params.C = g1 - g0;
    params.D = g0;
    params.p = p;
    return params;
}

GridFunction explicit_solution(const ExplicitParams& params, const Grid& grid) {
    if (grid.d != 1)
        throw std::invalid_argument("explicit_solution: grid must be one-dimensional");
    std::vector<double> vals(grid.size());
    for (int i = 0; i < grid.n; ++i)
        vals[static_cast<std::size_t>(i)] = explicit_u(params, grid.coord(i));
    return GridFunction(grid, vals, vals);
}

std::vector<double> explicit_density(const ExplicitParams& params, const Grid& grid) {
    if (grid.d != 1)
        throw std::invalid_argument("explicit_density: grid must be one-dimensional");
    const auto free = grid.free_nodes();
    std::vector<double> m(free.size());
    for (std::size_t k = 0; k < free.size(); ++k)
        m[k] = explicit_m(params, grid.x(free[k]));
    return m;
}

}  // namespace hessmfg
