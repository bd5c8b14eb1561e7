#pragma once

#include <vector>

#include "hessmfg/grid.hpp"

namespace hessmfg {

// Closed-form 1D family on (0,1):
//   u''(x)   = A * sr(T),  T = (p-1)*x - B,  sr(t) = sign(t)*|t|^{1/(p-1)},
//   u(x)     = A * S(T) / (p*(2p-1)) + C*x + D,  S(t) = t^2 * sr(t),
//   m(x)     = (1 + u''(x)^p)^{(p-1)/p}.
// Then (u''^{p-1})'' = 0 on the admissible range, so (u, m) solves the
// coupled first-order system for the power-type 1D operator, and
//   I[u] = 1 + A^p * (S((p-1)-B) - S(-B)) / (2p-1).
struct ExplicitParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    int p = 2;
};

// sign(t) * |t|^{1/k} for integer k >= 1.
double signed_root(double t, int k);

// Even p: admissible for all parameters. Odd p: needs B <= 0 (so T keeps one
// sign on [0,1], avoiding the kink of u''^{p-1} = A^{p-1}|T|) and
// 1 + min_{[0,1]} u''^p > 0 (density stays positive).
bool params_admissible(const ExplicitParams& params);

double explicit_u(const ExplicitParams& params, double x);
double explicit_uxx(const ExplicitParams& params, double x);
double explicit_m(const ExplicitParams& params, double x);

// Continuum energy over (0,1), closed form. Throws std::invalid_argument on
// inadmissible parameters.
double explicit_energy(const ExplicitParams& params);

// The canonical stationary member for boundary values u(0)=g0, u(1)=g1: the
// affine one, A=0 (zero Hessian, m identically 1, continuum energy 1). For
// even p it is the global minimizer (1 + z^p >= 1 pointwise); for odd p the
// integrand is non-convex and members with A < 0 can undercut energy 1.
ExplicitParams minimizing_solution(int p, double g0, double g1);

// Samples onto a 1D grid; the grid function carries its own values as
// boundary data.
GridFunction explicit_solution(const ExplicitParams& params, const Grid& grid);

// Continuum density at the free nodes, packed in free_nodes() order.
std::vector<double> explicit_density(const ExplicitParams& params, const Grid& grid);

}  // namespace hessmfg
