#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hessmfg/energy.hpp"
#include "hessmfg/grid.hpp"
#include "hessmfg/operators.hpp"

namespace hessmfg {

// Piecewise-linear lower convex hull of a sampled 1D operator graph.
struct EnvelopeTable {
    std::string op_name;
    std::vector<double> z;       // sorted sample abscissae
    std::vector<double> f;       // F(z_k)
    std::vector<double> gamma;   // hull value at z_k
    std::vector<char> contact;   // gamma_k == f_k (within tolerance)
    std::vector<int> hull;       // indices of hull vertices, increasing

    double z_min() const { return z.front(); }
    double z_max() const { return z.back(); }
    bool in_range(double zz) const { return zz >= z_min() && zz <= z_max(); }

    // PL evaluation; outside the range extends linearly with the end slopes
    // (keeps convexity).
    double eval(double zz) const;
    // PL derivative: slope of the active hull segment; the midpoint of the
    // adjacent slopes at an exact vertex abscissa; end slopes outside.
    double slope(double zz) const;
};

// Lower convex hull of {(z_k, F(z_k))} on N uniform samples via a
// monotone-chain sweep. Throws on operator-domain violations.
EnvelopeTable convex_envelope_1d(const OperatorSpec& op, double z_min, double z_max, int N);

// Verifies lambda*|z_k| <= gamma_k + tol at every sample.
CheckReport envelope_coercivity_check(const EnvelopeTable& table, double lambda, double tol);

// Wraps the envelope as an operator usable by energy/minimize. Out-of-range
// evaluations are counted on the spec's range_extensions counter.
EnergySpec relaxed_energy_spec(const OperatorSpec& op, int p, double z_min, double z_max, int N);

// Laminate with piecewise-constant second derivative oscillating between the
// bracketing hull contact points of z -> [F(z)]^p around z_bar, theta-split
// inside each of `cells` equal cells of (0,1), double-integrated, with the
// affine correction matching the reference quadratic q(x) = z_bar x^2 / 2 at
// x = 0, 1. The returned grid resolves the kinks: intervals ~ 6 cells^{5/2}.
struct LaminateResult {
    GridFunction u;           // self-clamped (boundary data = its own values)
    double energy = 0.0;      // discrete energy of u with the ORIGINAL F
    double reference = 0.0;   // hull-of-integrand value at z_bar times free measure
    double gap = 0.0;         // |energy - reference|
    double z1 = 0.0, z2 = 0.0, theta = 0.0;
    int cells = 0;
    int grid_nodes = 0;
};

LaminateResult build_minimizing_sequence(const OperatorSpec& op, int p, double z_bar, int cells,
                                         double hull_z_min = -12.566370614359172,
                                         double hull_z_max = 12.566370614359172,
                                         int hull_samples = 8193);

}  // namespace hessmfg
