#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hessmfg/energy.hpp"
#include "hessmfg/grid.hpp"
#include "hessmfg/solve.hpp"

namespace hessmfg {

// Interior L^q norm (sum |f|^q h^d)^{1/q} over the concentric sub-box of side
// fraction * span. The sub-box must lie inside the free region; node
// membership uses a closed box with 1e-12 slack.
double lp_norm(const Grid& grid, const std::vector<double>& full_values, double q,
               double fraction = 0.5);

// Same, for a field living on the free nodes (free_nodes() order).
double lp_norm_free(const Grid& grid, const std::vector<double>& packed, double q,
                    double fraction = 0.5);

// Same, Frobenius norm per node of a Hessian field.
double lp_norm(const HessianField& hess, double q, double fraction = 0.5);

// max |D_h u(x) - D_h u(y)| / |x-y|^alpha over node pairs in the sub-box,
// with D_h the centered gradient. Pairs: every pair within 5 index steps
// (Chebyshev) plus 1000 seeded random long-range pairs.
double holder_seminorm_gradient(const GridFunction& u, double alpha, double fraction = 0.5,
                                std::uint64_t seed = 777);

// Ratio of a quantity across one refinement step; two values that are both
// numerically zero (<= 1e-10) count as perfectly stable (ratio exactly 1).
double stability_ratio(double fine, double coarse);

// Least-squares slope of log(value) against log(h); 0 when any value is not
// strictly positive.
double fitted_slope(const std::vector<double>& h, const std::vector<double>& values);

// One minimize -> assemble -> measure pipeline per grid size.
struct StudyConfig {
    EnergySpec spec;
    int d = 2;
    std::vector<int> sizes;  // nodes per axis, increasing (roughly doubling)
    std::function<std::vector<double>(const Grid&)> boundary;
    double fraction = 0.5;
    SolveOptions solve_options;
};

struct RefinementStudy {
    std::vector<double> h;  // strictly decreasing
    // Per-level values, keyed "hess_lq_interior", "m_lr_interior", "u_sup",
    // "rhs_proxy"; ratios hold the consecutive stability ratios (one fewer
    // entry); slopes the fitted log-log slope per quantity.
    std::map<std::string, std::vector<double>> quantity;
    std::map<std::string, std::vector<double>> ratio;
    std::map<std::string, double> slope;
    double q_exponent = 0.0;  // Hessian integrability exponent probed
    double r_exponent = 0.0;  // density integrability exponent probed
};

// Runs the pipeline at every size. Hessian exponent q = d(p-1)/(d-1) for
// d = 2 (the baseline p-1 for d = 1, where the improved exponent
// degenerates); density exponent r = d/(d-1) for d = 2, 1 for d = 1. The
// right-hand proxy is C * (sup|u| + ||m||_{L1}^{1/(p-1)}) with C fitted so
// the proxy matches the Hessian norm at the coarsest level. Throws
// std::runtime_error when any stage fails to converge.
RefinementStudy refinement_study(const StudyConfig& config);

}  // namespace hessmfg
