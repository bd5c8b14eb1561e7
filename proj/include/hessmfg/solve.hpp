#pragma once

#include <string>
#include <vector>

#include "hessmfg/energy.hpp"
#include "hessmfg/grid.hpp"

namespace hessmfg {

struct SolveOptions {
    int max_iters = 50000;
    double grad_tol = 1e-8;        // sup-norm of the energy gradient
    double initial_step = 1.0;
    double armijo_c = 1e-4;
    double shrink = 0.5;           // backtracking factor, in (0,1)
    int memory = 10;               // quasi-Newton pair memory
    int max_backtracks = 60;
    bool record_history = false;   // keep per-iteration (energy, grad, step) rows
};

struct SolveResult {
    GridFunction u;
    double energy = 0.0;
    double grad_sup = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    // Per accepted iterate when record_history is set; energies non-increasing.
    std::vector<double> history_energy;
    std::vector<double> history_grad;
    std::vector<double> history_step;
};

// Discrete Laplace extension of the boundary data onto the free nodes:
// exact index-linear interpolation for d = 1, conjugate-gradient solve of the
// 5-point Laplacian (relative residual 1e-14, stagnation-guarded) for d = 2.
// Solved tight because with affine data the extension must already be the
// energy minimizer to near machine precision.
GridFunction harmonic_extension(const Grid& grid, const std::vector<double>& g_data);

// Limited-memory quasi-Newton descent with Armijo backtracking over the free
// nodes, starting from harmonic_extension(g). Domain violations during line
// search count as +infinity. Non-descent directions and failed line searches
// restart with steepest descent; a second failure stops with converged=false.
SolveResult solve(const EnergySpec& spec, const std::vector<double>& g_data, const Grid& grid,
                  const SolveOptions& opts = {});

// Stationarity certificate: sup-norm of the energy gradient at u.
double verify_first_order(const GridFunction& u, const EnergySpec& spec);

}  // namespace hessmfg
