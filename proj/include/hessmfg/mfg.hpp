#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessmfg/energy.hpp"
#include "hessmfg/grid.hpp"

namespace hessmfg {

// A candidate weak solution of the coupled system
//   F(D^2 u) = m^{1/(p-1)}   (power coupling; logarithmic: F(D^2 u) = ln m)
//   (F_ij(D^2 u) m)_{x_i x_j} = 0   against compactly supported test bumps.
// m lives on the free nodes, in free_nodes() order.
struct MFGPair {
    GridFunction u;
    std::vector<double> m;
    EnergyKind kind = EnergyKind::power;  // power => m = F^{p-1}; exponential => m = e^F
    int p = 2;
};

struct DensityError : std::runtime_error {
    std::size_t node;
    DensityError(const std::string& what, std::size_t node_)
        : std::runtime_error(what), node(node_) {}
};

// Polynomial bump phi = ((r^2 - |x-c|^2)_+)^3 with analytic second
// derivatives; twice continuously differentiable across the support
// boundary; support strictly inside the free region.
struct TestFunction {
    int d = 1;
    double cx = 0.0, cy = 0.0;
    double r = 0.1;

    double phi(double x, double y = 0.0) const;
    // Entries of D^2 phi (zero outside the support).
    SymMatrix phi_hessian(double x, double y = 0.0) const;
};

struct VerificationReport {
    double hj_residual_sup = 0.0;
    double fp_residual_max = 0.0;
    double m_min = 0.0;
    double m_l1 = 0.0;
    double tol_hj = 0.0;
    double tol_fp = 0.0;
    bool cond_nonneg = false;     // m >= 0 and integral finite
    bool cond_hj = false;         // hj residual within tol_hj
    bool cond_fp = false;         // fp residual within tol_fp over the family
    bool pass = false;

    std::string to_json() const;
};

// m := [F(D^2u)]^{p-1} (power; F < 0 aborts naming the node) or e^{F} (exponential).
MFGPair assemble_density(const GridFunction& u, const EnergySpec& spec);

// Sup over free nodes of |F(D^2u) - m^{1/(p-1)}| (power) or |F(D^2u) - ln m|.
double hj_residual(const MFGPair& pair, const OperatorSpec& op);

// Max over tests of the normalized double-divergence pairing
//   |sum F_ij(D^2u) m phi_xixj h^d| / (||phi_xx||_L1 * ||m||_L1 + 1e-30).
double fp_residual(const MFGPair& pair, const OperatorSpec& op,
                   const std::vector<TestFunction>& tests);

// Standard family: 3 radii x 3 centers with small seeded jitter, supports
// kept one spacing inside the free region.
std::vector<TestFunction> standard_test_family(const Grid& grid, std::uint64_t seed = 2024);

VerificationReport verify_weak_solution(const MFGPair& pair, const OperatorSpec& op,
                                        double tol_hj, double tol_fp,
                                        std::uint64_t family_seed = 2024);

}  // namespace hessmfg
