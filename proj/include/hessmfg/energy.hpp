#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessmfg/grid.hpp"
#include "hessmfg/operators.hpp"

namespace hessmfg {

enum class EnergyKind { power, exponential };

// The discrete functional  I[u] = sum over free nodes of G(F(D^2 u)) * h^d
// with G(t) = t^p (power kind, integer p >= 2) or G(t) = e^t (exponential).
struct EnergySpec {
    OperatorSpec op;
    int p = 2;
    EnergyKind kind = EnergyKind::power;
};

struct EnergyDomainError : std::runtime_error {
    std::size_t node;  // flat index of the offending node
    EnergyDomainError(const std::string& what, std::size_t node_)
        : std::runtime_error(what), node(node_) {}
};

// Integer power, exact for negative bases.
double ipow(double base, int e);

void validate_energy_spec(const EnergySpec& spec, const Grid& grid);

// Throws EnergyDomainError naming the first offending node when the Hessian
// leaves the operator's domain.
double energy(const GridFunction& u, const EnergySpec& spec);

// Line-search variant: nullopt instead of throwing on domain violations
// (treated as +infinity by the caller).
std::optional<double> try_energy(const GridFunction& u, const EnergySpec& spec) noexcept;

// Exact gradient of the discrete energy with respect to the free nodal
// values, in free_nodes() order. Computed as a pure gather: per-node weight
// matrices W = G'(F) * F_ij * h^d are laid out on the full grid (zero at
// clamped nodes) and each free node gathers its neighbors' weights through
// the transposed second-difference stencils. Bit-identical results for any
// thread count.
std::vector<double> energy_gradient(const GridFunction& u, const EnergySpec& spec);

}  // namespace hessmfg
