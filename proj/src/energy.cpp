#include "hessmfg/energy.hpp"

#include <cmath>

#include "hessmfg/parallel.hpp"

namespace hessmfg {

double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

void validate_energy_spec(const EnergySpec& spec, const Grid& grid) {
    if (spec.op.d != grid.d)
        throw std::invalid_argument("energy: operator dimension " + std::to_string(spec.op.d) +
                                    " does not match grid dimension " + std::to_string(grid.d));
    if (spec.kind == EnergyKind::power && spec.p < 2)
        throw std::invalid_argument("energy: power kind needs integer p >= 2");
}

namespace {

bool node_in_domain(const EnergySpec& spec, const SymMatrix& M) {
    return !spec.op.in_domain || spec.op.in_domain(M);
}

double integrand(const EnergySpec& spec, double F) {
    return spec.kind == EnergyKind::power ? ipow(F, spec.p) : std::exp(F);
}

// G'(F): d/dF of the outer function.
double outer_slope(const EnergySpec& spec, double F) {
    return spec.kind == EnergyKind::power ? spec.p * ipow(F, spec.p - 1) : std::exp(F);
}

}  // namespace

double energy(const GridFunction& u, const EnergySpec& spec) {
    validate_energy_spec(spec, u.grid);
    const auto free = u.grid.free_nodes();
    const double hd = u.grid.d == 1 ? u.grid.h : u.grid.h * u.grid.h;
    // Scan for domain violations first so the error names the node
    // deterministically; the reduction below is then exception-free.
    for (std::size_t k = 0; k < free.size(); ++k) {
        if (!node_in_domain(spec, hessian_at(u, free[k])))
            throw EnergyDomainError("energy: Hessian outside the domain of operator '" +
                                        spec.op.name + "' at node " + std::to_string(free[k]),
                                    free[k]);
    }
    const double s = ordered_block_sum(free.size(), [&](std::size_t k) {
        return integrand(spec, spec.op.eval(hessian_at(u, free[k])));
    });
    return s * hd;
}

std::optional<double> try_energy(const GridFunction& u, const EnergySpec& spec) noexcept {
    try {
        return energy(u, spec);
    } catch (...) {
        return std::nullopt;
    }
}

std::vector<double> energy_gradient(const GridFunction& u, const EnergySpec& spec) {
    validate_energy_spec(spec, u.grid);
    const Grid& g = u.grid;
    const auto free = g.free_nodes();
    const std::size_t N = g.size();
    const double hd = g.d == 1 ? g.h : g.h * g.h;
    const double h2 = g.h * g.h;

    // Weight fields on the full grid, zero at clamped nodes.
    std::vector<double> wxx(N, 0.0), wyy, wxy;
    if (g.d == 2) {
        wyy.assign(N, 0.0);
        wxy.assign(N, 0.0);
    }
    // Domain pre-scan (deterministic error node), then exception-free fill.
    for (std::size_t k = 0; k < free.size(); ++k) {
        if (!node_in_domain(spec, hessian_at(u, free[k])))
            throw EnergyDomainError("energy_gradient: Hessian outside the domain of operator '" +
                                        spec.op.name + "' at node " + std::to_string(free[k]),
                                    free[k]);
    }
    parallel_apply(free.size(), [&](std::size_t b0, std::size_t b1) {
        for (std::size_t k = b0; k < b1; ++k) {
            const std::size_t flat = free[k];
            const SymMatrix M = hessian_at(u, flat);
            const double s = outer_slope(spec, spec.op.eval(M)) * hd;
            const SymMatrix D = spec.op.deriv(M);
            wxx[flat] = s * D.m11();
            if (g.d == 2) {
                wyy[flat] = s * D.m22();
                // The off-diagonal entry enters the full sum twice.
                wxy[flat] = s * 2.0 * D.m12();
            }
        }
    });

    std::vector<double> grad(free.size(), 0.0);
    const std::size_t n = static_cast<std::size_t>(g.n);
    parallel_apply(free.size(), [&](std::size_t b0, std::size_t b1) {
        for (std::size_t k = b0; k < b1; ++k) {
            const std::size_t f = free[k];
            double v = (wxx[f - 1] - 2.0 * wxx[f] + wxx[f + 1]) / h2;
            if (g.d == 2) {
                v += (wyy[f - n] - 2.0 * wyy[f] + wyy[f + n]) / h2;
                v += (wxy[f - n - 1] + wxy[f + n + 1] - wxy[f - n + 1] - wxy[f + n - 1]) /
                     (4.0 * h2);
            }
            grad[k] = v;
        }
    });
    return grad;
}

}  // namespace hessmfg
