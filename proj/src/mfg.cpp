#include "hessmfg/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hessmfg/io.hpp"
#include "hessmfg/parallel.hpp"
#include "hessmfg/rng.hpp"

namespace hessmfg {

double TestFunction::phi(double x, double y) const {
    const double dx = x - cx;
    const double dy = d == 2 ? y - cy : 0.0;
    const double t = r * r - dx * dx - dy * dy;
    return t > 0.0 ? t * t * t : 0.0;
}

// The cubic power makes phi twice continuously differentiable across the
// support boundary (the Hessian itself vanishes at t = 0), which keeps the
// node-sum quadrature of the pairing at second order in h.
SymMatrix TestFunction::phi_hessian(double x, double y) const {
    const double dx = x - cx;
    const double dy = d == 2 ? y - cy : 0.0;
    const double t = r * r - dx * dx - dy * dy;
    if (t <= 0.0) return SymMatrix::zero(d);
    if (d == 1) return SymMatrix::scalar(24.0 * t * dx * dx - 6.0 * t * t);
    return SymMatrix::of2(24.0 * t * dx * dx - 6.0 * t * t, 24.0 * t * dy * dy - 6.0 * t * t,
                          24.0 * t * dx * dy);
}

MFGPair assemble_density(const GridFunction& u, const EnergySpec& spec) {
    validate_energy_spec(spec, u.grid);
    const auto free = u.grid.free_nodes();
    MFGPair pair;
    pair.u = u;
    pair.kind = spec.kind;
    pair.p = spec.p;
    pair.m.resize(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        const double F = eval_operator(spec.op, hessian_at(u, free[k]));
        if (spec.kind == EnergyKind::power) {
            if (F < 0.0)
                throw DensityError("assemble_density: F(D^2u) = " + fmt17(F) +
                                       " < 0 at node " + std::to_string(free[k]) +
                                       " (operator without two-sided bounds on an indefinite "
                                       "Hessian); power-kind density undefined",
                                   free[k]);
            pair.m[k] = ipow(F, spec.p - 1);
        } else {
            pair.m[k] = std::exp(F);
        }
    }
    return pair;
}

double hj_residual(const MFGPair& pair, const OperatorSpec& op) {
    const auto free = pair.u.grid.free_nodes();
    if (pair.m.size() != free.size())
        throw std::invalid_argument("hj_residual: density must cover the free nodes");
    double worst = 0.0;
    for (std::size_t k = 0; k < free.size(); ++k) {
        const double F = eval_operator(op, hessian_at(pair.u, free[k]));
        double rhs;
        if (pair.kind == EnergyKind::power) {
            const double m = pair.m[k];
            const double mm = std::max(m, 0.0);  // negative density has no real root
            rhs = pair.p == 2 ? mm : std::pow(mm, 1.0 / (pair.p - 1));
        } else {
            rhs = std::log(pair.m[k]);
        }
        worst = std::max(worst, std::abs(F - rhs));
    }
    return worst;
}

double fp_residual(const MFGPair& pair, const OperatorSpec& op,
                   const std::vector<TestFunction>& tests) {
    const Grid& grid = pair.u.grid;
    const auto free = grid.free_nodes();
    if (pair.m.size() != free.size())
        throw std::invalid_argument("fp_residual: density must cover the free nodes");
    const double inner_lo = grid.lo + (Grid::clamp_width) * grid.h;
    const double inner_hi = grid.hi - (Grid::clamp_width) * grid.h;
    for (const auto& t : tests) {
        if (t.d != grid.d) throw std::invalid_argument("fp_residual: test dimension mismatch");
        const bool inside =
            t.cx - t.r >= inner_lo && t.cx + t.r <= inner_hi &&
            (grid.d == 1 || (t.cy - t.r >= inner_lo && t.cy + t.r <= inner_hi));
        if (!inside)
            throw std::invalid_argument("fp_residual: test support touches the clamped layers");
    }

    const double hd = grid.d == 1 ? grid.h : grid.h * grid.h;
    const double m_l1 =
        ordered_block_sum(free.size(), [&](std::size_t k) { return std::abs(pair.m[k]); }) * hd;

    double worst = 0.0;
    for (const auto& t : tests) {
        const double pairing = ordered_block_sum(free.size(), [&](std::size_t k) {
            const std::size_t f = free[k];
            const SymMatrix phixx = t.phi_hessian(grid.x(f), grid.y(f));
            if (phixx.frobenius_norm() == 0.0 && t.phi(grid.x(f), grid.y(f)) == 0.0) return 0.0;
            const SymMatrix Fij = eval_derivative(op, hessian_at(pair.u, f));
            return pair.m[k] * Fij.dot(phixx);
        }) * hd;
        const double phixx_l1 = ordered_block_sum(free.size(), [&](std::size_t k) {
            const std::size_t f = free[k];
            const SymMatrix phixx = t.phi_hessian(grid.x(f), grid.y(f));
            if (grid.d == 1) return std::abs(phixx.m11());
            return std::abs(phixx.m11()) + std::abs(phixx.m22()) + 2.0 * std::abs(phixx.m12());
        }) * hd;
        worst = std::max(worst, std::abs(pairing) / (phixx_l1 * m_l1 + 1e-30));
    }
    return worst;
}

std::vector<TestFunction> standard_test_family(const Grid& grid, std::uint64_t seed) {
    Rng rng(seed);
    const double span = grid.span();
    const double inner_lo = grid.lo + (Grid::clamp_width + 1) * grid.h;
    const double inner_hi = grid.hi - (Grid::clamp_width + 1) * grid.h;
    const double radii[3] = {0.12 * span, 0.17 * span, 0.22 * span};
    const double centers[3] = {0.3, 0.5, 0.7};
    std::vector<TestFunction> out;
    out.reserve(9);
    for (double rf : radii) {
        for (double cf : centers) {
            TestFunction t;
            t.d = grid.d;
            const double jitter = 0.01 * span * (rng.uniform01() - 0.5);
            double c = grid.lo + cf * span + jitter;
            double r = rf;
            // Shrink, then recenter, so the support keeps one spacing of margin.
            const double max_r = 0.5 * (inner_hi - inner_lo);
            r = std::min(r, max_r);
            c = std::min(std::max(c, inner_lo + r), inner_hi - r);
            t.cx = c;
            t.cy = grid.d == 2 ? c : 0.0;
            t.r = r;
            out.push_back(t);
        }
    }
    return out;
}

VerificationReport verify_weak_solution(const MFGPair& pair, const OperatorSpec& op,
                                        double tol_hj, double tol_fp, std::uint64_t family_seed) {
    VerificationReport rep;
    rep.tol_hj = tol_hj;
    rep.tol_fp = tol_fp;
    double mn = 1e300;
    for (double v : pair.m) mn = std::min(mn, v);
    if (pair.m.empty()) mn = 0.0;
    rep.m_min = mn;
    const Grid& grid = pair.u.grid;
    const double hd = grid.d == 1 ? grid.h : grid.h * grid.h;
    rep.m_l1 =
        ordered_block_sum(pair.m.size(), [&](std::size_t k) { return std::abs(pair.m[k]); }) * hd;
    rep.hj_residual_sup = hj_residual(pair, op);
    rep.fp_residual_max = fp_residual(pair, op, standard_test_family(grid, family_seed));
    rep.cond_nonneg = rep.m_min >= -1e-12 && std::isfinite(rep.m_l1);
    rep.cond_hj = rep.hj_residual_sup <= tol_hj;
    rep.cond_fp = rep.fp_residual_max <= tol_fp;
    rep.pass = rep.cond_nonneg && rep.cond_hj && rep.cond_fp;
    return rep;
}

std::string VerificationReport::to_json() const {
    std::ostringstream os;
    os << "{\n";
    os << "  \"hj_residual_sup\": " << fmt17(hj_residual_sup) << ",\n";
    os << "  \"fp_residual_max\": " << fmt17(fp_residual_max) << ",\n";
    os << "  \"m_min\": " << fmt17(m_min) << ",\n";
    os << "  \"m_l1\": " << fmt17(m_l1) << ",\n";
    os << "  \"tol_hj\": " << fmt17(tol_hj) << ",\n";
    os << "  \"tol_fp\": " << fmt17(tol_fp) << ",\n";
    os << "  \"cond_nonneg\": " << (cond_nonneg ? "true" : "false") << ",\n";
    os << "  \"cond_hj\": " << (cond_hj ? "true" : "false") << ",\n";
    os << "  \"cond_fp\": " << (cond_fp ? "true" : "false") << ",\n";
    os << "  \"pass\": " << (pass ? "true" : "false") << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace hessmfg
