#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "hessmfg/sym_matrix.hpp"

namespace hessmfg {

struct OperatorDomainError : std::runtime_error {
    explicit OperatorDomainError(const std::string& what) : std::runtime_error(what) {}
};

// A Hessian-dependent operator F: S(d) -> R together with its derivative
// matrix (dF/dm_ij), catalog constants, flags, and the sampling boxes its
// randomized checkers run over.
struct OperatorSpec {
    std::string name;
    int d = 1;

    std::function<double(const SymMatrix&)> eval;
    std::function<SymMatrix(const SymMatrix&)> deriv;
    std::function<bool(const SymMatrix&)> in_domain;  // null = all of S(d)

    // Two-sided value-bound constants (lambda*|M| <= F(M) <= Lambda*|M| when
    // is_coercive), also the default increment-check constants.
    double lambda = 1.0;
    double Lambda = 1.0;

    bool is_convex = false;
    bool is_coercive = false;  // satisfies the two-sided value bounds with F(0)=0
    bool is_smooth = true;
    std::string singular_set;  // where deriv is a chosen subgradient

    // Increment (uniform-ellipticity) check: entrywise sampling box for M,
    // scale of the PSD perturbation, and optional override constants for the
    // difference-quotient bounds (0 = inherit lambda/Lambda). Overrides exist
    // because value-bound constants and increment-slope ranges differ for
    // oscillating or degenerate operators.
    double ell_lo = -3.0, ell_hi = 3.0;
    double psd_scale = 1.0;
    double ell_lambda = 0.0, ell_Lambda = 0.0;

    // Value-bound check: entrywise sampling box for M.
    double val_lo = -3.0, val_hi = 3.0;

    // Incremented by table-backed operators when evaluated outside their
    // tabulated range (linear extension); null for closed-form operators.
    std::shared_ptr<std::atomic<long>> range_extensions;

    double ell_lambda_eff() const { return ell_lambda > 0.0 ? ell_lambda : lambda; }
    double ell_Lambda_eff() const { return ell_Lambda > 0.0 ? ell_Lambda : Lambda; }
};

// Norm-equivalence slack applied to the upper bound of the randomized checks.
inline double norm_slack(int d) { return d == 2 ? 1.4142135623730951 : 1.0; }

double eval_operator(const OperatorSpec& op, const SymMatrix& M);
SymMatrix eval_derivative(const OperatorSpec& op, const SymMatrix& M);

// ---- catalog ----
OperatorSpec make_trace(int d);
OperatorSpec make_power_1d(int p);
OperatorSpec make_osc_1d();
OperatorSpec make_abs_1d();
OperatorSpec make_coercive_trace_2d();

// Named lookup used by config files: "trace" (uses d), "power_1d" (uses p),
// "osc_1d", "abs_1d", "coercive_trace_2d". Throws std::invalid_argument.
OperatorSpec make_operator(const std::string& name, int d, int p);

// ---- randomized property checks ----
struct CheckOptions {
    int n_samples = 400;
    double tol = 1e-9;
    std::uint64_t seed = 12345;
};

struct CheckReport {
    std::string check;    // "uniform-ellipticity" | "coercivity-bounds" | "convexity"
    std::string op_name;
    int samples = 0;
    double worst_violation = 0.0;
    double tol = 0.0;
    bool pass = false;  // pass <=> worst_violation <= tol
    // Observed difference-quotient range (uniform-ellipticity check only).
    double slope_min = 0.0;
    double slope_max = 0.0;
    double value_at_zero = 0.0;  // F(0), reported, never a pass criterion
};

// Increment bounds along PSD perturbations: for sampled M in the operator's
// box and PSD N = psd_scale * A^T A (|N| floored away from zero so the
// difference quotient is numerically meaningful),
//   ell_lambda*|N| <= F(M+N) - F(M) <= slack(d)*ell_Lambda*|N|.
// Violations are reported per unit |N|.
CheckReport check_ellipticity(const OperatorSpec& op, const CheckOptions& opts = {});

// Two-sided value bounds on sampled symmetric M (not only PSD):
//   lambda*|M| <= F(M) <= slack(d)*Lambda*|M|   (absolute violation).
CheckReport check_coercivity_bounds(const OperatorSpec& op, const CheckOptions& opts = {});

// Midpoint convexity: F((M+N)/2) <= (F(M)+F(N))/2 on sampled pairs drawn
// from the operator's box (absolute violation).
CheckReport check_convexity(const OperatorSpec& op, const CheckOptions& opts = {});

}  // namespace hessmfg
