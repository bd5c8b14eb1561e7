#include "hessmfg/operators.hpp"

#include <cmath>

#include "hessmfg/rng.hpp"

namespace hessmfg {

double eval_operator(const OperatorSpec& op, const SymMatrix& M) {
    if (M.d != op.d)
        throw std::invalid_argument("operator '" + op.name + "' is d=" + std::to_string(op.d) +
                                    " but matrix is d=" + std::to_string(M.d));
    if (op.in_domain && !op.in_domain(M))
        throw OperatorDomainError("operator '" + op.name + "' evaluated outside its domain");
    return op.eval(M);
}

SymMatrix eval_derivative(const OperatorSpec& op, const SymMatrix& M) {
    if (M.d != op.d)
        throw std::invalid_argument("operator '" + op.name + "' is d=" + std::to_string(op.d) +
                                    " but matrix is d=" + std::to_string(M.d));
    if (op.in_domain && !op.in_domain(M))
        throw OperatorDomainError("operator '" + op.name + "' derivative outside its domain");
    return op.deriv(M);
}

// ---- catalog ----

OperatorSpec make_trace(int d) {
    if (d != 1 && d != 2) throw std::invalid_argument("trace: d must be 1 or 2");
    OperatorSpec op;
    op.name = d == 1 ? "trace_1d" : "trace_2d";
    op.d = d;
    op.eval = [](const SymMatrix& M) { return M.trace(); };
    op.deriv = [d](const SymMatrix&) { return SymMatrix::identity(d); };
    op.lambda = 1.0;
    op.Lambda = d == 2 ? 1.4142135623730951 : 1.0;
    op.is_convex = true;
    op.is_coercive = false;  // sign-indefinite values
    op.is_smooth = true;
    op.ell_lo = -3.0;
    op.ell_hi = 3.0;
    op.val_lo = -3.0;
    op.val_hi = 3.0;
    return op;
}

namespace {

// sign(s)*|s|^(1/k) for odd k; requires s >= 0 for even k.
double real_root(double s, int k) {
    if (k % 2 == 1) return s < 0.0 ? -std::pow(-s, 1.0 / k) : std::pow(s, 1.0 / k);
    if (s < 0.0) throw OperatorDomainError("even root of a negative value");
    return std::pow(s, 1.0 / k);
}

double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

OperatorSpec make_power_1d(int p) {
    if (p < 2) throw std::invalid_argument("power_1d: p must be >= 2");
    OperatorSpec op;
    op.name = "power_1d_p" + std::to_string(p);
    op.d = 1;
    const bool odd = (p % 2 == 1);
    op.eval = [p](const SymMatrix& M) {
        const double z = M.m11();
        return std::pow(1.0 + ipow(z, p), 1.0 / p);
    };
    op.deriv = [p](const SymMatrix& M) {
        const double z = M.m11();
        const double base = 1.0 + ipow(z, p);
        return SymMatrix::scalar(ipow(z, p - 1) * std::pow(base, (1.0 - p) / p));
    };
    if (odd) {
        op.in_domain = [](const SymMatrix& M) { return M.m11() > -1.0 + 1e-8; };
    }
    // Degenerately elliptic at z = 0 (F'(0) = 0); the nominal floor is tiny
    // and the observed slope range is reported by the check.
    op.lambda = 1e-6;
    op.Lambda = 1.0;
    op.is_convex = !odd;  // F'' = (p-1) z^{p-2} (1+z^p)^{1/p-2} changes sign iff p odd
    op.is_coercive = false;  // F(0) = 1
    op.is_smooth = true;
    op.ell_lo = odd ? -0.5 : 0.0;  // monotone slice: even p decreases on z < 0
    op.ell_hi = 8.0;
    op.val_lo = op.ell_lo;
    op.val_hi = op.ell_hi;
    return op;
}

OperatorSpec make_osc_1d() {
    OperatorSpec op;
    op.name = "osc_1d";
    op.d = 1;
    op.eval = [](const SymMatrix& M) {
        const double z = M.m11();
        return std::abs(z) * (1.5 + 0.5 * std::cos(z));
    };
    op.deriv = [](const SymMatrix& M) {
        const double z = M.m11();
        if (z == 0.0) return SymMatrix::scalar(0.0);  // midpoint subgradient at the kink
        const double s = z > 0.0 ? 1.0 : -1.0;
        return SymMatrix::scalar(s * (1.5 + 0.5 * std::cos(z)) - 0.5 * std::abs(z) * std::sin(z));
    };
    op.lambda = 1.0;  // |z| <= F(z) <= 2|z|
    op.Lambda = 2.0;
    op.is_convex = false;
    op.is_coercive = true;
    op.is_smooth = false;
    op.singular_set = "z = 0 (kink; subgradient 0 chosen)";
    // Increment slopes on [0, 2pi] range over roughly [0.31, 4.03]; the value
    // constants (1,2) cannot bound difference quotients of an oscillation.
    op.ell_lo = 0.0;
    op.ell_hi = 2.0 * 3.141592653589793;
    op.psd_scale = 0.25;
    op.ell_lambda = 0.25;
    op.ell_Lambda = 4.1;
    op.val_lo = -2.0 * 3.141592653589793;
    op.val_hi = 2.0 * 3.141592653589793;
    return op;
}

OperatorSpec make_abs_1d() {
    OperatorSpec op;
    op.name = "abs_1d";
    op.d = 1;
    op.eval = [](const SymMatrix& M) { return std::abs(M.m11()); };
    op.deriv = [](const SymMatrix& M) {
        const double z = M.m11();
        if (z == 0.0) return SymMatrix::scalar(0.0);  // midpoint subgradient
        return SymMatrix::scalar(z > 0.0 ? 1.0 : -1.0);
    };
    op.lambda = 1.0;
    op.Lambda = 1.0;
    op.is_convex = true;
    op.is_coercive = true;
    op.is_smooth = false;
    op.singular_set = "z = 0 (kink; subgradient 0 chosen)";
    op.ell_lo = 0.0;  // monotone slice
    op.ell_hi = 8.0;
    op.val_lo = -8.0;
    op.val_hi = 8.0;
    return op;
}

OperatorSpec make_coercive_trace_2d() {
    constexpr double eps = 1e-6;
    constexpr double delta = 0.1;
    OperatorSpec op;
    op.name = "coercive_trace_2d";
    op.d = 2;
    op.eval = [](const SymMatrix& M) {
        const double tr = M.trace();
        return std::sqrt(eps * eps + tr * tr) + delta * M.frobenius_norm();
    };
    op.deriv = [](const SymMatrix& M) {
        const double tr = M.trace();
        const double c = tr / std::sqrt(eps * eps + tr * tr);
        SymMatrix D = SymMatrix::identity(2) * c;
        const double nrm = M.frobenius_norm();
        if (nrm > 0.0) D = D + M * (delta / nrm);
        return D;  // at M = 0 the norm term gets the midpoint subgradient 0
    };
    op.lambda = delta;
    op.Lambda = 1.0 + delta;
    op.is_convex = true;
    op.is_coercive = true;  // upper bound needs the norm slack: sqrt(2)+d <= sqrt(2)(1+d)
    op.is_smooth = false;
    op.singular_set = "M = 0 (norm kink; subgradient 0 chosen for the norm term)";
    op.ell_lo = 0.0;  // nonnegative entries keep tr(M) >= 0 along PSD increments
    op.ell_hi = 3.0;
    op.val_lo = 0.0;
    op.val_hi = 3.0;
    return op;
}

OperatorSpec make_operator(const std::string& name, int d, int p) {
    if (name == "trace") return make_trace(d);
    if (name == "power_1d") return make_power_1d(p);
    if (name == "osc_1d") return make_osc_1d();
    if (name == "abs_1d") return make_abs_1d();
    if (name == "coercive_trace_2d") return make_coercive_trace_2d();
    throw std::invalid_argument("unknown operator '" + name + "'");
}

// ---- randomized checks ----

namespace {

SymMatrix sample_box(Rng& rng, int d, double lo, double hi) {
    if (d == 1) return SymMatrix::scalar(rng.uniform(lo, hi));
    const double a = rng.uniform(lo, hi);
    const double b = rng.uniform(lo, hi);
    const double c = rng.uniform(lo, hi);
    return SymMatrix::of2(a, b, c);
}

// PSD perturbation scale*A^T A with A entries uniform in [-1,1]; resampled
// until |N| >= 0.05*scale so the difference quotient is well-scaled (a
// near-zero increment measures only roundoff).
SymMatrix sample_psd(Rng& rng, int d, double scale) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        SymMatrix N;
        if (d == 1) {
            const double a = rng.uniform(-1.0, 1.0);
            N = SymMatrix::scalar(scale * a * a);
        } else {
            const double a11 = rng.uniform(-1.0, 1.0), a12 = rng.uniform(-1.0, 1.0);
            const double a21 = rng.uniform(-1.0, 1.0), a22 = rng.uniform(-1.0, 1.0);
            N = SymMatrix::of2(scale * (a11 * a11 + a21 * a21), scale * (a12 * a12 + a22 * a22),
                               scale * (a11 * a12 + a21 * a22));
        }
        if (N.frobenius_norm() >= 0.05 * scale) return N;
    }
    return SymMatrix::identity(d) * (0.1 * scale);
}

bool in_domain(const OperatorSpec& op, const SymMatrix& M) {
    return !op.in_domain || op.in_domain(M);
}

double value_at_zero_of(const OperatorSpec& op) {
    const SymMatrix Z = SymMatrix::zero(op.d);
    return in_domain(op, Z) ? op.eval(Z) : std::nan("");
}

}  // namespace

CheckReport check_ellipticity(const OperatorSpec& op, const CheckOptions& opts) {
    if (opts.n_samples < 1 || opts.tol <= 0.0)
        throw std::invalid_argument("check_ellipticity: need n_samples >= 1 and tol > 0");
    Rng rng(opts.seed);
    CheckReport rep;
    rep.check = "uniform-ellipticity";
    rep.op_name = op.name;
    rep.tol = opts.tol;
    rep.value_at_zero = value_at_zero_of(op);
    const double lo_c = op.ell_lambda_eff();
    const double hi_c = norm_slack(op.d) * op.ell_Lambda_eff();
    double worst = -1e300, smin = 1e300, smax = -1e300;
    int used = 0;
    while (used < opts.n_samples) {
        const SymMatrix M = sample_box(rng, op.d, op.ell_lo, op.ell_hi);
        const SymMatrix N = sample_psd(rng, op.d, op.psd_scale);
        const SymMatrix MN = M + N;
        if (!in_domain(op, M) || !in_domain(op, MN)) continue;
        ++used;
        const double nn = N.frobenius_norm();
        const double slope = (op.eval(MN) - op.eval(M)) / nn;
        smin = std::min(smin, slope);
        smax = std::max(smax, slope);
        worst = std::max(worst, std::max(lo_c - slope, slope - hi_c));
    }
    rep.samples = used;
    rep.worst_violation = worst;
    rep.slope_min = smin;
    rep.slope_max = smax;
    rep.pass = worst <= opts.tol;
    return rep;
}

CheckReport check_coercivity_bounds(const OperatorSpec& op, const CheckOptions& opts) {
    if (opts.n_samples < 1 || opts.tol <= 0.0)
        throw std::invalid_argument("check_coercivity_bounds: need n_samples >= 1 and tol > 0");
    Rng rng(opts.seed);
    CheckReport rep;
    rep.check = "coercivity-bounds";
    rep.op_name = op.name;
    rep.tol = opts.tol;
    rep.value_at_zero = value_at_zero_of(op);
    const double slack = norm_slack(op.d);
    const double box_scale = std::max(std::abs(op.val_lo), std::abs(op.val_hi));
    double worst = -1e300;
    int used = 0;
    while (used < opts.n_samples) {
        const SymMatrix M = sample_box(rng, op.d, op.val_lo, op.val_hi);
        // Near M = 0 the two-sided bound degenerates to F(0) = 0, which is
        // reported separately via value_at_zero.
        if (!in_domain(op, M) || M.frobenius_norm() < 1e-3 * box_scale) continue;
        ++used;
        const double f = op.eval(M);
        const double nm = M.frobenius_norm();
        worst = std::max(worst, std::max(op.lambda * nm - f, f - slack * op.Lambda * nm));
    }
    rep.samples = used;
    rep.worst_violation = worst;
    rep.pass = worst <= opts.tol;
    return rep;
}

CheckReport check_convexity(const OperatorSpec& op, const CheckOptions& opts) {
    if (opts.n_samples < 1 || opts.tol <= 0.0)
        throw std::invalid_argument("check_convexity: need n_samples >= 1 and tol > 0");
    Rng rng(opts.seed);
    CheckReport rep;
    rep.check = "convexity";
    rep.op_name = op.name;
    rep.tol = opts.tol;
    rep.value_at_zero = value_at_zero_of(op);
    double worst = -1e300;
    int used = 0;
    while (used < opts.n_samples) {
        const SymMatrix M = sample_box(rng, op.d, op.ell_lo, op.ell_hi);
        const SymMatrix N = sample_box(rng, op.d, op.ell_lo, op.ell_hi);
        const SymMatrix mid = (M + N) * 0.5;
        if (!in_domain(op, M) || !in_domain(op, N) || !in_domain(op, mid)) continue;
        ++used;
        worst = std::max(worst, op.eval(mid) - 0.5 * (op.eval(M) + op.eval(N)));
    }
    rep.samples = used;
    rep.worst_violation = worst;
    rep.pass = worst <= opts.tol;
    return rep;
}

}  // namespace hessmfg
