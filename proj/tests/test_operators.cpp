#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hessmfg/operators.hpp"
#include "hessmfg/rng.hpp"

using namespace hessmfg;

namespace {

// Central-difference directional derivative of F at M along direction D.
double fd_directional(const OperatorSpec& op, const SymMatrix& M, const SymMatrix& D,
                      double step) {
    const SymMatrix up = M + D * step;
    const SymMatrix dn = M - D * step;
    return (op.eval(up) - op.eval(dn)) / (2.0 * step);
}

SymMatrix random_direction(Rng& rng, int d) {
    if (d == 1) return SymMatrix::scalar(rng.uniform(-1.0, 1.0));
    return SymMatrix::of2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                          rng.uniform(-1.0, 1.0));
}

}  // namespace

TEST_CASE("trace operator evaluates the matrix trace with identity derivative") {
    OperatorSpec t2 = make_trace(2);
    CHECK(eval_operator(t2, SymMatrix::of2(1.0, 2.0, 0.5)) == doctest::Approx(3.0));
    SymMatrix d = eval_derivative(t2, SymMatrix::of2(4.0, -7.0, 3.0));
    CHECK(d.m11() == 1.0);
    CHECK(d.m22() == 1.0);
    CHECK(d.m12() == 0.0);

    OperatorSpec t1 = make_trace(1);
    CHECK(eval_operator(t1, SymMatrix::scalar(-2.5)) == doctest::Approx(-2.5));
    CHECK(eval_derivative(t1, SymMatrix::scalar(0.0)).m11() == 1.0);
    CHECK_THROWS_AS(make_trace(3), std::invalid_argument);
}

TEST_CASE("power operator matches closed-form values") {
    OperatorSpec p2 = make_power_1d(2);
    CHECK(eval_operator(p2, SymMatrix::scalar(1.0)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(eval_operator(p2, SymMatrix::scalar(0.0)) == doctest::Approx(1.0));

    OperatorSpec p3 = make_power_1d(3);
    CHECK(eval_operator(p3, SymMatrix::scalar(2.0)) == doctest::Approx(std::cbrt(9.0)));

    OperatorSpec p4 = make_power_1d(4);
    CHECK(eval_operator(p4, SymMatrix::scalar(2.0)) == doctest::Approx(std::pow(17.0, 0.25)));

    CHECK_THROWS_AS(make_power_1d(1), std::invalid_argument);
}

TEST_CASE("odd power operator rejects matrices outside its domain") {
    OperatorSpec p3 = make_power_1d(3);
    CHECK_THROWS_AS(eval_operator(p3, SymMatrix::scalar(-1.5)), OperatorDomainError);
    CHECK_THROWS_AS(eval_derivative(p3, SymMatrix::scalar(-2.0)), OperatorDomainError);
    CHECK_NOTHROW(eval_operator(p3, SymMatrix::scalar(-0.5)));
}

TEST_CASE("oscillating operator evaluates its amplitude-modulated absolute value") {
    OperatorSpec osc = make_osc_1d();
    const double pi = 3.141592653589793;
    CHECK(eval_operator(osc, SymMatrix::scalar(pi)) == doctest::Approx(pi));
    CHECK(eval_operator(osc, SymMatrix::scalar(2.0 * pi)) == doctest::Approx(4.0 * pi));
    CHECK(eval_operator(osc, SymMatrix::scalar(0.0)) == doctest::Approx(0.0));
    // even in z
    CHECK(eval_operator(osc, SymMatrix::scalar(-pi)) ==
          doctest::Approx(eval_operator(osc, SymMatrix::scalar(pi))));
}

TEST_CASE("absolute-value operator and its chosen subgradient at the kink") {
    OperatorSpec a = make_abs_1d();
    CHECK(eval_operator(a, SymMatrix::scalar(-2.0)) == doctest::Approx(2.0));
    CHECK(eval_derivative(a, SymMatrix::scalar(3.0)).m11() == 1.0);
    CHECK(eval_derivative(a, SymMatrix::scalar(-3.0)).m11() == -1.0);
    CHECK(eval_derivative(a, SymMatrix::scalar(0.0)).m11() == 0.0);
}

TEST_CASE("coercive 2d operator combines smoothed trace and scaled norm") {
    OperatorSpec c = make_coercive_trace_2d();
    const SymMatrix I = SymMatrix::identity(2);
    const double expect = std::sqrt(1e-12 + 4.0) + 0.1 * std::sqrt(2.0);
    CHECK(eval_operator(c, I) == doctest::Approx(expect).epsilon(1e-14));
    // Trace-free matrix: only the norm term contributes beyond the smoothing floor.
    const SymMatrix s = SymMatrix::of2(1.0, -1.0, 0.0);
    CHECK(eval_operator(c, s) == doctest::Approx(1e-6 + 0.1 * std::sqrt(2.0)).epsilon(1e-9));
    // At zero the value is the smoothing floor and the norm kink takes the
    // zero subgradient, so the derivative vanishes.
    CHECK(eval_operator(c, SymMatrix::zero(2)) == doctest::Approx(1e-6));
    const SymMatrix d0 = eval_derivative(c, SymMatrix::zero(2));
    CHECK(d0.frobenius_norm() == doctest::Approx(0.0));
}

TEST_CASE("operator evaluation rejects dimension mismatches") {
    OperatorSpec t2 = make_trace(2);
    CHECK_THROWS_AS(eval_operator(t2, SymMatrix::scalar(1.0)), std::invalid_argument);
    OperatorSpec a = make_abs_1d();
    CHECK_THROWS_AS(eval_derivative(a, SymMatrix::of2(1.0, 1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("catalog derivatives match central finite differences") {
    struct Case {
        OperatorSpec op;
        double lo, hi;     // sampling box for entries
        bool keep_away;    // resample while too close to the singular set
    };
    const Case cases[] = {
        {make_trace(1), -3.0, 3.0, false},
        {make_trace(2), -3.0, 3.0, false},
        {make_power_1d(2), -3.0, 3.0, false},
        {make_power_1d(3), -0.5, 5.0, false},
        {make_power_1d(4), -3.0, 3.0, false},
        {make_osc_1d(), -6.0, 6.0, true},
        {make_abs_1d(), -6.0, 6.0, true},
        {make_coercive_trace_2d(), -3.0, 3.0, true},
    };
    Rng rng(987654321u);
    for (const auto& tc : cases) {
        CAPTURE(tc.op.name);
        int tested = 0;
        while (tested < 50) {
            SymMatrix M = tc.op.d == 1
                              ? SymMatrix::scalar(rng.uniform(tc.lo, tc.hi))
                              : SymMatrix::of2(rng.uniform(tc.lo, tc.hi),
                                               rng.uniform(tc.lo, tc.hi),
                                               rng.uniform(tc.lo, tc.hi));
            if (tc.keep_away) {
                // The kinks (z = 0, M = 0) and the smoothed-trace transition
                // layer (|tr| near the smoothing width) poison difference
                // quotients; the derivative there is exercised separately.
                if (tc.op.d == 1 && std::abs(M.m11()) < 0.1) continue;
                if (tc.op.d == 2 && (M.frobenius_norm() < 0.1 || std::abs(M.trace()) < 0.1))
                    continue;
            }
            if (tc.op.in_domain && !tc.op.in_domain(M)) continue;
            ++tested;
            const SymMatrix D = random_direction(rng, tc.op.d);
            const double step = 1e-6 * std::max(1.0, M.frobenius_norm());
            const double fd = fd_directional(tc.op, M, D, step);
            const double an = eval_derivative(tc.op, M).dot(D);
            const double scale = std::max(1.0, std::abs(an));
            CHECK(std::abs(fd - an) / scale < 1e-6);
        }
    }
}

TEST_CASE("derivative dot convention counts off-diagonal directions twice") {
    // Perturbing only the off-diagonal entry changes the full matrix in two
    // symmetric slots, so the directional derivative must be 2 * dF/dm12.
    OperatorSpec c = make_coercive_trace_2d();
    const SymMatrix M = SymMatrix::of2(1.2, 0.7, 0.3);
    const SymMatrix D12 = SymMatrix::of2(0.0, 0.0, 1.0);
    const double fd = fd_directional(c, M, D12, 1e-6);
    const SymMatrix G = eval_derivative(c, M);
    CHECK(std::abs(fd - 2.0 * G.m12()) < 1e-6);
    CHECK(std::abs(fd - G.dot(D12)) < 1e-6);
}

TEST_CASE("increment bound check passes for every catalog operator") {
    const OperatorSpec ops[] = {make_trace(1),    make_trace(2),   make_power_1d(2),
                                make_power_1d(3), make_power_1d(4), make_osc_1d(),
                                make_abs_1d(),    make_coercive_trace_2d()};
    for (const auto& op : ops) {
        CAPTURE(op.name);
        CheckReport rep = check_ellipticity(op);
        CHECK(rep.pass);
        CHECK(rep.samples == 400);
        CHECK(rep.slope_min >= op.ell_lambda_eff() - rep.tol);
        CHECK(rep.slope_max <= norm_slack(op.d) * op.ell_Lambda_eff() + rep.tol);
    }
}

TEST_CASE("increment bound check flags an operator that decreases along growth") {
    // Negated trace: adding a positive-semidefinite increment lowers the
    // value, violating the lower increment bound by about two units.
    OperatorSpec bad = make_trace(1);
    bad.name = "negated_trace_1d";
    bad.eval = [](const SymMatrix& M) { return -M.trace(); };
    bad.deriv = [](const SymMatrix&) { return SymMatrix::scalar(-1.0); };
    CheckReport rep = check_ellipticity(bad);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_violation > 1.0);
    CHECK(rep.slope_max < 0.0);
}

TEST_CASE("oscillating increment slopes need widened constants") {
    // The value bounds (1, 2) cannot bound the difference quotients of the
    // oscillation: the observed slope range pushes well past 2.
    OperatorSpec osc = make_osc_1d();
    CheckReport rep = check_ellipticity(osc);
    CHECK(rep.pass);
    CHECK(rep.slope_max > 2.0);
    CHECK(rep.slope_min < 1.0);

    OperatorSpec tight = osc;
    tight.ell_lambda = 1.0;  // pretend the value constants bound increments
    tight.ell_Lambda = 2.0;
    CheckReport bad = check_ellipticity(tight);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("two-sided value bounds hold for the coercive catalog operators") {
    for (const auto& op : {make_osc_1d(), make_abs_1d(), make_coercive_trace_2d()}) {
        CAPTURE(op.name);
        CHECK(op.is_coercive);
        CheckReport rep = check_coercivity_bounds(op);
        CHECK(rep.pass);
        CHECK(rep.samples == 400);
    }
}

TEST_CASE("value bounds fail for sign-indefinite and unit-offset operators") {
    // Trace takes negative values, so the lower bound cannot hold.
    CheckReport tr = check_coercivity_bounds(make_trace(2));
    CHECK_FALSE(tr.pass);
    CHECK_FALSE(make_trace(2).is_coercive);
    CHECK(tr.worst_violation > 0.5);

    // The power operator evaluates to 1 at zero, so small arguments break the
    // upper bound; the offset is reported, never silently excused.
    CheckReport pw = check_coercivity_bounds(make_power_1d(2));
    CHECK_FALSE(pw.pass);
    CHECK_FALSE(make_power_1d(2).is_coercive);
    CHECK(pw.value_at_zero == doctest::Approx(1.0));
    CHECK(pw.worst_violation > 0.5);
}

TEST_CASE("midpoint convexity check agrees with the catalog flags") {
    for (const auto& op : {make_trace(1), make_trace(2), make_power_1d(2), make_power_1d(4),
                           make_abs_1d(), make_coercive_trace_2d()}) {
        CAPTURE(op.name);
        CHECK(op.is_convex);
        CheckReport rep = check_convexity(op);
        CHECK(rep.pass);
    }
    OperatorSpec osc = make_osc_1d();
    CHECK_FALSE(osc.is_convex);
    CheckReport rep = check_convexity(osc);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_violation > 1e-3);
    // Odd powers lose convexity on the negative side of their domain.
    CHECK_FALSE(make_power_1d(3).is_convex);
}

TEST_CASE("named operator lookup resolves the catalog and rejects unknowns") {
    CHECK(make_operator("trace", 1, 2).name == "trace_1d");
    CHECK(make_operator("trace", 2, 2).name == "trace_2d");
    CHECK(make_operator("power_1d", 1, 3).name == "power_1d_p3");
    CHECK(make_operator("osc_1d", 1, 2).name == "osc_1d");
    CHECK(make_operator("abs_1d", 1, 2).name == "abs_1d");
    CHECK(make_operator("coercive_trace_2d", 2, 2).name == "coercive_trace_2d");
    CHECK(make_operator("coercive_trace_2d", 2, 2).d == 2);
    CHECK_THROWS_AS(make_operator("laplace", 1, 2), std::invalid_argument);
}

TEST_CASE("closed-form catalog operators carry no range-extension counter") {
    CHECK(make_trace(2).range_extensions == nullptr);
    CHECK(make_power_1d(2).range_extensions == nullptr);
    CHECK(make_osc_1d().range_extensions == nullptr);
    CHECK(make_abs_1d().range_extensions == nullptr);
    CHECK(make_coercive_trace_2d().range_extensions == nullptr);
}

TEST_CASE("randomized checks are deterministic for a fixed seed") {
    CheckOptions opts;
    CheckReport a = check_ellipticity(make_osc_1d(), opts);
    CheckReport b = check_ellipticity(make_osc_1d(), opts);
    CHECK(a.worst_violation == b.worst_violation);
    CHECK(a.slope_min == b.slope_min);
    CHECK(a.slope_max == b.slope_max);

    CheckOptions other = opts;
    other.seed = 99;
    CheckReport c = check_ellipticity(make_osc_1d(), other);
    CHECK(c.worst_violation != a.worst_violation);
}

TEST_CASE("checks validate their options") {
    CheckOptions bad;
    bad.n_samples = 0;
    CHECK_THROWS_AS(check_ellipticity(make_abs_1d(), bad), std::invalid_argument);
    bad.n_samples = 10;
    bad.tol = 0.0;
    CHECK_THROWS_AS(check_convexity(make_abs_1d(), bad), std::invalid_argument);
}
