#include <doctest.h>

#include <cmath>
#include <vector>

#include "hessmfg/explicit1d.hpp"
#include "hessmfg/grid.hpp"
#include "hessmfg/mfg.hpp"
#include "hessmfg/operators.hpp"
#include "hessmfg/rng.hpp"
#include "support/oracles.hpp"

using namespace hessmfg;

TEST_CASE("signed roots cover both signs and zero") {
    CHECK(signed_root(8.0, 1) == 8.0);
    CHECK(signed_root(-8.0, 3) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(signed_root(0.25, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(signed_root(-0.25, 2) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(signed_root(0.0, 4) == 0.0);
}

TEST_CASE("closed-form values match hand computations") {
    ExplicitParams base{1.0, 0.0, 0.0, 0.0, 2};
    // u = S(x)/6 = x^3/6 for p = 2, A = 1, B = C = D = 0.
    CHECK(explicit_u(base, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(explicit_u(base, 0.5) == doctest::Approx(0.125 / 6.0).epsilon(1e-14));
    CHECK(explicit_uxx(base, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(explicit_m(base, 0.5) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));

    ExplicitParams cubic{1.0, 0.0, 0.0, 0.0, 3};
    // p = 3: u'' = sr(2x, 2); at x = 0.5, u'' = 1 and m = 2^{2/3}.
    CHECK(explicit_uxx(cubic, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(explicit_m(cubic, 0.5) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-14));

    ExplicitParams shifted{1.0, 0.5, 0.0, 0.0, 2};
    CHECK(explicit_energy(shifted) == doctest::Approx(1.0 + 1.0 / 12.0).epsilon(1e-14));
    ExplicitParams affine{0.0, 0.0, 2.5, -1.0, 2};
    CHECK(explicit_energy(affine) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(explicit_u(affine, 0.4) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("the closed-form energy agrees with quadrature of the integrand") {
    for (int p : {2, 3, 4}) {
        ExplicitParams params{0.8, p % 2 == 1 ? -0.3 : 0.4, 0.1, 0.0, p};
        REQUIRE(params_admissible(params));
        auto integrand = [&](double x) {
            const double z = explicit_uxx(params, x);
            double zp = 1.0;
            for (int k = 0; k < p; ++k) zp *= z;
            return 1.0 + zp;  // [F(z)]^p for the power-family operator
        };
        const double quad = oracles::simpson(integrand, 0.0, 1.0, 20000);
        CHECK(explicit_energy(params) == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("admissibility encodes the odd-power sign restriction") {
    CHECK(params_admissible({1.0, 0.5, 0.0, 0.0, 2}));
    CHECK(params_admissible({-2.0, 3.0, 1.0, -1.0, 4}));
    CHECK_FALSE(params_admissible({1.0, 0.5, 0.0, 0.0, 3}));  // odd p needs B <= 0
    CHECK(params_admissible({1.0, -0.2, 0.0, 0.0, 3}));
    CHECK(params_admissible({1.0, 0.0, 0.0, 0.0, 3}));
    // Odd p with a strongly negative branch kills the density.
    CHECK_FALSE(params_admissible({-3.0, 0.0, 0.0, 0.0, 3}));
    CHECK_THROWS_AS(explicit_energy({1.0, 0.5, 0.0, 0.0, 3}), std::invalid_argument);
}

TEST_CASE("stated second derivatives match difference quotients of u") {
    for (int p : {2, 3, 4}) {
        ExplicitParams params{0.7, p % 2 == 1 ? -0.4 : 0.6, -0.2, 0.3, p};
        REQUIRE(params_admissible(params));
        for (double x : {0.15, 0.35, 0.55, 0.85}) {
            const double h = 1e-5;
            const double fd = (explicit_u(params, x + h) - 2.0 * explicit_u(params, x) +
                               explicit_u(params, x - h)) /
                              (h * h);
            CHECK(explicit_uxx(params, x) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("the affine member minimizes the even-power continuum energy") {
    Rng rng(777u);
    for (int p : {2, 4}) {
        ExplicitParams best = minimizing_solution(p, -0.5, 1.25);
        CHECK(best.A == 0.0);
        CHECK(best.p == p);
        CHECK(explicit_u(best, 0.0) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(explicit_u(best, 1.0) == doctest::Approx(1.25).epsilon(1e-14));
        const double e0 = explicit_energy(best);
        CHECK(e0 == doctest::Approx(1.0).epsilon(1e-14));
        int tried = 0;
        while (tried < 100) {
            ExplicitParams cand;
            cand.p = p;
            cand.A = rng.uniform(-2.0, 2.0);
            cand.B = rng.uniform(-1.0, 1.0);
            if (!params_admissible(cand)) continue;
            // Match the boundary values of `best` with the two affine knobs.
            cand.D = -0.5 - explicit_u({cand.A, cand.B, 0.0, 0.0, p}, 0.0);
            cand.C = 1.25 - cand.D - explicit_u({cand.A, cand.B, 0.0, 0.0, p}, 1.0);
            ++tried;
            CHECK(explicit_energy(cand) >= e0 - 1e-12);
        }
    }
}

TEST_CASE("odd powers admit members strictly below the affine energy") {
    // 1 + z^3 is non-convex: a mild downward-curving member stays admissible
    // (density positive) yet spends Lebesgue mass where z^3 < 0.
    ExplicitParams dip{-0.3, 0.0, 0.0, 0.0, 3};
    REQUIRE(params_admissible(dip));
    CHECK(explicit_energy(dip) < 1.0 - 1e-3);
    // The affine member is still first-order stationary: tiny |A| changes the
    // energy only at cubic order.
    ExplicitParams tiny{1e-4, 0.0, 0.0, 0.0, 3};
    CHECK(std::abs(explicit_energy(tiny) - 1.0) <= 1e-11);
}

TEST_CASE("grid sampling carries the continuum family faithfully") {
    Grid g = Grid::line(101);
    ExplicitParams params{1.0, 0.5, 0.0, 0.0, 2};
    GridFunction u = explicit_solution(params, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(u.values[k] == explicit_u(params, g.x(k)));
        CHECK(u.boundary_data[k] == u.values[k]);
    }
    std::vector<double> m = explicit_density(params, g);
    const auto free = g.free_nodes();
    REQUIRE(m.size() == free.size());
    for (std::size_t k = 0; k < free.size(); ++k)
        CHECK(m[k] == explicit_m(params, g.x(free[k])));
}

TEST_CASE("sampled family members verify as weak solutions on a fine grid") {
    Grid g = Grid::line(401);
    struct Case {
        ExplicitParams params;
        double tol_hj;
    };
    // Odd p needs B <= 0; the p = 2 member is stencil-exact (cubic u), so its
    // pointwise residual sits at roundoff while p = 3, 4 carry h^2 terms.
    const Case cases[] = {
        {{1.0, 0.5, 0.0, 0.0, 2}, 1e-10},
        {{1.0, -0.2, 0.0, 0.0, 3}, 1e-3},
        {{1.0, 0.5, 0.0, 0.0, 4}, 1e-3},
    };
    for (const Case& c : cases) {
        MFGPair pair;
        pair.u = explicit_solution(c.params, g);
        pair.m = explicit_density(c.params, g);
        pair.kind = EnergyKind::power;
        pair.p = c.params.p;
        OperatorSpec op = make_power_1d(c.params.p);
        VerificationReport rep = verify_weak_solution(pair, op, c.tol_hj, 1e-3);
        CHECK(rep.cond_nonneg);
        CHECK(rep.cond_hj);
        CHECK(rep.cond_fp);
        CHECK(rep.pass);
        CHECK(rep.fp_residual_max <= 1e-3);
    }
}
