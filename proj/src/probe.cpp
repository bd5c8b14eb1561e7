#include "hessmfg/probe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hessmfg/mfg.hpp"
#include "hessmfg/rng.hpp"

namespace hessmfg {

namespace {

constexpr double kInclusionSlack = 1e-12;

struct SubBox {
    double lo = 0.0;
    double hi = 0.0;  // same interval on every axis (concentric)

    bool contains(double x) const { return x >= lo - kInclusionSlack && x <= hi + kInclusionSlack; }
};

SubBox concentric_subbox(const Grid& grid, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("subregion fraction must lie in (0, 1]");
    const double c = 0.5 * (grid.lo + grid.hi);
    const double half = 0.5 * fraction * grid.span();
    return SubBox{c - half, c + half};
}

void require_inside(const SubBox& sb, const Grid& grid, int margin_layers, const char* who) {
    const double margin = margin_layers * grid.h;
    if (sb.lo < grid.lo + margin - kInclusionSlack || sb.hi > grid.hi - margin + kInclusionSlack)
        throw std::invalid_argument(std::string(who) +
                                    ": subregion is not inside the free region of the grid");
}

bool node_in(const Grid& grid, std::size_t flat, const SubBox& sb) {
    if (!sb.contains(grid.x(flat))) return false;
    return grid.d == 1 || sb.contains(grid.y(flat));
}

double finish_norm(double sum, double q, long count, const char* who) {
    if (count == 0) throw std::invalid_argument(std::string(who) + ": empty subregion");
    return std::pow(sum, 1.0 / q);
}

}  // namespace

double lp_norm(const Grid& grid, const std::vector<double>& full_values, double q,
               double fraction) {
    if (q < 1.0) throw std::invalid_argument("lp_norm: q must be >= 1");
    if (full_values.size() != grid.size())
        throw std::invalid_argument("lp_norm: value vector does not match the grid");
    const SubBox sb = concentric_subbox(grid, fraction);
    require_inside(sb, grid, Grid::clamp_width, "lp_norm");
    const double cell = std::pow(grid.h, grid.d);
    double sum = 0.0;
    long count = 0;
    for (std::size_t flat = 0; flat < full_values.size(); ++flat) {
        if (!node_in(grid, flat, sb)) continue;
        sum += std::pow(std::abs(full_values[flat]), q) * cell;
        ++count;
    }
    return finish_norm(sum, q, count, "lp_norm");
}

double lp_norm_free(const Grid& grid, const std::vector<double>& packed, double q,
                    double fraction) {
    if (q < 1.0) throw std::invalid_argument("lp_norm_free: q must be >= 1");
    const auto free = grid.free_nodes();
    if (packed.size() != free.size())
        throw std::invalid_argument("lp_norm_free: value vector does not match the free nodes");
    const SubBox sb = concentric_subbox(grid, fraction);
    require_inside(sb, grid, Grid::clamp_width, "lp_norm_free");
    const double cell = std::pow(grid.h, grid.d);
    double sum = 0.0;
    long count = 0;
    for (std::size_t k = 0; k < free.size(); ++k) {
        if (!node_in(grid, free[k], sb)) continue;
        sum += std::pow(std::abs(packed[k]), q) * cell;
        ++count;
    }
    return finish_norm(sum, q, count, "lp_norm_free");
}

double lp_norm(const HessianField& hess, double q, double fraction) {
    if (q < 1.0) throw std::invalid_argument("lp_norm: q must be >= 1");
    const Grid& grid = hess.grid;
    const auto free = grid.free_nodes();
    if (hess.values.size() != free.size())
        throw std::invalid_argument("lp_norm: Hessian field does not match the grid");
    const SubBox sb = concentric_subbox(grid, fraction);
    require_inside(sb, grid, Grid::clamp_width, "lp_norm");
    const double cell = std::pow(grid.h, grid.d);
    double sum = 0.0;
    long count = 0;
    for (std::size_t k = 0; k < free.size(); ++k) {
        if (!node_in(grid, free[k], sb)) continue;
        sum += std::pow(hess.values[k].frobenius_norm(), q) * cell;
        ++count;
    }
    return finish_norm(sum, q, count, "lp_norm");
}

double holder_seminorm_gradient(const GridFunction& u, double alpha, double fraction,
                                std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("holder_seminorm_gradient: alpha must lie in (0, 1]");
    const Grid& grid = u.grid;
    const SubBox sb = concentric_subbox(grid, fraction);
    require_inside(sb, grid, 1, "holder_seminorm_gradient");  // centered gradient needs 1 layer

    struct Node {
        int i, j;
        double x, y;
        double gx, gy;
    };
    std::vector<Node> nodes;
    std::vector<int> pos(grid.size(), -1);  // flat index -> position in `nodes`
    const double inv2h = 1.0 / (2.0 * grid.h);
    const int jmax = grid.d == 1 ? 0 : grid.n - 1;
    for (int j = 0; j <= jmax; ++j) {
        if (grid.d == 2 && (j < 1 || j > grid.n - 2)) continue;
        for (int i = 1; i <= grid.n - 2; ++i) {
            const std::size_t flat = grid.index(i, j);
            if (!node_in(grid, flat, sb)) continue;
            Node nd;
            nd.i = i;
            nd.j = j;
            nd.x = grid.coord(i);
            nd.y = grid.d == 2 ? grid.coord(j) : 0.0;
            nd.gx = (u.values[flat + 1] - u.values[flat - 1]) * inv2h;
            nd.gy = grid.d == 2
                        ? (u.values[flat + grid.n] - u.values[flat - grid.n]) * inv2h
                        : 0.0;
            pos[flat] = static_cast<int>(nodes.size());
            nodes.push_back(nd);
        }
    }
    if (nodes.size() < 2) return 0.0;

    double worst = 0.0;
    auto consider = [&](const Node& a, const Node& b) {
        const double dist = std::hypot(a.x - b.x, a.y - b.y);
        if (dist <= 0.0) return;
        const double dg = std::hypot(a.gx - b.gx, a.gy - b.gy);
        worst = std::max(worst, dg / std::pow(dist, alpha));
    };

    // All pairs within 5 index steps (Chebyshev), enumerated once.
    for (const Node& a : nodes) {
        for (int dj = 0; dj <= (grid.d == 2 ? 5 : 0); ++dj) {
            const int di_lo = (dj == 0) ? 1 : -5;
            for (int di = di_lo; di <= 5; ++di) {
                const int bi = a.i + di;
                const int bj = a.j + dj;
                if (bi < 1 || bi > grid.n - 2) continue;
                if (grid.d == 2 && (bj < 1 || bj > grid.n - 2)) continue;
                const int pb = pos[grid.index(bi, bj)];
                if (pb < 0) continue;
                consider(a, nodes[static_cast<std::size_t>(pb)]);
            }
        }
    }

    // Seeded long-range pairs.
    Rng rng(seed);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t a = rng.below(nodes.size());
        const std::size_t b = rng.below(nodes.size());
        if (a == b) continue;
        consider(nodes[a], nodes[b]);
    }
    return worst;
}

double stability_ratio(double fine, double coarse) {
    if (std::abs(fine) <= 1e-10 && std::abs(coarse) <= 1e-10) return 1.0;
    return fine / coarse;
}

double fitted_slope(const std::vector<double>& h, const std::vector<double>& values) {
    if (h.size() != values.size() || h.size() < 2)
        throw std::invalid_argument("fitted_slope: need matching lists with at least 2 entries");
    for (double v : values)
        if (!(v > 0.0)) return 0.0;
    const std::size_t n = h.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += std::log(h[k]);
        my += std::log(values[k]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = std::log(h[k]) - mx;
        sxy += dx * (std::log(values[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

RefinementStudy refinement_study(const StudyConfig& config) {
    if (config.sizes.size() < 3)
        throw std::invalid_argument("refinement_study: need at least 3 grid sizes");
    for (std::size_t k = 0; k + 1 < config.sizes.size(); ++k)
        if (config.sizes[k] >= config.sizes[k + 1])
            throw std::invalid_argument("refinement_study: sizes must be increasing");
    if (config.d != 1 && config.d != 2)
        throw std::invalid_argument("refinement_study: d must be 1 or 2");
    if (!config.boundary) throw std::invalid_argument("refinement_study: missing boundary data");

    const int p = config.spec.p;
    const double q_exp = config.d == 2 ? 2.0 * (p - 1) : static_cast<double>(p - 1);
    const double r_exp = config.d == 2 ? 2.0 : 1.0;

    RefinementStudy study;
    study.q_exponent = q_exp;
    study.r_exponent = r_exp;
    std::vector<double> hess_lq, m_lr, u_sup, m_l1;

    for (int n : config.sizes) {
        const Grid grid = config.d == 1 ? Grid::line(n) : Grid::square(n);
        const std::vector<double> g = config.boundary(grid);
        const SolveResult res = solve(config.spec, g, grid, config.solve_options);
        if (!res.converged)
            throw std::runtime_error("refinement_study: stage at n=" + std::to_string(n) +
                                     " did not converge (" + res.message + ")");
        const MFGPair pair = assemble_density(res.u, config.spec);
        const HessianField hess = hessian(res.u);

        study.h.push_back(grid.h);
        hess_lq.push_back(lp_norm(hess, q_exp, config.fraction));
        m_lr.push_back(lp_norm_free(grid, pair.m, r_exp, config.fraction));
        double sup = 0.0;
        for (double v : res.u.values) sup = std::max(sup, std::abs(v));
        u_sup.push_back(sup);
        m_l1.push_back(integrate_free(grid, pair.m));
    }

    const double inv_pm1 = 1.0 / (p - 1);
    const double denom0 = u_sup[0] + std::pow(m_l1[0], inv_pm1);
    const double C = denom0 > 1e-10 ? hess_lq[0] / denom0 : 0.0;
    std::vector<double> rhs_proxy;
    for (std::size_t k = 0; k < u_sup.size(); ++k)
        rhs_proxy.push_back(C * (u_sup[k] + std::pow(m_l1[k], inv_pm1)));

    study.quantity["hess_lq_interior"] = hess_lq;
    study.quantity["m_lr_interior"] = m_lr;
    study.quantity["u_sup"] = u_sup;
    study.quantity["rhs_proxy"] = rhs_proxy;

    for (const auto& [name, vals] : study.quantity) {
        std::vector<double> ratios;
        for (std::size_t k = 0; k + 1 < vals.size(); ++k)
            ratios.push_back(stability_ratio(vals[k + 1], vals[k]));
        study.ratio[name] = ratios;
        study.slope[name] = fitted_slope(study.h, vals);
    }
    return study;
}

}  // namespace hessmfg
