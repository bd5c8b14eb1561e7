#include "hessmfg/solve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hessmfg/io.hpp"

namespace hessmfg {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sup_norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

// CG for the d=2 free-node Laplace system: (4u_f - sum of neighbors)/h^2,
// neighbors outside the free band read from the clamped data.
GridFunction harmonic_extension_2d(const Grid& grid, const std::vector<double>& g_data) {
    GridFunction u(grid, g_data, g_data);
    const auto free = grid.free_nodes();
    const std::size_t m = free.size();
    const std::size_t n = static_cast<std::size_t>(grid.n);
    std::vector<std::size_t> pos(grid.size(), static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < m; ++k) pos[free[k]] = k;

    // A x = b with A = free-free part of the 5-point Laplacian (SPD, h^2
    // cancels on both sides), b = boundary neighbor values.
    std::vector<double> b(m, 0.0), x(m, 0.0);
    const std::size_t off[4] = {static_cast<std::size_t>(-1), 1, static_cast<std::size_t>(-(long)n), n};
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t f = free[k];
        for (std::size_t o : off) {
            const std::size_t nb = f + o;
            if (pos[nb] == static_cast<std::size_t>(-1)) b[k] += g_data[nb];
        }
    }
    auto apply_A = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t f = free[k];
            double s = 4.0 * v[k];
            for (std::size_t o : off) {
                const std::size_t nb = f + o;
                if (pos[nb] != static_cast<std::size_t>(-1)) s -= v[pos[nb]];
            }
            out[k] = s;
        }
    };

    // Warm start from the raw data values: for data whose discrete Laplacian
    // already vanishes (affine, in particular) the initial residual is at
    // rounding level and the extension reproduces the data to machine
    // precision instead of carrying iteration noise.
    for (std::size_t k = 0; k < m; ++k) x[k] = g_data[free[k]];
    std::vector<double> r(m), p(m), Ap(m);
    apply_A(x, r);
    for (std::size_t k = 0; k < m; ++k) r[k] = b[k] - r[k];
    p = r;
    double rr = dot(r, r);
    const double b_norm = std::sqrt(dot(b, b));
    const double target = 1e-14 * (b_norm > 0.0 ? b_norm : 1.0);
    double best_res = std::sqrt(rr);
    int stalled = 0;
    for (std::size_t it = 0; it < 20 * m + 100 && std::sqrt(rr) > target; ++it) {
        apply_A(p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) break;
        const double alpha = rr / pAp;
        for (std::size_t k = 0; k < m; ++k) x[k] += alpha * p[k];
        for (std::size_t k = 0; k < m; ++k) r[k] -= alpha * Ap[k];
        const double rr_new = dot(r, r);
        const double res = std::sqrt(rr_new);
        if (res < best_res * 0.999) {
            best_res = res;
            stalled = 0;
        } else if (++stalled > 50) {
            break;  // roundoff floor reached
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
    }
    u.set_free(free, x);
    return u;
}

}  // namespace

GridFunction harmonic_extension(const Grid& grid, const std::vector<double>& g_data) {
    if (g_data.size() != grid.size())
        throw std::invalid_argument("harmonic_extension: data must cover every node");
    if (grid.d == 2) return harmonic_extension_2d(grid, g_data);
    GridFunction u(grid, g_data, g_data);
    // 1D discrete Laplace with the innermost clamped nodes as Dirichlet values
    // is exactly linear in the node index.
    const int i0 = Grid::clamp_width - 1;        // node 1
    const int i1 = grid.n - Grid::clamp_width;   // node n-2
    const double u0 = g_data[grid.index(i0)];
    const double u1 = g_data[grid.index(i1)];
    const double denom = static_cast<double>(i1 - i0);
    for (int i = i0 + 1; i < i1; ++i)
        u.values[grid.index(i)] = u0 + (u1 - u0) * (static_cast<double>(i - i0) / denom);
    u.clamp();
    return u;
}

SolveResult solve(const EnergySpec& spec, const std::vector<double>& g_data, const Grid& grid,
                  const SolveOptions& opts) {
    validate_energy_spec(spec, grid);
    if (opts.max_iters < 1 || opts.grad_tol <= 0.0 || opts.initial_step <= 0.0 ||
        opts.armijo_c <= 0.0 || opts.shrink <= 0.0 || opts.shrink >= 1.0 || opts.memory < 1 ||
        opts.max_backtracks < 1)
        throw std::invalid_argument("solve: invalid options");

    GridFunction u = harmonic_extension(grid, g_data);
    const auto free = grid.free_nodes();
    std::vector<double> x = u.get_free(free);
    const std::size_t m = x.size();

    SolveResult res;
    res.u = u;
    double E = energy(u, spec);  // domain violation at the start propagates
    std::vector<double> g = energy_gradient(u, spec);
    double gsup = sup_norm(g);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> mem;

    auto record = [&](double step) {
        if (!opts.record_history) return;
        res.history_energy.push_back(E);
        res.history_grad.push_back(gsup);
        res.history_step.push_back(step);
    };
    record(0.0);

    int iter = 0;
    std::string fail_message;
    bool ok = gsup <= opts.grad_tol;
    while (!ok && iter < opts.max_iters) {
        // Two-loop recursion for the quasi-Newton direction.
        std::vector<double> d = g;
        std::vector<double> alpha(mem.size());
        for (std::size_t i = mem.size(); i-- > 0;) {
            alpha[i] = mem[i].rho * dot(mem[i].s, d);
            for (std::size_t k = 0; k < m; ++k) d[k] -= alpha[i] * mem[i].y[k];
        }
        if (!mem.empty()) {
            const Pair& last = mem.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (double& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < mem.size(); ++i) {
            const double beta = mem[i].rho * dot(mem[i].y, d);
            for (std::size_t k = 0; k < m; ++k) d[k] += (alpha[i] - beta) * mem[i].s[k];
        }
        for (double& v : d) v = -v;

        bool steepest = false;
        double gd = dot(g, d);
        if (!(gd < 0.0)) {
            mem.clear();
            d = g;
            for (double& v : d) v = -v;
            gd = -dot(g, g);
            steepest = true;
        }

        // Armijo backtracking; domain violations count as +infinity.
        auto line_search = [&](const std::vector<double>& dir, double dir_gd,
                               double& step_out, double& E_out) -> bool {
            double t = opts.initial_step;
            for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
                std::vector<double> xt(m);
                for (std::size_t k = 0; k < m; ++k) xt[k] = x[k] + t * dir[k];
                u.set_free(free, xt);
                const auto Et = try_energy(u, spec);
                if (Et && *Et <= E + opts.armijo_c * t * dir_gd) {
                    x = std::move(xt);
                    step_out = t;
                    E_out = *Et;
                    return true;
                }
                t *= opts.shrink;
            }
            u.set_free(free, x);  // restore
            return false;
        };

        double step = 0.0, E_new = 0.0;
        bool accepted = line_search(d, gd, step, E_new);
        if (!accepted && !steepest) {
            // Restart with steepest descent once.
            mem.clear();
            d = g;
            for (double& v : d) v = -v;
            gd = -dot(g, g);
            steepest = true;
            accepted = line_search(d, gd, step, E_new);
        }
        if (!accepted) {
            fail_message = "line search failed after " + std::to_string(opts.max_backtracks) +
                           " backtracks (steepest-descent restart included)";
            break;
        }

        std::vector<double> g_new = energy_gradient(u, spec);
        Pair pr;
        pr.s.resize(m);
        pr.y.resize(m);
        for (std::size_t k = 0; k < m; ++k) pr.s[k] = step * d[k];
        for (std::size_t k = 0; k < m; ++k) pr.y[k] = g_new[k] - g[k];
        const double sy = dot(pr.s, pr.y);
        const double sn = std::sqrt(dot(pr.s, pr.s));
        const double yn = std::sqrt(dot(pr.y, pr.y));
        if (sy > 1e-12 * sn * yn) {  // curvature guard
            pr.rho = 1.0 / sy;
            mem.push_back(std::move(pr));
            if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
        }

        g = std::move(g_new);
        gsup = sup_norm(g);
        E = E_new;
        ++iter;
        record(step);
        ok = gsup <= opts.grad_tol;
    }

    res.u = u;
    res.energy = E;
    res.grad_sup = gsup;
    res.iterations = iter;
    res.converged = ok;
    if (ok)
        res.message = "converged: gradient sup-norm " + fmt17(gsup) + " <= " + fmt17(opts.grad_tol);
    else if (!fail_message.empty())
        res.message = fail_message;
    else
        res.message = "iteration budget exhausted (" + std::to_string(opts.max_iters) +
                      " iterations, gradient sup-norm " + fmt17(gsup) + ")";
    return res;
}

double verify_first_order(const GridFunction& u, const EnergySpec& spec) {
    return sup_norm(energy_gradient(u, spec));
}

}  // namespace hessmfg
