#include "hessmfg/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "hessmfg/io.hpp"

namespace hessmfg {

namespace {

// Monotone-chain lower hull of points (z_k, f_k) with z strictly increasing.
// Collinear points are dropped with a scale-aware tolerance so re-hulling a
// piecewise-linear table reproduces the same vertex set.
std::vector<int> lower_hull(const std::vector<double>& z, const std::vector<double>& f) {
    const int N = static_cast<int>(z.size());
    double max_abs_f = 0.0;
    for (double v : f) max_abs_f = std::max(max_abs_f, std::abs(v));
    const double eps_drop = 1e-12 * (z.back() - z.front()) * (1.0 + max_abs_f);

    std::vector<int> hull;
    hull.reserve(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2];
            const int b = hull[hull.size() - 1];
            const double cross =
                (z[b] - z[a]) * (f[k] - f[a]) - (f[b] - f[a]) * (z[k] - z[a]);
            if (cross <= eps_drop)
                hull.pop_back();  // right turn or collinear: b is above the chord a-k
            else
                break;
        }
        hull.push_back(k);
    }
    return hull;
}

double segment_slope(const EnvelopeTable& t, std::size_t seg) {
    const int a = t.hull[seg];
    const int b = t.hull[seg + 1];
    return (t.gamma[b] - t.gamma[a]) / (t.z[b] - t.z[a]);
}

// Index of the hull segment whose abscissa interval contains zz (clamped to
// the end segments outside the range).
std::size_t locate_segment(const EnvelopeTable& t, double zz) {
    const std::size_t H = t.hull.size();
    std::size_t lo = 0, hi = H - 1;  // vertex indices bracketing zz
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (t.z[t.hull[mid]] <= zz)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

double EnvelopeTable::eval(double zz) const {
    if (zz <= z[hull.front()]) {
        const double s = segment_slope(*this, 0);
        return gamma[hull.front()] + s * (zz - z[hull.front()]);
    }
    if (zz >= z[hull.back()]) {
        const double s = segment_slope(*this, hull.size() - 2);
        return gamma[hull.back()] + s * (zz - z[hull.back()]);
    }
    const std::size_t seg = locate_segment(*this, zz);
    const int a = hull[seg];
    return gamma[a] + segment_slope(*this, seg) * (zz - z[a]);
}

double EnvelopeTable::slope(double zz) const {
    if (zz <= z[hull.front()]) return segment_slope(*this, 0);
    if (zz >= z[hull.back()]) return segment_slope(*this, hull.size() - 2);
    const std::size_t seg = locate_segment(*this, zz);
    if (seg > 0 && zz == z[hull[seg]])
        return 0.5 * (segment_slope(*this, seg - 1) + segment_slope(*this, seg));
    return segment_slope(*this, seg);
}

EnvelopeTable convex_envelope_1d(const OperatorSpec& op, double z_min, double z_max, int N) {
    if (op.d != 1) throw std::invalid_argument("convex_envelope_1d: operator must be 1D");
    if (!(z_min < z_max)) throw std::invalid_argument("convex_envelope_1d: empty range");
    if (N < 8) throw std::invalid_argument("convex_envelope_1d: need at least 8 samples");

    EnvelopeTable t;
    t.op_name = op.name;
    t.z.resize(static_cast<std::size_t>(N));
    t.f.resize(static_cast<std::size_t>(N));
    const double dz = (z_max - z_min) / (N - 1);
    for (int k = 0; k < N; ++k) {
        const double zk = (k == N - 1) ? z_max : z_min + k * dz;
        t.z[static_cast<std::size_t>(k)] = zk;
        t.f[static_cast<std::size_t>(k)] = eval_operator(op, SymMatrix::scalar(zk));
    }

    t.hull = lower_hull(t.z, t.f);
    t.gamma.assign(static_cast<std::size_t>(N), 0.0);
    for (std::size_t s = 0; s + 1 < t.hull.size(); ++s) {
        const int a = t.hull[s];
        const int b = t.hull[s + 1];
        const double sl = (t.f[b] - t.f[a]) / (t.z[b] - t.z[a]);
        for (int k = a; k < b; ++k) t.gamma[k] = t.f[a] + sl * (t.z[k] - t.z[a]);
        t.gamma[b] = t.f[b];  // exact at vertices
    }
    t.gamma[t.hull.front()] = t.f[t.hull.front()];

    t.contact.assign(static_cast<std::size_t>(N), 0);
    for (int k = 0; k < N; ++k)
        t.contact[k] = (t.f[k] - t.gamma[k] <= 1e-12 * (1.0 + std::abs(t.f[k]))) ? 1 : 0;
    return t;
}

CheckReport envelope_coercivity_check(const EnvelopeTable& table, double lambda, double tol) {
    CheckReport r;
    r.check = "envelope-coercivity";
    r.op_name = table.op_name;
    r.samples = static_cast<int>(table.z.size());
    r.tol = tol;
    double worst = 0.0;
    for (std::size_t k = 0; k < table.z.size(); ++k)
        worst = std::max(worst, lambda * std::abs(table.z[k]) - table.gamma[k]);
    r.worst_violation = std::max(0.0, worst);
    r.pass = worst <= tol;
    return r;
}

EnergySpec relaxed_energy_spec(const OperatorSpec& op, int p, double z_min, double z_max, int N) {
    auto table = std::make_shared<EnvelopeTable>(convex_envelope_1d(op, z_min, z_max, N));
    auto counter = std::make_shared<std::atomic<long>>(0);

    OperatorSpec r;
    r.name = op.name + "_relaxed";
    r.d = 1;
    r.eval = [table, counter](const SymMatrix& M) {
        const double zz = M.m11();
        if (!table->in_range(zz)) counter->fetch_add(1, std::memory_order_relaxed);
        return table->eval(zz);
    };
    r.deriv = [table, counter](const SymMatrix& M) {
        const double zz = M.m11();
        if (!table->in_range(zz)) counter->fetch_add(1, std::memory_order_relaxed);
        return SymMatrix::scalar(table->slope(zz));
    };
    r.in_domain = nullptr;  // linear extension: defined everywhere
    r.lambda = op.lambda;
    r.Lambda = op.Lambda;
    r.is_convex = true;
    r.is_coercive = op.is_coercive;
    r.is_smooth = false;
    r.singular_set = "hull vertices (piecewise-linear kinks)";
    r.ell_lo = z_min;
    r.ell_hi = z_max;
    r.psd_scale = op.psd_scale;
    r.ell_lambda = op.ell_lambda;
    r.ell_Lambda = op.ell_Lambda;
    r.val_lo = z_min;
    r.val_hi = z_max;
    r.range_extensions = counter;

    EnergySpec spec;
    spec.op = std::move(r);
    spec.p = p;
    spec.kind = EnergyKind::power;
    return spec;
}

LaminateResult build_minimizing_sequence(const OperatorSpec& op, int p, double z_bar, int cells,
                                         double hull_z_min, double hull_z_max,
                                         int hull_samples) {
    if (op.d != 1) throw std::invalid_argument("build_minimizing_sequence: operator must be 1D");
    if (p < 2) throw std::invalid_argument("build_minimizing_sequence: p must be >= 2");
    if (cells < 2) throw std::invalid_argument("build_minimizing_sequence: need at least 2 cells");
    if (hull_samples < 8)
        throw std::invalid_argument("build_minimizing_sequence: need at least 8 hull samples");
    if (!(z_bar > hull_z_min && z_bar < hull_z_max))
        throw std::invalid_argument("build_minimizing_sequence: z_bar outside the hull range");

    // Lower hull of the full integrand z -> F(z)^p; the laminate oscillates
    // between the contact points bracketing z_bar so the cell-averaged
    // integrand matches the hull value there.
    const int N = hull_samples;
    std::vector<double> zs(static_cast<std::size_t>(N)), gs(static_cast<std::size_t>(N));
    const double dz = (hull_z_max - hull_z_min) / (N - 1);
    for (int k = 0; k < N; ++k) {
        const double zk = (k == N - 1) ? hull_z_max : hull_z_min + k * dz;
        zs[static_cast<std::size_t>(k)] = zk;
        gs[static_cast<std::size_t>(k)] = ipow(eval_operator(op, SymMatrix::scalar(zk)), p);
    }
    const std::vector<int> hull = lower_hull(zs, gs);

    std::size_t lo = 0, hi = hull.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (zs[hull[mid]] <= z_bar)
            lo = mid;
        else
            hi = mid;
    }
    const int a = hull[lo];
    const int b = hull[lo + 1];
    const double g_at = ipow(eval_operator(op, SymMatrix::scalar(z_bar)), p);
    const double gamma_at =
        gs[a] + (gs[b] - gs[a]) / (zs[b] - zs[a]) * (z_bar - zs[a]);
    if (b == a + 1 || g_at - gamma_at <= 1e-7 * (1.0 + std::abs(g_at)))
        throw std::runtime_error(
            "build_minimizing_sequence: already convex here (the envelope touches the "
            "integrand at z_bar = " + fmt17(z_bar) + ")");

    LaminateResult res;
    res.z1 = zs[a];
    res.z2 = zs[b];
    res.theta = (res.z2 - z_bar) / (res.z2 - res.z1);
    res.cells = cells;

    const int nodes = static_cast<int>(std::llround(6.0 * std::pow(cells, 2.5))) + 1;
    res.grid_nodes = nodes;
    const Grid grid = Grid::line(nodes);

    // Second derivative zeta = z1 on the leading theta-fraction of each cell,
    // z2 on the rest; psi = integral of zeta; u_raw = integral of psi. Cell
    // boundary values follow closed forms (per-cell averages are exactly
    // z_bar), so every nodal value is computed directly, without running
    // accumulation.
    const double L = 1.0 / cells;
    const double tL = res.theta * L;          // kink offset inside a cell
    const double rL = L - tL;                 // remaining (z2) part
    const double z1 = res.z1, z2 = res.z2;
    const double cell_quad = 0.5 * z1 * tL * tL + z1 * tL * rL + 0.5 * z2 * rL * rL;

    auto u_raw_at = [&](double x) {
        int j = static_cast<int>(std::floor(x * cells));
        j = std::min(std::max(j, 0), cells - 1);
        const double tau = x - j * L;
        const double Uj = 0.5 * z_bar * L * L * j * (j - 1) + j * cell_quad;
        double s;
        if (tau <= tL)
            s = 0.5 * z1 * tau * tau;
        else
            s = 0.5 * z1 * tL * tL + z1 * tL * (tau - tL) + 0.5 * z2 * (tau - tL) * (tau - tL);
        return Uj + z_bar * (j * L) * tau + s;
    };

    const double raw_end = 0.5 * z_bar * L * L * cells * (cells - 1) + cells * cell_quad;
    const double corr_slope = 0.5 * z_bar - raw_end;  // q(1) - u_raw(1)

    std::vector<double> vals(grid.size());
    for (int k = 0; k < nodes; ++k) {
        const double x = grid.coord(k);
        vals[static_cast<std::size_t>(k)] = u_raw_at(x) + corr_slope * x;
    }
    GridFunction u(grid, vals, vals);  // self-clamped

    EnergySpec spec;
    spec.op = op;
    spec.p = p;
    spec.kind = EnergyKind::power;
    res.energy = energy(u, spec);

    const double theta = res.theta;
    const double gamma_ref = theta * gs[a] + (1.0 - theta) * gs[b];
    const double measure = integrate(grid, [](std::size_t) { return 1.0; });
    res.reference = gamma_ref * measure;
    res.gap = std::abs(res.energy - res.reference);
    res.u = std::move(u);
    return res;
}

}  // namespace hessmfg
