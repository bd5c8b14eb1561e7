#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace hessmfg::oracles {

std::vector<double> fd_gradient(const GridFunction& u, const EnergySpec& spec,
                                double base_step) {
    const auto free = u.grid.free_nodes();
    GridFunction w = u;
    std::vector<double> grad(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        const std::size_t f = free[k];
        const double saved = w.values[f];
        const double step = base_step * (1.0 + std::abs(saved));
        w.values[f] = saved + step;
        const double ep = energy(w, spec);
        w.values[f] = saved - step;
        const double em = energy(w, spec);
        w.values[f] = saved;
        grad[k] = (ep - em) / (2.0 * step);
    }
    return grad;
}

std::vector<double> biconjugate(const std::vector<double>& z, const std::vector<double>& f) {
    const std::size_t N = z.size();
    if (f.size() != N || N < 2)
        throw std::invalid_argument("biconjugate: need matching lists with at least 2 points");

    // Conjugate: f*(s) = max_k (z_k s - f_k), the upper envelope of lines with
    // slopes z_k (already increasing). Keep the lines that appear on the
    // envelope together with the breakpoints between them.
    std::vector<std::size_t> line;   // indices of envelope lines, slope-increasing
    std::vector<double> bp;          // bp[i] = breakpoint between line[i-1] and line[i]
    auto cross_at = [&](std::size_t a, std::size_t b) {
        // z_a s - f_a = z_b s - f_b  =>  s = (f_b - f_a) / (z_b - z_a)
        return (f[b] - f[a]) / (z[b] - z[a]);
    };
    for (std::size_t k = 0; k < N; ++k) {
        while (!line.empty()) {
            const std::size_t top = line.back();
            const double s_new = cross_at(top, k);
            if (line.size() == 1) {
                bp.assign(1, s_new);
                break;
            }
            if (s_new <= bp.back()) {
                line.pop_back();
                bp.pop_back();
            } else {
                bp.push_back(s_new);
                break;
            }
        }
        if (line.empty()) bp.clear();
        line.push_back(k);
    }

    // Second transform: f**(zz) = sup_s (zz*s - f*(s)). The objective's slope
    // on envelope piece i is zz - z_line[i], decreasing with i, so the sup
    // sits at the breakpoint where the piece slope crosses zz.
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double zz = z[j];
        // First piece with slope z_line[i] >= zz; the sup is at bp[i-1]
        // (or at the line itself when zz matches an envelope slope exactly).
        std::size_t lo = 0, hi = line.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (z[line[mid]] < zz)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo == 0) {
            out[j] = f[line[0]];  // zz at the smallest slope: value of that line's point
            continue;
        }
        if (lo == line.size()) {
            out[j] = f[line.back()];
            continue;
        }
        const double s_star = bp[lo - 1];
        const std::size_t a = line[lo - 1];
        out[j] = zz * s_star - (z[a] * s_star - f[a]);
    }
    return out;
}

double simpson(const std::function<double(double)>& fn, double a, double b, int panels) {
    if (panels < 1) throw std::invalid_argument("simpson: need at least 1 panel");
    const double h = (b - a) / panels;
    double sum = fn(a) + fn(b);
    for (int k = 1; k < panels; ++k) sum += 2.0 * fn(a + k * h);
    for (int k = 0; k < panels; ++k) sum += 4.0 * fn(a + (k + 0.5) * h);
    return sum * h / 6.0;
}

}  // namespace hessmfg::oracles
