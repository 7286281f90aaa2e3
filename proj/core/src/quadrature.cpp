#include "csvortex/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "csvortex/errors.hpp"

namespace csvortex {

double integrate_dense(const Trajectory& traj, const std::function<double(const State&)>& f,
                       double t_a, double t_b, int min_panels) {
    if (t_b == t_a) return 0.0;
    if (t_b < t_a) return -integrate_dense(traj, f, t_b, t_a, min_panels);
    if (t_a < traj.t_begin() || t_b > traj.t_end())
        throw OutOfRange("integrate_dense: interval outside sampled range");

    const double max_w = (traj.t_end() - traj.t_begin()) / std::max(1, min_panels);
    double total = 0.0;
    auto panel = [&](double a, double b) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < 15; ++i) {
            const State s = sample_at(traj, mid + half * GaussLegendre15::nodes[i]);
            acc += GaussLegendre15::weights[i] * f(s);
        }
        return acc * half;
    };

    // Walk the accepted samples; subdivide wide steps.
    const auto& smp = traj.samples;
    size_t i = 0;
    while (i + 1 < smp.size() && smp[i + 1].t <= t_a) ++i;
    double lo = t_a;
    for (; i + 1 < smp.size() && lo < t_b; ++i) {
        const double hi = std::min(smp[i + 1].t, t_b);
        if (hi <= lo) continue;
        const int nsub = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_w)));
        const double w = (hi - lo) / nsub;
        for (int k = 0; k < nsub; ++k) total += panel(lo + k * w, lo + (k + 1) * w);
        lo = hi;
    }
    return total;
}

} // namespace csvortex
