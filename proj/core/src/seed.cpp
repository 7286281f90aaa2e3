#include "csvortex/seed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "csvortex/errors.hpp"
#include "csvortex/integrator.hpp"

namespace csvortex {

namespace {

// One Picard sweep on a uniform s grid. Takes the corrections of the
// previous iterate, returns the next corrections plus the end values of the
// momentum integrals int_0^{r0} s F ds. The weighted integrand s F(s) scales
// like s^{1+2 min(N1,N2)} near the origin, so it is at least C^1 for every
// N >= 0; the log kernel of the double integral is handled by product
// integration against its piecewise-linear interpolant, with s log(s) -> 0
// at the left endpoint.
struct Sweep {
    std::vector<double> cu, cv;  // corrections at nodes 0..m
    double ip = 0.0, iq = 0.0;   // int s (f2-2f1) ds, int s (f1-2f2) ds on (0, r0]
};

double base_log(double n, double alpha, double s) {
    if (n == 0.0) return alpha;  // smooth at the origin
    if (s == 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * n * std::log(s) + alpha;
}

Sweep picard_sweep(const Params& par, const InitialData& al, double r0, int m,
                   const Sweep* prev) {
    const double h = r0 / m;
    std::vector<double> gu(m + 1), gv(m + 1);  // s * F at the nodes
    for (int j = 0; j <= m; ++j) {
        const double s = h * j;
        double uj = base_log(par.n1, al.alpha1, s);
        double vj = base_log(par.n2, al.alpha2, s);
        if (prev) {
            uj += prev->cu[j];
            vj += prev->cv[j];
        }
        const double a = f1(uj, vj), b = f2(uj, vj);
        gu[j] = s * (b - 2.0 * a);
        gv[j] = s * (a - 2.0 * b);
        if (!std::isfinite(gu[j]) || !std::isfinite(gv[j]))
            throw QuadratureFailure("seed integrand not finite; r0 too large for the expansion");
    }

    // Exact panel moments of the log kernel against a linear integrand.
    auto m_log = [](double x) { return x > 0.0 ? x * std::log(x) - x : 0.0; };
    auto m_xlog = [](double x) { return x > 0.0 ? 0.5 * x * x * std::log(x) - 0.25 * x * x : 0.0; };

    Sweep out;
    out.cu.assign(m + 1, 0.0);
    out.cv.assign(m + 1, 0.0);
    double au = 0.0, av = 0.0;  // cumulative int s F ds
    double bu = 0.0, bv = 0.0;  // cumulative int s F log(s) ds
    for (int j = 1; j <= m; ++j) {
        const double a = h * (j - 1), b = h * j;
        au += 0.5 * h * (gu[j - 1] + gu[j]);
        av += 0.5 * h * (gv[j - 1] + gv[j]);
        const double m0 = m_log(b) - m_log(a);
        const double m1 = (m_xlog(b) - m_xlog(a)) - a * m0;
        bu += gu[j - 1] * m0 + (gu[j] - gu[j - 1]) / h * m1;
        bv += gv[j - 1] * m0 + (gv[j] - gv[j - 1]) / h * m1;
        // c(s) = int_0^s s' log(s/s') F ds' = log(s) A(s) - B(s)
        out.cu[j] = std::log(b) * au - bu;
        out.cv[j] = std::log(b) * av - bv;
    }
    out.ip = au;
    out.iq = av;
    return out;
}

struct SeedRun {
    double u, v, p, q, bound;
};

SeedRun run_iterations(const Params& par, const InitialData& al, double r0, int m,
                       int iterations) {
    SeedRun out{base_log(par.n1, al.alpha1, r0), base_log(par.n2, al.alpha2, r0),
                2.0 * par.n1, 2.0 * par.n2, 0.0};

    Sweep prev;  // iterate 0: zero corrections
    prev.cu.assign(m + 1, 0.0);
    prev.cv.assign(m + 1, 0.0);
    const double u_base = out.u, v_base = out.v;

    for (int k = 1; k <= iterations + 1; ++k) {
        Sweep next = picard_sweep(par, al, r0, m, &prev);
        double d = std::max(std::abs(next.ip - prev.ip), std::abs(next.iq - prev.iq));
        for (int j = 0; j <= m; ++j) {
            d = std::max(d, std::abs(next.cu[j] - prev.cu[j]));
            d = std::max(d, std::abs(next.cv[j] - prev.cv[j]));
        }
        if (k <= iterations) {
            out.u = u_base + next.cu[m];
            out.v = v_base + next.cv[m];
            out.p = 2.0 * par.n1 + next.ip;
            out.q = 2.0 * par.n2 + next.iq;
        } else {
            out.bound = d;  // sup-change of the one-past-last iterate
        }
        prev = std::move(next);
    }
    return out;
}

} // namespace

SeedState seed(const Params& params, const InitialData& alpha, double r0, int iterations) {
    if (!(r0 > 0.0)) throw std::invalid_argument("seed: r0 must be positive");
    if (iterations < 0) throw std::invalid_argument("seed: iterations must be >= 0");

    SeedRun best{};
    bool have_prev = false;
    SeedRun prev{};
    for (int m = 1024; m <= (1 << 17); m *= 2) {
        best = run_iterations(params, alpha, r0, m, iterations);
        if (have_prev) {
            const double scale = 1.0 + std::max({std::abs(best.u), std::abs(best.v),
                                                 std::abs(best.p), std::abs(best.q)});
            const double dstate = std::max({std::abs(best.u - prev.u), std::abs(best.v - prev.v),
                                            std::abs(best.p - prev.p), std::abs(best.q - prev.q)});
            const double dbound = std::abs(best.bound - prev.bound);
            if (dstate < 1e-13 * scale && dbound < 0.1 * best.bound + 1e-15) {
                SeedState s;
                s.t0 = std::log(r0);
                s.u = best.u;
                s.v = best.v;
                s.p = best.p;
                s.q = best.q;
                s.correction_bound = best.bound;
                s.alpha = alpha;
                return s;
            }
        }
        prev = best;
        have_prev = true;
    }
    throw QuadratureFailure("seed quadrature did not converge; r0 too large for the expansion");
}

bool seed_self_test(const Params& params, const InitialData& alpha, double r0, double r0_alt) {
    if (r0_alt <= 0.0) r0_alt = 0.5 * r0;
    const double r_in = std::min(r0, r0_alt), r_out = std::max(r0, r0_alt);
    SeedState outer = seed(params, alpha, r_out);
    SeedState inner = seed(params, alpha, r_in);

    IntegrateOpts opts;
    opts.t_max = outer.t0;
    opts.rtol = 1e-12;
    opts.atol = 1e-14;
    Trajectory traj = integrate(inner, params, opts);
    if (traj.stop != StopReason::ReachedTMax) return false;

    const State& e = traj.samples.back();
    const double scale = 1.0 + std::max({std::abs(e.u), std::abs(e.v), std::abs(e.p), std::abs(e.q)});
    const double tol = 10.0 * std::max(outer.correction_bound, inner.correction_bound)
                     + 1e-11 * scale;  // integration-error floor
    return std::abs(e.u - outer.u) <= tol && std::abs(e.v - outer.v) <= tol &&
           std::abs(e.p - outer.p) <= tol && std::abs(e.q - outer.q) <= tol;
}

} // namespace csvortex
