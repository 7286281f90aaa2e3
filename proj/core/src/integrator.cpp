#include "csvortex/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csvortex/errors.hpp"

namespace csvortex {

namespace {

using Vec4 = std::array<double, 4>;

// Dormand-Prince 5(4) tableau (FSAL), with the classic 4th-order continuous
// extension. Coefficients as in Hairer-Norsett-Wanner.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

Vec4 deriv(double t, const Vec4& y, bool scalar) {
    if (scalar) {
        // u and v advance through the scalar reduction; the mirrored
        // components stay bit-identical on the diagonal.
        auto du = scalar_rhs_log(t, y[0], y[2]);
        auto dv = scalar_rhs_log(t, y[1], y[3]);
        return {du[0], dv[0], du[1], dv[1]};
    }
    State s{t, y[0], y[1], y[2], y[3]};
    return rhs_log(t, s);
}

double error_norm(const Vec4& y0, const Vec4& y1, const Vec4& err, double atol, double rtol) {
    // Paired summation keeps the norm invariant under the u <-> v mirror, so
    // mirrored runs take bitwise-mirrored step sequences.
    auto sq = [&](int i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = err[i] / sc;
        return e * e;
    };
    const double sum = (sq(0) + sq(1)) + (sq(2) + sq(3));
    return std::sqrt(sum / 4.0);
}

State make_state(double t, const Vec4& y) { return {t, y[0], y[1], y[2], y[3]}; }

// Event functions, indexed by EventKind.
double event_fn(EventKind k, const State& s) {
    switch (k) {
        case EventKind::Intersection:  return s.u - s.v;
        case EventKind::F1Zero:        return f1(s.u, s.v);
        case EventKind::F2Zero:        return f2(s.u, s.v);
        case EventKind::UExtremum:     return s.p;
        case EventKind::VExtremum:     return s.q;
        case EventKind::ULogHalfCross: return s.u - kLogHalf;
        case EventKind::VLogHalfCross: return s.v - kLogHalf;
        case EventKind::SumSlopeZero:  return s.p + s.q;
    }
    return 0.0;
}

constexpr std::array<EventKind, 8> kAllEvents = {
    EventKind::Intersection, EventKind::F1Zero,        EventKind::F2Zero,
    EventKind::UExtremum,    EventKind::VExtremum,     EventKind::ULogHalfCross,
    EventKind::VLogHalfCross, EventKind::SumSlopeZero,
};

} // namespace

bool certify_blowup(const State& s) {
    auto equal_case = [](double u, double v, double p, double q) {
        return std::abs(u - v) < 1e-12 && u > 0.0 && p > 0.0 && p - q > 0.0;
    };
    auto upper_case = [](double u, double v, double p) {
        return u > v && u > 0.0 && p > 0.0;
    };
    return equal_case(s.u, s.v, s.p, s.q) || equal_case(s.v, s.u, s.q, s.p) ||
           upper_case(s.u, s.v, s.p) || upper_case(s.v, s.u, s.q);
}

Trajectory integrate(const SeedState& seed, const Params& params, const IntegrateOpts& opts) {
    if (!(opts.t_max > seed.t0))
        throw std::invalid_argument("integrate: t_max must exceed the seed t0");

    Trajectory traj;
    traj.params = params;
    traj.alpha = seed.alpha;

    double t = seed.t0;
    Vec4 y = {seed.u, seed.v, seed.p, seed.q};
    traj.samples.push_back(make_state(t, y));

    auto note_certified = [&](const State& s) {
        if (!traj.blowup_certified && certify_blowup(s)) {
            traj.blowup_certified = true;
            traj.first_certified_t = s.t;
        }
    };
    note_certified(traj.samples.back());

    Vec4 k1;
    try {
        k1 = deriv(t, y, opts.scalar_reduction);
    } catch (const BlowUpGuard&) {
        traj.stop = StopReason::BlowUp;
        return traj;
    }

    // First step from the RHS magnitude; the controller corrects it quickly.
    double fmag = 0.0, ymag = 0.0;
    for (int i = 0; i < 4; ++i) {
        fmag = std::max(fmag, std::abs(k1[i]));
        ymag = std::max(ymag, std::abs(y[i]));
    }
    const double span = opts.t_max - seed.t0;
    double h = std::min({1e-2, 1e-3 * span, 1e-2 * (1.0 + ymag) / (1.0 + fmag)});

    bool rejected_last = false;
    bool guard_rejected = false;  // trial steps hit the exponent guard since the last accept
    while (true) {
        if (t >= opts.t_max) {
            traj.stop = StopReason::ReachedTMax;
            break;
        }
        h = std::min(h, opts.t_max - t);
        // Pre-limit from the known field slopes, so the change cap below is a
        // backstop rather than a rejection per step.
        const double slope = std::max(std::abs(y[2]), std::abs(y[3]));
        if (slope > 0.0) h = std::min(h, opts.max_field_step / (1.2 * slope));
        if (h < opts.h_min || h < 8.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
            // Persistent guard trips at vanishing step size mean the state
            // itself hugs the guard surface. Likewise, step starvation with a
            // positive component riding an enormous slope is the finite-time
            // spike u ~ -log(t*-t), whose remaining ceiling distance lies
            // below the resolution of double t arithmetic. Both are blow-up
            // evidence; a bare underflow is the controller failing.
            const State& last = traj.samples.back();
            const bool spike = (last.u > 1.0 && last.p > 1e9) || (last.v > 1.0 && last.q > 1e9);
            traj.stop = (guard_rejected || spike) ? StopReason::BlowUp : StopReason::StepUnderflow;
            break;
        }

        Vec4 k2, k3, k4, k5, k6, k7, y1;
        bool guard = false;
        try {
            Vec4 w;
            for (int i = 0; i < 4; ++i) w[i] = y[i] + h * a21 * k1[i];
            k2 = deriv(t + c2 * h, w, opts.scalar_reduction);
            for (int i = 0; i < 4; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = deriv(t + c3 * h, w, opts.scalar_reduction);
            for (int i = 0; i < 4; ++i) w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = deriv(t + c4 * h, w, opts.scalar_reduction);
            for (int i = 0; i < 4; ++i)
                w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = deriv(t + c5 * h, w, opts.scalar_reduction);
            for (int i = 0; i < 4; ++i)
                w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = deriv(t + h, w, opts.scalar_reduction);
            for (int i = 0; i < 4; ++i)
                y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = deriv(t + h, y1, opts.scalar_reduction);
        } catch (const BlowUpGuard&) {
            guard = true;
        }
        if (guard) {
            if (h <= 100.0 * opts.h_min) {
                traj.stop = StopReason::BlowUp;
                break;
            }
            // An over-extrapolated trial stage reached the guard; reject and
            // shrink like any failed step.
            h *= 0.2;
            rejected_last = true;
            guard_rejected = true;
            continue;
        }

        bool finite = true;
        Vec4 err;
        for (int i = 0; i < 4; ++i) {
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            finite = finite && std::isfinite(y1[i]) && std::isfinite(err[i]);
        }
        const double en = finite ? error_norm(y, y1, err, opts.atol, opts.rtol)
                                 : std::numeric_limits<double>::infinity();
        if (!(en <= 1.0)) {
            const double fac = std::isfinite(en)
                                   ? std::max(0.2, 0.9 * std::pow(en, -0.2))
                                   : 0.2;
            h *= fac;
            rejected_last = true;
            continue;
        }
        // Relative error control alone lets a blow-up cross decades in one
        // step (the scale grows with y1); capping the field change keeps the
        // rise resolved until the ceiling fires.
        const double dfield = std::max(std::abs(y1[0] - y[0]), std::abs(y1[1] - y[1]));
        if (dfield > opts.max_field_step) {
            h *= std::max(0.2, 0.9 * opts.max_field_step / dfield);
            rejected_last = true;
            continue;
        }

        // Accepted: store the dense segment, then the sample.
        DenseSegment seg;
        seg.t0 = t;
        seg.h = h;
        for (int i = 0; i < 4; ++i) {
            const double dy = y1[i] - y[i];
            seg.c[0][i] = y[i];
            seg.c[1][i] = dy;
            seg.c[2][i] = h * k1[i] - dy;
            seg.c[3][i] = dy - h * k7[i] - seg.c[2][i];
            seg.c[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i]);
        }
        traj.dense.push_back(seg);

        const State prev = traj.samples.back();
        const State cur = make_state(t + h, y1);
        traj.samples.push_back(cur);
        note_certified(cur);

        // Sign-change events between the flanking accepted samples; the
        // flank-magnitude requirement suppresses chatter on symmetric or
        // identically-zero trajectories.
        for (EventKind kind : kAllEvents) {
            const double fa = event_fn(kind, prev);
            const double fb = event_fn(kind, cur);
            if (!(fa * fb < 0.0)) continue;
            if (std::abs(fa) <= opts.event_flank || std::abs(fb) <= opts.event_flank) continue;
            double ta = prev.t, tb = cur.t;
            double sa = fa;
            State located = cur;
            for (int it = 0; it < 200; ++it) {
                const double tm = 0.5 * (ta + tb);
                const double theta = (tm - seg.t0) / seg.h;
                located = make_state(tm, seg.eval(theta));
                const double fm = event_fn(kind, located);
                if (std::abs(fm) < opts.event_loc_tol) break;
                if ((fm > 0.0) == (sa > 0.0)) {
                    ta = tm;
                    sa = fm;
                } else {
                    tb = tm;
                }
                if (tb - ta < 1e-15 * std::max(1.0, std::abs(tb))) break;
            }
            traj.events.push_back({kind, located.t, located});
        }

        t += h;
        y = y1;
        k1 = k7;  // FSAL
        guard_rejected = false;

        if (y[0] > opts.blowup_ceiling || y[1] > opts.blowup_ceiling) {
            traj.stop = StopReason::BlowUp;
            break;
        }
        const bool tiny = std::abs(y[0]) < opts.converge_eps && std::abs(y[1]) < opts.converge_eps &&
                          std::abs(y[2]) < opts.converge_eps && std::abs(y[3]) < opts.converge_eps;
        const bool exact_zero = y[0] == 0.0 && y[1] == 0.0 && y[2] == 0.0 && y[3] == 0.0;
        // The exact fixed point costs nothing to carry to t_max and keeps the
        // full range available to dense output; only a nonzero converged
        // approach stops early (before unstable-mode noise can regrow).
        if (tiny && !exact_zero) {
            traj.stop = StopReason::ConvergedTopological;
            break;
        }

        const double grow = rejected_last ? 1.0 : 10.0;
        h *= std::min(grow, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-10), -0.2)));
        rejected_last = false;
    }
    return traj;
}

State sample_at(const Trajectory& traj, double t) {
    const auto& s = traj.samples;
    if (s.empty()) throw OutOfRange("sample_at: empty trajectory");
    if (t < s.front().t || t > s.back().t) throw OutOfRange("sample_at: t outside sampled range");
    // Exact hits return stored samples.
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const State& a, double tv) { return a.t < tv; });
    if (it != s.end() && it->t == t) return *it;
    const size_t seg_idx = static_cast<size_t>(it - s.begin()) - 1;
    if (seg_idx >= traj.dense.size()) throw OutOfRange("sample_at: no dense data for t");
    const DenseSegment& seg = traj.dense[seg_idx];
    return make_state(t, seg.eval((t - seg.t0) / seg.h));
}

std::vector<State> resample(const Trajectory& traj, std::span<const double> t_grid) {
    std::vector<State> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back(sample_at(traj, t));
    return out;
}

} // namespace csvortex
