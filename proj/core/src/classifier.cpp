#include "csvortex/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "csvortex/errors.hpp"

namespace csvortex {

namespace {

constexpr double kTrivialEps = 1e-9;
constexpr double kWitnessEps = 1e-6;  // closest-approach threshold for boundary trajectories

double field_mag(const State& s) { return std::max(std::abs(s.u), std::abs(s.v)); }

size_t tail_begin_index(const Trajectory& traj, double window_fraction) {
    const double t_cut = traj.t_end() - window_fraction * (traj.t_end() - traj.t_begin());
    size_t i = 0;
    while (i + 1 < traj.samples.size() && traj.samples[i].t < t_cut) ++i;
    return i;
}

struct LineFit {
    double slope, intercept, max_dev;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double xb = 0.0, yb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        xb += x[i];
        yb += y[i];
    }
    xb /= n;
    yb /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xb) * (x[i] - xb);
        sxy += (x[i] - xb) * (y[i] - yb);
    }
    LineFit f{sxy / sxx, 0.0, 0.0};
    f.intercept = yb - f.slope * xb;
    for (size_t i = 0; i < n; ++i)
        f.max_dev = std::max(f.max_dev, std::abs(y[i] - (f.slope * x[i] + f.intercept)));
    return f;
}

const Event* find_event(const Trajectory& traj, EventKind k) {
    for (const auto& e : traj.events)
        if (e.kind == k) return &e;
    return nullptr;
}

} // namespace

const char* to_string(Kind k) {
    switch (k) {
        case Kind::Topological:    return "Topological";
        case Kind::NonTopological: return "NonTopological";
        case Kind::MixedULimit:    return "MixedULimit";
        case Kind::MixedVLimit:    return "MixedVLimit";
        case Kind::BlowUp:         return "BlowUp";
        case Kind::Undetermined:   return "Undetermined";
    }
    return "Undetermined";
}

bool is_trivial(const Trajectory& traj) {
    for (const auto& s : traj.samples)
        if (field_mag(s) >= kTrivialEps) return false;
    return true;
}

AsymptoticFit fit_log_slope(const Trajectory& traj, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction < 1.0))
        throw WindowTooShort("fit_log_slope: window_fraction outside (0,1)");
    if (traj.stop != StopReason::ReachedTMax)
        throw WindowTooShort("fit_log_slope: trajectory did not reach t_max");

    size_t begin = tail_begin_index(traj, window_fraction);
    // Sparse trajectories (big adaptive steps) may leave the fractional
    // window with too few points; fall back to the last three samples.
    if (traj.samples.size() - begin < 3) {
        if (traj.samples.size() < 3)
            throw WindowTooShort("fit_log_slope: fewer than three samples in the window");
        begin = traj.samples.size() - 3;
    }
    const size_t n = traj.samples.size() - begin;

    std::vector<double> ts(n), us(n), vs(n);
    for (size_t i = 0; i < n; ++i) {
        ts[i] = traj.samples[begin + i].t;
        us[i] = traj.samples[begin + i].u;
        vs[i] = traj.samples[begin + i].v;
    }
    const LineFit fu = fit_line(ts, us);
    const LineFit fv = fit_line(ts, vs);

    AsymptoticFit out;
    out.beta1 = -fu.slope;
    out.beta2 = -fv.slope;
    out.intercept1 = fu.intercept;
    out.intercept2 = fv.intercept;
    out.residual = std::max(fu.max_dev, fv.max_dev);
    out.t_lo = ts.front();
    out.t_hi = ts.back();
    const State& end = traj.samples.back();
    out.flagged = std::abs(out.beta1 - (-end.p)) > 0.05 || std::abs(out.beta2 - (-end.q)) > 0.05;
    return out;
}

Classification classify(const Trajectory& traj, const ClassifyTolerances& tol) {
    Classification out;
    if (traj.stop == StopReason::BlowUp) {
        out.kind = Kind::BlowUp;
        out.reason = traj.blowup_certified ? "certified blow-up" : "guard-only blow-up";
        return out;
    }
    if (traj.stop == StopReason::StepUnderflow) {
        out.kind = Kind::Undetermined;
        out.reason = "step underflow";
        return out;
    }
    if (is_trivial(traj)) {
        out.kind = Kind::Topological;
        out.reason = "identically zero";
        return out;
    }

    const Event* sum_slope = find_event(traj, EventKind::SumSlopeZero);
    auto sum_slope_verdict = [&](const char* context) {
        out.kind = Kind::Undetermined;
        out.reason = std::string(context) + " but r(u+v)_r changes sign at t=" +
                     std::to_string(sum_slope->t);
        return out;
    };

    if (traj.stop == StopReason::ConvergedTopological) {
        if (sum_slope) return sum_slope_verdict("converged to zero");
        out.kind = Kind::Topological;
        out.reason = "early convergence";
        return out;
    }

    // ReachedTMax from here on.
    const size_t begin = tail_begin_index(traj, tol.window_fraction);
    double tail_max = 0.0, first_half = 0.0, second_half = 0.0;
    const double t_mid = 0.5 * (traj.samples[begin].t + traj.t_end());
    for (size_t i = begin; i < traj.samples.size(); ++i) {
        const double m = field_mag(traj.samples[i]);
        tail_max = std::max(tail_max, m);
        if (traj.samples[i].t <= t_mid)
            first_half = std::max(first_half, m);
        else
            second_half = std::max(second_half, m);
    }
    const bool decaying = second_half <= first_half * 1.05 + 1e-15;
    if (tail_max < tol.top && decaying) {
        if (sum_slope) return sum_slope_verdict("topological tail");
        out.kind = Kind::Topological;
        out.reason = "tail within tolerance";
        return out;
    }

    AsymptoticFit fit;
    try {
        fit = fit_log_slope(traj, tol.window_fraction);
    } catch (const WindowTooShort&) {
        out.kind = Kind::Undetermined;
        out.reason = "horizon too short";
        return out;
    }
    out.fit = fit;
    const State& end = traj.samples.back();
    const double thr = 2.0 - tol.beta_margin;

    if (std::abs(end.u - kLogHalf) < tol.mixed && fit.beta2 > thr && end.v < tol.deep_tail) {
        out.kind = Kind::MixedULimit;
        out.reason = "u -> log(1/2), v divergent";
        return out;
    }
    if (std::abs(end.v - kLogHalf) < tol.mixed && fit.beta1 > thr && end.u < tol.deep_tail) {
        out.kind = Kind::MixedVLimit;
        out.reason = "v -> log(1/2), u divergent";
        return out;
    }
    if (fit.beta1 > thr && fit.beta2 > thr && end.u < tol.deep_tail && end.v < tol.deep_tail) {
        if (fit.flagged) {
            out.kind = Kind::Undetermined;
            out.reason = "beta estimators disagree";
            return out;
        }
        out.kind = Kind::NonTopological;
        out.reason = "both components logarithmically divergent";
        return out;
    }

    out.kind = Kind::Undetermined;
    const double bmin = std::min(fit.beta1, fit.beta2);
    if (bmin > 0.0 && bmin <= thr && end.u < 0.0 && end.v < 0.0)
        out.reason = "slope between 0 and 2";
    else
        out.reason = "horizon too short";
    return out;
}

double check_exponential_decay(const Trajectory& traj, const Classification& cls) {
    if (is_trivial(traj)) return 0.0;  // identically zero: degenerate

    // Closest approach to the topological state.
    size_t idx_min = 0;
    double m_min = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const double m = field_mag(traj.samples[i]);
        if (m < m_min) {
            m_min = m;
            idx_min = i;
        }
    }
    const bool witnessed = m_min < kWitnessEps;
    if (cls.kind != Kind::Topological && !witnessed)
        throw NotTopological("check_exponential_decay: not a topological approach");

    // Approach window: from the last time the fields were of size 1e-2 down
    // to the closest approach.
    size_t idx_start = 0;
    for (size_t i = idx_min; i-- > 0;) {
        if (field_mag(traj.samples[i]) >= 1e-2) {
            idx_start = i + 1;
            break;
        }
    }
    std::vector<double> rs, lms;
    for (size_t i = idx_start; i <= idx_min; ++i) {
        const double m = field_mag(traj.samples[i]);
        if (m > 1e-300) {
            rs.push_back(std::exp(traj.samples[i].t));
            lms.push_back(std::log(m));
        }
    }
    if (rs.size() < 3) throw WindowTooShort("check_exponential_decay: approach window too short");
    return fit_line(rs, lms).slope;
}

} // namespace csvortex
