#ifndef CSVORTEX_INTEGRATOR_HPP
#define CSVORTEX_INTEGRATOR_HPP

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "csvortex/model.hpp"
#include "csvortex/seed.hpp"

namespace csvortex {

enum class StopReason {
    ReachedTMax,
    BlowUp,
    ConvergedTopological,
    StepUnderflow,  // controller drove the step below h_min without a guard trip
};

enum class EventKind {
    Intersection,    // u = v
    F1Zero,
    F2Zero,
    UExtremum,       // p = 0
    VExtremum,       // q = 0
    ULogHalfCross,   // u = log(1/2)
    VLogHalfCross,
    SumSlopeZero,    // p + q = 0, i.e. r(u+v)_r = 0
};

struct Event {
    EventKind kind;
    double t;
    State state;
};

struct IntegrateOpts {
    double t_max = std::log(1e6);
    double rtol = 1e-10;
    double atol = 1e-12;
    double blowup_ceiling = 50.0;   // u or v above this stops the run as BlowUp
    double converge_eps = 1e-12;    // early-stop threshold on |u|,|v|,|p|,|q|
    double event_flank = 1e-11;     // sign changes need |phi| above this on both flanks
    double event_loc_tol = 1e-10;   // bisection target on |phi|
    double h_min = 1e-14;
    double max_field_step = 0.04;   // reject steps moving u or v by more than this; keeps
                                    // dense output accurate through blow-up spikes
    bool scalar_reduction = false;  // advance with the u = v scalar RHS (oracle route)
};

// Dense-output coefficients of one accepted Dormand-Prince step; evaluates a
// 4th-order interpolant for theta in [0, 1].
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<std::array<double, 4>, 5> c{};  // c[k][component]

    std::array<double, 4> eval(double theta) const {
        const double om = 1.0 - theta;
        std::array<double, 4> y;
        for (int i = 0; i < 4; ++i)
            y[i] = c[0][i] + theta * (c[1][i] + om * (c[2][i] + theta * (c[3][i] + om * c[4][i])));
        return y;
    }
};

// Immutable record of one integration: accepted samples (strictly increasing
// in t), localized events, dense-output segments, and why it stopped.
struct Trajectory {
    Params params;
    InitialData alpha;
    std::vector<State> samples;
    std::vector<Event> events;
    StopReason stop = StopReason::ReachedTMax;
    std::vector<DenseSegment> dense;  // one per accepted step
    bool blowup_certified = false;    // a sample met the finite-time blow-up hypotheses
    double first_certified_t = std::nan("");

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }
};

// Advance from the seed with an adaptive embedded Runge-Kutta 5(4) pair.
// Stops at t_max, at the blow-up ceiling or exponent guard, on early
// topological convergence, or with StepUnderflow as a last resort.
Trajectory integrate(const SeedState& seed, const Params& params,
                     const IntegrateOpts& opts = {});

// Finite-time blow-up certificate. True when the state (or its u<->v mirror)
// satisfies one of the two sufficient hypotheses:
//   (1) u = v > 0 (|u-v| < 1e-12), r u_r > 0 and r(u-v)_r > 0;
//   (2) u > v, u > 0 and r u_r > 0.
bool certify_blowup(const State& s);

// Dense-output states at the requested times. Throws OutOfRange when a grid
// point is outside the sampled range.
std::vector<State> resample(const Trajectory& traj, std::span<const double> t_grid);

// Single dense-output state; exact stored sample when t matches one.
State sample_at(const Trajectory& traj, double t);

} // namespace csvortex

#endif
