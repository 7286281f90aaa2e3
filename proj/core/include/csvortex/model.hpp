#ifndef CSVORTEX_MODEL_HPP
#define CSVORTEX_MODEL_HPP

#include <array>
#include <stdexcept>

namespace csvortex {

// Vortex multiplicities (N1, N2) of the Dirac source at the origin.
// The coupling constant is fixed at k = 1; multiplicities may be any
// nonnegative reals.
struct Params {
    double n1 = 0.0;
    double n2 = 0.0;
};

// Log-amplitudes (u, v) of the two field components. Values must be finite;
// -inf limits are classification outcomes, never stored states.
struct FieldPair {
    double u = 0.0;
    double v = 0.0;
};

// Phase-space point in log-radius coordinates: t = ln r, p = r u_r, q = r v_r.
struct State {
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
    double p = 0.0;
    double q = 0.0;
};

// d/dt of (u, v, p, q).
using StateDeriv = std::array<double, 4>;

// Signalled by the right-hand sides when an exp argument would overflow.
// The integrator treats a trip as blow-up evidence, not as an error.
struct BlowUpGuard : std::runtime_error {
    BlowUpGuard() : std::runtime_error("exp-argument overflow guard") {}
};

// Guard ceiling on exponent arguments, just under double-precision exp overflow.
inline constexpr double kExpGuard = 700.0;

inline constexpr double kLogHalf    = -0.69314718055994530941723212145818;  // log(1/2)
inline constexpr double kLogQuarter = 2.0 * kLogHalf;                       // log(1/4)

// f1(u,v) = e^u - 2e^{2u} + e^{u+v}.  e^{2u} is evaluated as exp(2u), never
// exp(u)^2, so the swap and difference identities hold to machine precision.
double f1(double u, double v);
inline double f1(FieldPair w) { return f1(w.u, w.v); }

// f2(u,v) = e^v - 2e^{2v} + e^{u+v}, the u<->v mirror of f1.
double f2(double u, double v);
inline double f2(FieldPair w) { return f2(w.u, w.v); }

// g(x) = e^x - 2e^{2x}. Increasing up to log(1/4), max 1/8 there, root at
// log(1/2); controls every sign argument in the classification checks.
double g(double x);

// System right-hand side in t = ln r:
//   u' = p,  p' = e^{2t} (f2 - 2 f1),  v' = q,  q' = e^{2t} (f1 - 2 f2).
// Throws BlowUpGuard when 2t + max(u, v, u+v) > kExpGuard.
StateDeriv rhs_log(double t, const State& s);

// Expanded right-hand sides of the system taken termwise from the elliptic
// form; used only as an algebraic cross-check against (f2-2f1, f1-2f2).
std::array<double, 2> rhs_expanded(double u, double v);
inline std::array<double, 2> rhs_expanded(FieldPair w) { return rhs_expanded(w.u, w.v); }

// Scalar u = v reduction:  u' = p,  p' = e^{2t} (e^{2u} - e^u).
// Same overflow guard as rhs_log.
std::array<double, 2> scalar_rhs_log(double t, double u, double p);

} // namespace csvortex

#endif
