#ifndef CSVORTEX_SEED_HPP
#define CSVORTEX_SEED_HPP

#include <cmath>

#include "csvortex/model.hpp"

namespace csvortex {

// Shooting parameters (alpha1, alpha2): the additive constants in
// u = 2 N1 log r + alpha1 + o(1), v = 2 N2 log r + alpha2 + o(1) near r = 0.
struct InitialData {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

// Accurate phase-space state at a small radius r0 = e^{t0}, produced by
// Picard iteration on the integral form of the system. correction_bound is
// the sup-difference between the last two Picard iterates on (0, r0], an
// a-posteriori certificate for the truncation of the local expansion.
struct SeedState {
    double t0 = 0.0;
    double u = 0.0;
    double v = 0.0;
    double p = 0.0;
    double q = 0.0;
    double correction_bound = 0.0;
    InitialData alpha{std::nan(""), std::nan("")};  // provenance, when seeded from (alpha1, alpha2)
};

// Picard-iterated seed at r0. Iterate 0 is the bare singular part
// (2N log r + alpha, p = 2N); iterate k+1 applies the double integral of
// s(f2-2f1), s(f1-2f2), evaluated by product integration on an adaptively
// refined grid over (0, r0].
// Throws QuadratureFailure when the quadrature does not converge under
// refinement, which signals that r0 is too large for the expansion.
SeedState seed(const Params& params, const InitialData& alpha, double r0 = 1e-3,
               int iterations = 2);

// Consistency check: seed at r0 and at r0_alt (default r0/2), integrate the
// inner seed out to r0 and compare. True when the states agree within
// 10 x correction_bound (plus a small integration-error floor).
bool seed_self_test(const Params& params, const InitialData& alpha, double r0 = 1e-3,
                    double r0_alt = 0.0);

} // namespace csvortex

#endif
