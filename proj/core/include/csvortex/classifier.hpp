#ifndef CSVORTEX_CLASSIFIER_HPP
#define CSVORTEX_CLASSIFIER_HPP

#include <optional>
#include <string>

#include "csvortex/integrator.hpp"

namespace csvortex {

enum class Kind {
    Topological,     // (u, v) -> (0, 0)
    NonTopological,  // both components -> -inf with log slopes beta1, beta2 > 2
    MixedULimit,     // u -> log(1/2), v -> -inf
    MixedVLimit,
    BlowUp,
    Undetermined,
};

const char* to_string(Kind k);

// Negated tail slopes of u and v against t, with intercepts, the max
// absolute fit deviation over the window, and the window itself. flagged is
// set when the fitted slope and the endpoint slope -p (resp. -q) disagree by
// more than 0.05.
struct AsymptoticFit {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double intercept1 = 0.0;
    double intercept2 = 0.0;
    double residual = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    bool flagged = false;
};

struct ClassifyTolerances {
    double top = 1e-6;            // tail |u|,|v| bound for a topological verdict
    double mixed = 1e-4;          // endpoint |u - log(1/2)| bound for a mixed verdict
    double beta_margin = 0.05;    // slack below the strict beta > 2 bound
    double window_fraction = 0.3; // tail window as a fraction of the t-range
    double deep_tail = -5.0;      // divergent components must end below this
};

struct Classification {
    Kind kind = Kind::Undetermined;
    std::optional<AsymptoticFit> fit;
    std::string reason;
};

// Identically-zero trajectory (the trivial topological solution).
bool is_trivial(const Trajectory& traj);

// Least-squares line fit of u and v against t over the final
// window_fraction of the t-range. Requires stop == ReachedTMax.
// Throws WindowTooShort when the window has fewer than three samples
// or window_fraction is outside (0, 1).
AsymptoticFit fit_log_slope(const Trajectory& traj, double window_fraction = 0.3);

// The trichotomy decision procedure. Undetermined is a value carrying a
// machine-readable reason, never an error.
Classification classify(const Trajectory& traj, const ClassifyTolerances& tol = {});

// Fitted decay exponent of log max(|u|,|v|) against r (not t) over the
// approach window; negative for genuine topological decay. Returns 0 for the
// identically-zero solution. Accepts trajectories classified Topological and
// boundary trajectories whose closest approach to (0,0) passes the
// topological witness threshold; throws NotTopological otherwise.
double check_exponential_decay(const Trajectory& traj, const Classification& cls);

} // namespace csvortex

#endif
