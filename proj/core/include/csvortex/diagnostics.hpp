#ifndef CSVORTEX_DIAGNOSTICS_HPP
#define CSVORTEX_DIAGNOSTICS_HPP

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csvortex/classifier.hpp"
#include "csvortex/integrator.hpp"

namespace csvortex {

// Quantitative conformance record of one trajectory against the structural
// results it should satisfy. Serialized flat; field names are stable.
struct DiagnosticsReport {
    double pohozaev_max_rel_residual = 0.0;
    std::array<double, 3> identity_residuals{};      // I1, I2, I3
    int intersection_count = 0;
    std::optional<double> last_intersection_t;
    std::optional<double> apriori_R0;                // radius; none if violated at the horizon
    bool negativity_ok = true;
    std::optional<double> f_positive_tail_t;         // onset radius of f1, f2 > 0
    std::optional<double> nontop_inequality_margin;
    std::array<double, 2> tail_integrals{};          // int s f_i ds over the final decade
    bool condition_star_flag = false;
};

// Relative Pohozaev residual |LHS - RHS| / (1 + |RHS|) at radius r. The
// volume integral combines the closed-form (0, r0] seed segment with
// composite Gauss quadrature on the dense output.
double pohozaev_residual(const Trajectory& traj, double r, int min_panels = 512);

// Residuals at increasing times t_checkpoints, sharing one cumulative
// volume integral.
std::vector<double> pohozaev_residuals(const Trajectory& traj,
                                       std::span<const double> t_checkpoints,
                                       int min_panels = 512);

// Max Pohozaev residual over log-spaced checkpoints across the sampled range.
double pohozaev_max_residual(const Trajectory& traj, int checkpoints = 10);

// Residuals of the three conserved combinations
//   I1 = p + 2q + 3 int s f2 ds,  I2 = 2p + q + 3 int s f1 ds,
//   I3 = p - q - 3 int s (f2 - f1) ds,
// measured as the max drift from the initial value over log-spaced
// checkpoints, relative to the largest term magnitude (floored at 1).
std::array<double, 3> identity_residuals(const Trajectory& traj, int checkpoints = 10);

// Count of u = v intersection events and the last crossing time.
std::pair<int, std::optional<double>> intersection_census(const Trajectory& traj);

// Smallest sampled radius after which max(u, v) < log(1/2) holds through the
// end; none when violated at the horizon. Requires a non-blow-up trajectory.
std::optional<double> apriori_bound(const Trajectory& traj);

// Margin of the non-topological decay inequality
//   beta1^2 + beta1 beta2 + beta2^2 - 4(N1^2 + N1 N2 + N2^2)
//     - 6(2(N1 + N2) + beta1 + beta2);
// positive for a conforming fit.
double nontop_inequality(const AsymptoticFit& fit, const Params& params);

// Smallest sampled radius beyond which f1 > 0 and f2 > 0 through the end.
// Throws WrongKind unless the trajectory is NonTopological or Mixed.
std::optional<double> f_positive_tail(const Trajectory& traj, const Classification& cls);

// True when the tail shows one component decreasing to log(1/2) while the
// other decreases below -5: a configuration excluded by theory, so a true
// return is a loud anomaly (or a synthetic detector test).
bool condition_star_scan(const Trajectory& traj);

// (int s f1 ds, int s f2 ds) over the final decade of r.
std::array<double, 2> tail_integrability(const Trajectory& traj);

// True iff u < 0 and v < 0 (with 1e-10 slack) at every sample beyond the
// first; the identically-zero solution passes by exemption.
bool negativity_check(const Trajectory& traj);

DiagnosticsReport build_report(const Trajectory& traj, const Classification& cls);

nlohmann::json to_json(const DiagnosticsReport& rep);

} // namespace csvortex

#endif
