#ifndef CSVORTEX_OMEGA_HPP
#define CSVORTEX_OMEGA_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csvortex/classifier.hpp"
#include "csvortex/integrator.hpp"

namespace csvortex {

// Rectangular grid of shooting parameters (alpha1, alpha2).
struct GridSpec {
    double alpha1_lo = -8.0, alpha1_hi = 2.0;
    double alpha2_lo = -8.0, alpha2_hi = 2.0;
    int n1 = 41, n2 = 41;  // both must be >= 2
};

struct ScanOpts {
    double r0 = 1e-3;
    int picard_iterations = 2;
    IntegrateOpts integ{};
    ClassifyTolerances ctol{};
    int threads = 0;                 // 0 = hardware concurrency
    bool retry_undetermined = true;  // one re-run at doubled horizon per point
};

// Per-point verdict; betas and residual are NaN when no fit was produced.
struct PointResult {
    Kind kind = Kind::Undetermined;
    double beta1 = std::nan("");
    double beta2 = std::nan("");
    double residual = std::nan("");
    std::string reason;
};

// Verdict matrix over the grid, row-major with alpha1 varying fastest.
struct OmegaMap {
    Params params;
    GridSpec grid;
    std::vector<PointResult> points;

    double alpha1_at(int i) const {
        return grid.alpha1_lo + i * (grid.alpha1_hi - grid.alpha1_lo) / (grid.n1 - 1);
    }
    double alpha2_at(int j) const {
        return grid.alpha2_lo + j * (grid.alpha2_hi - grid.alpha2_lo) / (grid.n2 - 1);
    }
    const PointResult& at(int i, int j) const { return points[size_t(j) * grid.n1 + i]; }
};

// Bisection-refined point of the boundary of Omega along a segment.
struct BoundaryPoint {
    InitialData alpha;           // final midpoint
    double bracket_width = 0.0;  // Euclidean length of the final bracket
    Kind inside_kind = Kind::NonTopological;
    Kind outside_kind = Kind::Undetermined;
    Kind boundary_kind = Kind::Undetermined;
    double beta1 = std::nan("");
    double beta2 = std::nan("");
    bool anomaly = false;  // non-entire verdict survived at the tightest bracket
    std::string note;
};

// Seed, integrate and classify one shooting point.
std::pair<Trajectory, Classification> solve_point(const Params& params, const InitialData& alpha,
                                                  const ScanOpts& opts = {});

// Classify every grid point. Deterministic regardless of the worker count;
// per-point Undetermined is recorded, never raised.
OmegaMap scan(const Params& params, const GridSpec& grid, const ScanOpts& opts = {});

// Bisect from a NonTopological inside point to a non-NonTopological outside
// point until the bracket is below tol. The midpoint is re-classified at a
// doubled horizon; when the raw verdict is not entire (the shooting saddle
// makes that generic at any finite bracket), a fixed-point witness on the
// midpoint trajectory decides between Topological and Mixed, and anything
// else is reported as an anomaly. Throws BadBracket on bad endpoints.
BoundaryPoint bisect_boundary(const Params& params, const InitialData& inside,
                              const InitialData& outside, double tol,
                              const ScanOpts& opts = {});

// Scalar u = v reduction run with the same seeding and classification
// machinery; the independent route for every diagonal check.
std::pair<Trajectory, Classification> scalar_oracle(double n, double alpha,
                                                    const ScanOpts& opts = {});

// Diagonal bisection in alpha between non-topological and blow-up behavior
// of the scalar reduction; returns the boundary alpha* within tol.
double scalar_boundary_alpha(double n, double alpha_lo, double alpha_hi, double tol,
                             const ScanOpts& opts = {});

// Fraction of k points on the circle of the given radius around a
// NonTopological center that still classify NonTopological (1.0 when the
// openness of Omega holds at this scale). Throws BadCenter when the center
// is not NonTopological.
double openness_probe(const Params& params, const InitialData& center, double radius, int k,
                      const ScanOpts& opts = {});

// CSV with header alpha1,alpha2,kind,beta1,beta2,residual.
std::string to_csv(const OmegaMap& map);
nlohmann::json to_json(const OmegaMap& map);
nlohmann::json to_json(const BoundaryPoint& bp);

} // namespace csvortex

#endif
