#ifndef CSVORTEX_QUADRATURE_HPP
#define CSVORTEX_QUADRATURE_HPP

#include <array>
#include <functional>

#include "csvortex/integrator.hpp"

namespace csvortex {

// 15-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre15 {
    static constexpr std::array<double, 15> nodes = {
        -0.9879925180204854, -0.9372733924007059, -0.8482065834104272,
        -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
        -0.2011940939974345, 0.0,                 0.2011940939974345,
        0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
        0.8482065834104272,  0.9372733924007059,  0.9879925180204854};
    static constexpr std::array<double, 15> weights = {
        0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
        0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
        0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
        0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
        0.1071592204671719, 0.0703660474881081, 0.0307532419961173};
};

// Composite Gauss quadrature of f(state) dt over [t_a, t_b], with panels
// aligned to the accepted steps so steep blow-up tails stay resolved, each
// split further to at most span/min_panels wide. Evaluation goes through the
// dense output, independent of the integrator's own step acceptance.
double integrate_dense(const Trajectory& traj, const std::function<double(const State&)>& f,
                       double t_a, double t_b, int min_panels = 512);

} // namespace csvortex

#endif
