#include "csvortex/model.hpp"

#include <algorithm>
#include <cmath>

namespace csvortex {

double f1(double u, double v) {
    return std::exp(u) - 2.0 * std::exp(2.0 * u) + std::exp(u + v);
}

double f2(double u, double v) {
    return std::exp(v) - 2.0 * std::exp(2.0 * v) + std::exp(u + v);
}

double g(double x) {
    return std::exp(x) - 2.0 * std::exp(2.0 * x);
}

StateDeriv rhs_log(double t, const State& s) {
    const double worst = std::max({s.u, s.v, s.u + s.v});
    if (2.0 * t + worst > kExpGuard)
        throw BlowUpGuard{};
    const double e2t = std::exp(2.0 * t);
    const double a = f1(s.u, s.v);
    const double b = f2(s.u, s.v);
    return {s.p, s.q, e2t * (b - 2.0 * a), e2t * (a - 2.0 * b)};
}

std::array<double, 2> rhs_expanded(double u, double v) {
    const double eu = std::exp(u), ev = std::exp(v);
    const double e2u = std::exp(2.0 * u), e2v = std::exp(2.0 * v);
    const double euv = std::exp(u + v);
    return {-2.0 * eu + ev + 4.0 * e2u - 2.0 * e2v - euv,
            eu - 2.0 * ev - 2.0 * e2u + 4.0 * e2v - euv};
}

std::array<double, 2> scalar_rhs_log(double t, double u, double p) {
    if (2.0 * t + std::max(u, 2.0 * u) > kExpGuard)
        throw BlowUpGuard{};
    return {p, std::exp(2.0 * t) * (std::exp(2.0 * u) - std::exp(u))};
}

} // namespace csvortex
