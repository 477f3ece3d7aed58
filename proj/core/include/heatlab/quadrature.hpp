#pragma once

#include <functional>
#include <span>
#include <vector>

namespace heatlab::quad {

/// Order of the Gauss-Legendre rule used on every composite panel.
inline constexpr int kPanelOrder = 16;

struct Rule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Composite Gauss-Legendre over [a, b] with roughly `nodes` evaluation points.
double integrate(const std::function<double(double)>& f, double a, double b, int nodes);

/// Composite Gauss-Legendre over [a, b] split at every breakpoint strictly inside
/// (a, b). Panels are allotted to pieces in proportion to their length, at least
/// one each, so kinks and jumps at breakpoints do not spoil the rule.
/// The summation order is fixed, so results are bitwise reproducible.
double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breakpoints, int nodes);

/// Surface area of the unit sphere S^{d-1} in R^d, 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// Exponentially scaled modified Bessel function e^{-x} I_0(x), x >= 0.
double bessel_i0_scaled(double x);

}  // namespace heatlab::quad
