#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heatlab {

/// Scalar function of one variable with first and second derivatives.
struct ScalarFunction {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

/// A function g of r >= 0, given either in closed form (value and two
/// derivatives) or as a sampled table with finite-difference derivatives.
///
/// Table profiles are treated as even in r: g'(0) = 0 and g''(0) uses the
/// mirrored stencil 2 (g_1 - g_0) / r_1^2. Between nodes the value and the
/// nodal derivatives are interpolated linearly; beyond the last node the
/// profile is continued by its last value.
class RadialProfile {
public:
    static RadialProfile closed_form(std::string name, ScalarFunction f,
                                     std::optional<double> support_radius = std::nullopt,
                                     std::vector<double> breakpoints = {});
    static RadialProfile table(std::string name, std::vector<double> r, std::vector<double> values);

    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;

    const std::string& name() const noexcept { return name_; }
    /// Radius outside of which the profile vanishes identically, when known.
    std::optional<double> support_radius() const noexcept { return support_; }
    /// Radii where the profile is not smooth (kinks, jumps); quadratures split there.
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    bool is_table() const noexcept { return table_ != nullptr; }

private:
    struct Table {
        std::vector<double> r;
        std::vector<double> g;
        std::vector<double> g1;
        std::vector<double> g2;
        double interpolate(const std::vector<double>& column, double x) const;
    };

    RadialProfile() = default;

    std::string name_;
    ScalarFunction fn_;
    std::shared_ptr<const Table> table_;
    std::optional<double> support_;
    std::vector<double> breakpoints_;
};

/// Named radial profiles used across the catalog, the reductions and the Fujita runs.
namespace profiles {

/// mu e^{-s^2/(2k)}; satisfies g'' - g'/s >= 0 and transports to mu e^{-t} e^{-|x|^2/(2k)}.
RadialProfile light_gaussian(double mu, int k);
/// (4 pi a)^{-k/2} e^{-s^2/(4a)}: the k-dimensional heat kernel at time a.
RadialProfile heat_gaussian(double a, int k);
/// amplitude * (eps^2 - s^2)_+.
RadialProfile cap(double eps, double amplitude = 1.0);
/// e^{1/(s-1)} on [0,1), 0 beyond: smooth, compactly supported in the unit ball.
RadialProfile quenching_bump();
/// Indicator of (0, radius).
RadialProfile step(double radius = 1.0);
/// mu / (eps + s^2)^beta.
RadialProfile algebraic(double mu, double eps, double beta);
/// mu e^{-s}.
RadialProfile exp_decay(double mu);
RadialProfile constant(double c);

}  // namespace profiles

}  // namespace heatlab
