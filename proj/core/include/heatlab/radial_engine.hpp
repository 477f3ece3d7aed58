#pragma once

#include "heatlab/radial_profile.hpp"
#include "heatlab/spectral.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace heatlab {

enum class AngularMethod {
    automatic,  // closed form for k <= 3, sphere quadrature above
    closed_form_k1,
    closed_form_k2,
    closed_form_k3,
    generic_sphere_quadrature
};

struct KernelConfig {
    int nodes = 2048;               // quadrature nodes along the radial axis
    std::optional<double> r_quad;   // |y| cutoff; default: support + 12 sqrt(t)
    AngularMethod angular = AngularMethod::automatic;
    int angular_nodes = 256;        // only for generic_sphere_quadrature
    int threads = 1;                // used by the field-level helpers

    /// ParamError unless nodes >= 64, angular_nodes >= 64 and r_quad > 0.
    void validate() const;
};

/// psi(t, r) sampled on a uniform grid r_0 = 0 < r_1 < ... < r_max.
struct RadialField {
    double t = 0.0;
    std::vector<double> r;
    std::vector<double> values;
    ProblemSpec spec;

    double spacing() const { return r.size() > 1 ? r[1] - r[0] : 0.0; }
    /// ParamError on size mismatch, non-increasing or non-uniform grid, non-finite values.
    void validate() const;
};

/// Uniform grid of `points` radii on [0, r_max].
std::vector<double> uniform_r_grid(double r_max, int points);

/// g(sqrt(2kt + r^2)): the radial P_k^- flow transports the profile inward.
double transport_solve(const RadialProfile& g, const ProblemSpec& spec, double t, double r);

/// rho^2 / (2k): the time after which the transported profile vanishes identically.
/// UnsupportedProfile when g has no known support radius.
double quench_time(const RadialProfile& g, const ProblemSpec& spec);

/// psi(t, r) = (4 pi t)^{-k/2} int_{R^k} e^{-|r w - y|^2/(4t)} g(|y|) dy.
/// QuadratureUnderresolved when the n/2- and n-node results disagree by more
/// than 1e-6 relative.
double heat_convolve_k(const RadialProfile& g, int k, double t, double r, const KernelConfig& cfg = {});

/// Transport lift of g on a grid (sign must be minus).
RadialField transport_field(const RadialProfile& g, const ProblemSpec& spec, double t, std::span<const double> r_grid);
/// Convolution lift of g on a grid (sign must be plus), parallel over radii.
RadialField convolve_field(const RadialProfile& g, const ProblemSpec& spec, double t, std::span<const double> r_grid,
                           const KernelConfig& cfg = {});

struct ConvexityViolation {
    double t;
    double r;
    double margin;  // psi_rr - psi_r / r
};

struct ConvexityReport {
    std::vector<ConvexityViolation> violations;
    double worst_margin = 0.0;      // most negative margin seen (0 if none negative)
    std::size_t cells_checked = 0;

    bool certified() const noexcept { return violations.empty(); }
};

/// Flags cells where psi_rr - psi_r/r < -tol, tol = tol_rel * max(1, max|psi_rr|)
/// per snapshot. Three-point stencils; cells with r < 2h are skipped.
ConvexityReport check_convexity_condition(std::span<const RadialField> series, double tol_rel = 1e-7);

/// Same test at one point using a local stencil of spacing h on the exact
/// convolution (h defaults to 1e-3 * max(r, sqrt(t))).
ConvexityViolation convexity_margin_at(const RadialProfile& g, int k, double t, double r, const KernelConfig& cfg = {},
                                       std::optional<double> h = std::nullopt);

/// int_{R^k} g(|x|) dx. DivergentMass when the tail integral does not settle.
double radial_mass(const RadialProfile& g, int k);

/// int_{R^k} psi(t, |x|) dx by radial quadrature of the convolution.
double convolved_mass(const RadialProfile& g, int k, double t, const KernelConfig& cfg = {}, int radial_nodes = 256);

/// t^{k/2} sup_r |psi(t, r) - g0 (4 pi t)^{-k/2} e^{-r^2/(4t)}| with g0 the mass of g.
double asymptotic_profile_gap(const RadialProfile& g, int k, double t, const KernelConfig& cfg = {});

/// CSV with header `t,r,value`, one row per sample.
void write_radial_csv(std::ostream& out, std::span<const RadialField> series);

}  // namespace heatlab
