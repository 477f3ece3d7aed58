#include "heatlab/radial_engine.hpp"

#include "heatlab/errors.hpp"
#include "heatlab/format.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heatlab {

namespace {

constexpr double kWindow = 12.0;  // Gaussian window half-width in units of sqrt(t)
constexpr double kAgreement = 1e-6;

AngularMethod resolve_method(AngularMethod m, int k) {
    if (m != AngularMethod::automatic) return m;
    switch (k) {
        case 1: return AngularMethod::closed_form_k1;
        case 2: return AngularMethod::closed_form_k2;
        case 3: return AngularMethod::closed_form_k3;
        default: return AngularMethod::generic_sphere_quadrature;
    }
}

// |y| limit of the integration region: profile support, then the optional user cutoff.
double outer_radius(const RadialProfile& g, const KernelConfig& cfg) {
    double R = std::numeric_limits<double>::infinity();
    if (g.support_radius()) R = *g.support_radius();
    if (cfg.r_quad) R = std::min(R, *cfg.r_quad);
    return R;
}

// e^{-z} int_{S^{k-1}} e^{z w.e} dw = |S^{k-2}| int_0^pi e^{z (cos phi - 1)} sin^{k-2} phi dphi.
double sphere_factor(int k, double z, int nodes) {
    const double area = quad::sphere_area(k - 1);
    auto f = [&](double phi) { return std::exp(z * (std::cos(phi) - 1.0)) * std::pow(std::sin(phi), k - 2); };
    if (z <= 0.0) return area * quad::integrate(f, 0.0, std::numbers::pi, nodes);
    // the integrand is concentrated in phi < O(1/sqrt z)
    const double cut = std::min(std::numbers::pi, 12.0 / std::sqrt(z));
    const double bp[] = {cut};
    return area * quad::integrate_pieces(f, 0.0, std::numbers::pi, bp, nodes);
}

double convolve_once(const RadialProfile& g, int k, double t, double r, const KernelConfig& cfg, AngularMethod method,
                     int nodes) {
    const double w = kWindow * std::sqrt(t);
    const double R = outer_radius(g, cfg);
    const double four_t = 4.0 * t;

    if (method == AngularMethod::closed_form_k1) {
        const double lo = std::max(r - w, -R);
        const double hi = std::min(r + w, R);
        std::vector<double> bp{0.0, r};
        for (double b : g.breakpoints()) {
            bp.push_back(b);
            bp.push_back(-b);
        }
        auto f = [&](double y) {
            const double d = r - y;
            return std::exp(-d * d / four_t) * g.value(std::abs(y));
        };
        return quad::integrate_pieces(f, lo, hi, bp, nodes) / std::sqrt(std::numbers::pi * four_t);
    }

    const double lo = std::max(0.0, r - w);
    const double hi = std::min(r + w, R);
    std::vector<double> bp(g.breakpoints().begin(), g.breakpoints().end());
    bp.push_back(r);

    if (method == AngularMethod::closed_form_k2) {
        if (k != 2) throw ParamError("closed_form_k2 requires k = 2");
        auto f = [&](double rho) {
            const double d = r - rho;
            return rho * g.value(rho) * std::exp(-d * d / four_t) * quad::bessel_i0_scaled(r * rho / (2.0 * t));
        };
        return quad::integrate_pieces(f, lo, hi, bp, nodes) / (2.0 * t);
    }
    if (method == AngularMethod::closed_form_k3) {
        if (k != 3) throw ParamError("closed_form_k3 requires k = 3");
        auto f = [&](double rho) {
            const double d = r - rho;
            const double z = r * rho / (2.0 * t);
            const double ang = z > 1e-12 ? -std::expm1(-2.0 * z) / z : 2.0 - 2.0 * z;
            return rho * rho * g.value(rho) * std::exp(-d * d / four_t) * ang;
        };
        return 2.0 * std::numbers::pi * quad::integrate_pieces(f, lo, hi, bp, nodes) *
               std::pow(std::numbers::pi * four_t, -1.5);
    }

    if (k < 2) throw ParamError("generic sphere quadrature requires k >= 2");
    auto f = [&](double rho) {
        const double d = r - rho;
        const double z = r * rho / (2.0 * t);
        return std::pow(rho, k - 1) * g.value(rho) * std::exp(-d * d / four_t) * sphere_factor(k, z, cfg.angular_nodes);
    };
    return quad::integrate_pieces(f, lo, hi, bp, nodes) * std::pow(std::numbers::pi * four_t, -0.5 * k);
}

}  // namespace

void KernelConfig::validate() const {
    if (nodes < 64) throw ParamError("KernelConfig: node count must be >= 64");
    if (angular_nodes < 64) throw ParamError("KernelConfig: angular node count must be >= 64");
    if (r_quad && !(*r_quad > 0.0)) throw ParamError("KernelConfig: radial cutoff must be positive");
}

void RadialField::validate() const {
    if (r.size() != values.size()) throw ParamError("RadialField: grid and values differ in length");
    if (r.size() < 3) throw ParamError("RadialField: need at least 3 radii");
    const double h = r[1] - r[0];
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double d = r[i] - r[i - 1];
        if (!(d > 0.0)) throw ParamError("RadialField: grid must be strictly increasing");
        if (std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(r[i]))) throw ParamError("RadialField: grid must be uniform");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFinite("RadialField: non-finite value");
    }
}

std::vector<double> uniform_r_grid(double r_max, int points) {
    if (!(r_max > 0.0) || points < 2) throw ParamError("uniform_r_grid: need r_max > 0 and at least 2 points");
    std::vector<double> r(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) r[static_cast<std::size_t>(i)] = r_max * i / (points - 1);
    return r;
}

double transport_solve(const RadialProfile& g, const ProblemSpec& spec, double t, double r) {
    return g.value(std::sqrt(2.0 * spec.k * t + r * r));
}

double quench_time(const RadialProfile& g, const ProblemSpec& spec) {
    if (!g.support_radius()) {
        throw UnsupportedProfile("quench_time: profile '" + g.name() + "' is not compactly supported");
    }
    const double rho = *g.support_radius();
    return rho * rho / (2.0 * spec.k);
}

double heat_convolve_k(const RadialProfile& g, int k, double t, double r, const KernelConfig& cfg) {
    cfg.validate();
    if (!(t > 0.0)) throw ParamError("heat_convolve_k: requires t > 0");
    if (k < 1) throw ParamError("heat_convolve_k: requires k >= 1");
    if (!(r >= 0.0)) throw ParamError("heat_convolve_k: requires r >= 0");
    const AngularMethod method = resolve_method(cfg.angular, k);
    if (method == AngularMethod::closed_form_k1 && k != 1) throw ParamError("closed_form_k1 requires k = 1");

    const double fine = convolve_once(g, k, t, r, cfg, method, cfg.nodes);
    const double coarse = convolve_once(g, k, t, r, cfg, method, cfg.nodes / 2);
    if (!std::isfinite(fine)) throw NonFinite("heat_convolve_k: non-finite result");
    if (std::abs(fine - coarse) > kAgreement * std::abs(fine) + 1e-13) {
        throw QuadratureUnderresolved("heat_convolve_k: " + std::to_string(cfg.nodes / 2) + " and " +
                                      std::to_string(cfg.nodes) + " nodes disagree at t=" + format_double(t) +
                                      ", r=" + format_double(r));
    }
    return fine;
}

RadialField transport_field(const RadialProfile& g, const ProblemSpec& spec, double t, std::span<const double> r_grid) {
    if (spec.sign != Sign::minus) throw ParamError("transport_field: the transport lift solves the minus flow");
    RadialField out{t, {r_grid.begin(), r_grid.end()}, {}, spec};
    out.values.reserve(r_grid.size());
    for (double r : r_grid) out.values.push_back(transport_solve(g, spec, t, r));
    return out;
}

RadialField convolve_field(const RadialProfile& g, const ProblemSpec& spec, double t, std::span<const double> r_grid,
                           const KernelConfig& cfg) {
    if (spec.sign != Sign::plus) throw ParamError("convolve_field: the convolution lift solves the plus flow");
    RadialField out{t, {r_grid.begin(), r_grid.end()}, std::vector<double>(r_grid.size()), spec};
    parallel_for(r_grid.size(), resolve_threads(cfg.threads),
                 [&](std::size_t i) { out.values[i] = heat_convolve_k(g, spec.k, t, r_grid[i], cfg); });
    return out;
}

ConvexityReport check_convexity_condition(std::span<const RadialField> series, double tol_rel) {
    ConvexityReport rep;
    for (const RadialField& f : series) {
        const double h = f.spacing();
        const std::size_t n = f.r.size();
        if (n < 3 || !(h > 0.0)) continue;
        double max_rr = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            max_rr = std::max(max_rr, std::abs(f.values[i + 1] - 2.0 * f.values[i] + f.values[i - 1]) / (h * h));
        }
        const double tol = tol_rel * std::max(1.0, max_rr);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double r = f.r[i];
            if (r < 2.0 * h) continue;
            const double rr = (f.values[i + 1] - 2.0 * f.values[i] + f.values[i - 1]) / (h * h);
            const double dr = (f.values[i + 1] - f.values[i - 1]) / (2.0 * h);
            const double margin = rr - dr / r;
            ++rep.cells_checked;
            rep.worst_margin = std::min(rep.worst_margin, margin);
            if (margin < -tol) rep.violations.push_back({f.t, r, margin});
        }
    }
    return rep;
}

ConvexityViolation convexity_margin_at(const RadialProfile& g, int k, double t, double r, const KernelConfig& cfg,
                                       std::optional<double> h) {
    if (!(r > 0.0)) throw ParamError("convexity_margin_at: requires r > 0");
    const double step = h.value_or(1e-3 * std::max(r, std::sqrt(t)));
    if (!(step > 0.0) || step >= r) throw ParamError("convexity_margin_at: step must lie in (0, r)");
    const double fm = heat_convolve_k(g, k, t, r - step, cfg);
    const double f0 = heat_convolve_k(g, k, t, r, cfg);
    const double fp = heat_convolve_k(g, k, t, r + step, cfg);
    const double rr = (fp - 2.0 * f0 + fm) / (step * step);
    const double dr = (fp - fm) / (2.0 * step);
    return {t, r, rr - dr / r};
}

double radial_mass(const RadialProfile& g, int k) {
    if (k < 1) throw ParamError("radial_mass: requires k >= 1");
    const double area = quad::sphere_area(k);
    auto f = [&](double rho) { return std::pow(rho, k - 1) * g.value(rho); };
    const auto& bp = g.breakpoints();
    if (g.support_radius()) return area * quad::integrate_pieces(f, 0.0, *g.support_radius(), bp, 4096);

    double R = 32.0;
    double prev = quad::integrate_pieces(f, 0.0, R, bp, 4096);
    for (int i = 0; i < 16; ++i) {
        const double tail = quad::integrate(f, R, 2.0 * R, 4096);
        const double next = prev + tail;
        if (!std::isfinite(next)) break;
        if (std::abs(tail) <= 1e-12 * std::abs(next)) return area * next;
        prev = next;
        R *= 2.0;
    }
    throw DivergentMass("radial_mass: integral of '" + g.name() + "' does not converge");
}

double convolved_mass(const RadialProfile& g, int k, double t, const KernelConfig& cfg, int radial_nodes) {
    const double reach = g.support_radius().value_or(32.0);
    const double R = reach + 14.0 * std::sqrt(t);
    auto f = [&](double rho) { return std::pow(rho, k - 1) * heat_convolve_k(g, k, t, rho, cfg); };
    return quad::sphere_area(k) * quad::integrate(f, 0.0, R, radial_nodes);
}

double asymptotic_profile_gap(const RadialProfile& g, int k, double t, const KernelConfig& cfg) {
    if (!(t > 0.0)) throw ParamError("asymptotic_profile_gap: requires t > 0");
    const double g0 = radial_mass(g, k);
    if (!(g0 > 0.0)) throw ParamError("asymptotic_profile_gap: profile mass must be positive");
    const double R = g.support_radius().value_or(0.0) + 10.0 * std::sqrt(t);
    const std::vector<double> r = uniform_r_grid(R, 401);
    std::vector<double> diff(r.size());
    parallel_for(r.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
        const double heat = g0 * std::pow(4.0 * std::numbers::pi * t, -0.5 * k) * std::exp(-r[i] * r[i] / (4.0 * t));
        diff[i] = std::abs(heat_convolve_k(g, k, t, r[i], cfg) - heat);
    });
    return std::pow(t, 0.5 * k) * *std::max_element(diff.begin(), diff.end());
}

void write_radial_csv(std::ostream& out, std::span<const RadialField> series) {
    out << "t,r,value\n";
    for (const RadialField& f : series) {
        const std::string t = format_double(f.t);
        for (std::size_t i = 0; i < f.r.size(); ++i) {
            out << t << ',' << format_double(f.r[i]) << ',' << format_double(f.values[i]) << '\n';
        }
    }
}

}  // namespace heatlab
