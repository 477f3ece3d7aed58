#include "heatlab/radial_profile.hpp"

#include "heatlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heatlab {

RadialProfile RadialProfile::closed_form(std::string name, ScalarFunction f, std::optional<double> support_radius,
                                         std::vector<double> breakpoints) {
    if (!f.value || !f.d1 || !f.d2) throw ParamError("RadialProfile: closed form needs value, d1 and d2");
    if (support_radius && !(*support_radius > 0.0)) throw ParamError("RadialProfile: support radius must be positive");
    RadialProfile p;
    p.name_ = std::move(name);
    p.fn_ = std::move(f);
    p.support_ = support_radius;
    p.breakpoints_ = std::move(breakpoints);
    if (support_radius) p.breakpoints_.push_back(*support_radius);
    std::sort(p.breakpoints_.begin(), p.breakpoints_.end());
    p.breakpoints_.erase(std::unique(p.breakpoints_.begin(), p.breakpoints_.end()), p.breakpoints_.end());
    return p;
}

RadialProfile RadialProfile::table(std::string name, std::vector<double> r, std::vector<double> values) {
    if (r.size() != values.size() || r.size() < 3) {
        throw ParamError("RadialProfile::table: need at least 3 (r, value) pairs of equal length");
    }
    if (r.front() != 0.0) throw ParamError("RadialProfile::table: grid must start at r = 0");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1])) throw ParamError("RadialProfile::table: grid must be strictly increasing");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFinite("RadialProfile::table: non-finite value");
    }

    auto t = std::make_shared<Table>();
    const std::size_t n = r.size();
    t->g1.assign(n, 0.0);
    t->g2.assign(n, 0.0);
    // g'(0) = 0 by evenness; mirrored three-point stencil for g''(0).
    t->g2[0] = 2.0 * (values[1] - values[0]) / (r[1] * r[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = r[i] - r[i - 1];
        const double hr = r[i + 1] - r[i];
        const double gl = values[i - 1];
        const double gc = values[i];
        const double gr = values[i + 1];
        t->g1[i] = (-hr / (hl * (hl + hr))) * gl + ((hr - hl) / (hl * hr)) * gc + (hl / (hr * (hl + hr))) * gr;
        t->g2[i] = 2.0 * (gl / (hl * (hl + hr)) - gc / (hl * hr) + gr / (hr * (hl + hr)));
    }
    // one-sided at the far end
    t->g1[n - 1] = (values[n - 1] - values[n - 2]) / (r[n - 1] - r[n - 2]);
    t->g2[n - 1] = t->g2[n - 2];
    t->r = std::move(r);
    t->g = std::move(values);

    RadialProfile p;
    p.name_ = std::move(name);
    p.table_ = std::move(t);
    return p;
}

double RadialProfile::Table::interpolate(const std::vector<double>& column, double x) const {
    if (x <= r.front()) return column.front();
    if (x >= r.back()) return column.back();
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin());
    const double w = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return (1.0 - w) * column[i - 1] + w * column[i];
}

double RadialProfile::value(double r) const {
    if (table_) return table_->interpolate(table_->g, r);
    return fn_.value(r);
}

double RadialProfile::d1(double r) const {
    if (table_) return r >= table_->r.back() ? 0.0 : table_->interpolate(table_->g1, r);
    return fn_.d1(r);
}

double RadialProfile::d2(double r) const {
    if (table_) return r >= table_->r.back() ? 0.0 : table_->interpolate(table_->g2, r);
    return fn_.d2(r);
}

namespace profiles {

namespace {
void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParamError(std::string(what) + " must be positive and finite");
}
}  // namespace

RadialProfile light_gaussian(double mu, int k) {
    require_positive(mu, "light_gaussian: mu");
    if (k < 1) throw ParamError("light_gaussian: k must be >= 1");
    const double w = 2.0 * k;
    return RadialProfile::closed_form(
        "light_gaussian",
        {[=](double s) { return mu * std::exp(-s * s / w); },
         [=](double s) { return -2.0 * s / w * mu * std::exp(-s * s / w); },
         [=](double s) { return (-2.0 / w + 4.0 * s * s / (w * w)) * mu * std::exp(-s * s / w); }});
}

RadialProfile heat_gaussian(double a, int k) {
    require_positive(a, "heat_gaussian: a");
    if (k < 1) throw ParamError("heat_gaussian: k must be >= 1");
    const double c = std::pow(4.0 * std::numbers::pi * a, -0.5 * k);
    const double w = 4.0 * a;
    return RadialProfile::closed_form(
        "heat_gaussian",
        {[=](double s) { return c * std::exp(-s * s / w); },
         [=](double s) { return -2.0 * s / w * c * std::exp(-s * s / w); },
         [=](double s) { return (-2.0 / w + 4.0 * s * s / (w * w)) * c * std::exp(-s * s / w); }});
}

RadialProfile cap(double eps, double amplitude) {
    require_positive(eps, "cap: eps");
    require_positive(amplitude, "cap: amplitude");
    const double e2 = eps * eps;
    return RadialProfile::closed_form(
        "cap",
        {[=](double s) { return s < eps ? amplitude * (e2 - s * s) : 0.0; },
         [=](double s) { return s < eps ? -2.0 * amplitude * s : 0.0; },
         [=](double s) { return s < eps ? -2.0 * amplitude : 0.0; }},
        eps);
}

RadialProfile quenching_bump() {
    // g = e^{1/(s-1)}; with y = s - 1 < 0: g' = -g / y^2, g'' = g (1 + 2y) / y^4.
    return RadialProfile::closed_form(
        "quenching",
        {[](double s) { return s < 1.0 ? std::exp(1.0 / (s - 1.0)) : 0.0; },
         [](double s) {
             if (s >= 1.0) return 0.0;
             const double y = s - 1.0;
             return -std::exp(1.0 / y) / (y * y);
         },
         [](double s) {
             if (s >= 1.0) return 0.0;
             const double y = s - 1.0;
             return std::exp(1.0 / y) * (1.0 + 2.0 * y) / (y * y * y * y);
         }},
        1.0);
}

RadialProfile step(double radius) {
    require_positive(radius, "step: radius");
    return RadialProfile::closed_form(
        "step",
        {[=](double s) { return s < radius ? 1.0 : 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }},
        radius);
}

RadialProfile algebraic(double mu, double eps, double beta) {
    require_positive(mu, "algebraic: mu");
    require_positive(eps, "algebraic: eps");
    require_positive(beta, "algebraic: beta");
    return RadialProfile::closed_form(
        "algebraic",
        {[=](double s) { return mu * std::pow(eps + s * s, -beta); },
         [=](double s) { return -2.0 * beta * s * mu * std::pow(eps + s * s, -beta - 1.0); },
         [=](double s) {
             const double q = eps + s * s;
             return mu * (-2.0 * beta * std::pow(q, -beta - 1.0) +
                          4.0 * beta * (beta + 1.0) * s * s * std::pow(q, -beta - 2.0));
         }});
}

RadialProfile exp_decay(double mu) {
    require_positive(mu, "exp_decay: mu");
    return RadialProfile::closed_form(
        "exp_decay",
        {[=](double s) { return mu * std::exp(-s); }, [=](double s) { return -mu * std::exp(-s); },
         [=](double s) { return mu * std::exp(-s); }},
        std::nullopt, {0.0});
}

RadialProfile constant(double c) {
    return RadialProfile::closed_form(
        "constant", {[=](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }});
}

}  // namespace profiles

}  // namespace heatlab
