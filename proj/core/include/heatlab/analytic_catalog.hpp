#pragma once

#include "heatlab/radial_profile.hpp"
#include "heatlab/spectral.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace heatlab {

/// Closed-form solution families of du/dt = P_k^{+-} u (+ u^{1+p}).
namespace family {

/// u = phi(x_axis), phi convex: solves the minus flow (k < N).
struct OneVarConvex {
    int axis = 0;
    std::string phi_name;
    ScalarFunction phi;
};

/// u = phi(x_axis), phi concave: solves the plus flow (k < N).
struct OneVarConcave {
    int axis = 0;
    std::string phi_name;
    ScalarFunction phi;
};

/// u = alpha -+ beta e^{-c (x_axis - c t)}; the sign of the operator picks the branch.
struct TravellingWave {
    int axis = 0;
    double alpha = 0.0;
    double beta = 1.0;
    double c = 1.0;
};

/// u = F_k(A) t + 1/2 A (x - x0).(x - x0) + (x - x0).y + C, with D^2 u = A.
struct Polynomial {
    SymMatrix A{2};
    std::vector<double> x0;
    std::vector<double> y;
    double C = 0.0;
    double rate = 0.0;  // F_k^{+-}(A)
};

/// u = mu (|x|^2 + 2kt + eps)^{-beta}.
struct SelfSimilarMinus {
    double beta = 1.0;
    double mu = 1.0;
    double eps = 0.0;
};

/// u = mu t^{-k/2} e^{-|x|^2/(4t)}, t > 0.
struct GaussianPlus {
    double mu = 1.0;
};

/// u = (4 pi (a + t))^{-k/2} e^{-|x|^2/(4(a + t))}.
struct ShiftedGaussianPlus {
    double a = 1.0;
};

/// u = g(sqrt(2kt + |x|^2)) for a profile with g'' - g'/s >= 0.
struct RadialTransportMinus {
    RadialProfile g;
};

/// u = mu e^{-t} e^{-|x|^2/(2k)}.
struct SeparatedExponentialMinus {
    double mu = 1.0;
};

/// Transport of the bump e^{1/(s-1)} 1_{s<1}; vanishes identically once 2kt >= 1.
struct QuenchingProfileMinus {};

/// u = (2k / (p (mu + |x|^2)))^{1/p}, stationary for du/dt = P_k^- u + u^{1+p}.
struct StationaryMinus {
    double p = 1.0;
    double mu = 1.0;
};

}  // namespace family

using Family = std::variant<family::OneVarConvex, family::OneVarConcave, family::TravellingWave, family::Polynomial,
                            family::SelfSimilarMinus, family::GaussianPlus, family::ShiftedGaussianPlus,
                            family::RadialTransportMinus, family::SeparatedExponentialMinus,
                            family::QuenchingProfileMinus, family::StationaryMinus>;

/// A closed-form solution together with the problem it solves.
///
/// Factories enforce parameter constraints (ParamError); evaluation outside the
/// validity domain throws DomainError.
class ClosedFormSolution {
public:
    static ClosedFormSolution one_var_convex(int N, int k, int axis, std::string phi_name, ScalarFunction phi);
    static ClosedFormSolution one_var_concave(int N, int k, int axis, std::string phi_name, ScalarFunction phi);
    static ClosedFormSolution travelling_wave(int N, int k, Sign sign, int axis, double alpha, double beta, double c);
    static ClosedFormSolution polynomial(int N, int k, Sign sign, const SymMatrix& A, std::vector<double> x0,
                                         std::vector<double> y, double C);
    static ClosedFormSolution self_similar_minus(int N, int k, double beta, double mu, double eps);
    static ClosedFormSolution gaussian_plus(int N, int k, double mu);
    static ClosedFormSolution shifted_gaussian_plus(int N, int k, double a);
    static ClosedFormSolution radial_transport_minus(int N, int k, RadialProfile g);
    static ClosedFormSolution separated_exponential_minus(int N, int k, double mu);
    static ClosedFormSolution quenching_profile_minus(int N, int k);
    static ClosedFormSolution stationary_minus(int N, int k, double p, double mu);

    const ProblemSpec& spec() const noexcept { return spec_; }
    const Family& family() const noexcept { return family_; }
    /// Short family name, e.g. "self_similar_minus".
    std::string name() const;

    /// True when (t, x) lies in the closed-form validity domain.
    bool in_domain(double t, std::span<const double> x) const;
    /// Exact value at (t, x); DomainError outside the validity domain.
    double operator()(double t, std::span<const double> x) const;

    /// Distance, in the transported radius s = sqrt(2kt + |x|^2), to the sphere
    /// where the solution is not C^2 (the bump's gluing sphere or a profile's
    /// support/kink radius). Empty for everywhere-smooth families.
    std::optional<double> distance_to_nonsmooth(double t, std::span<const double> x) const;

private:
    ClosedFormSolution(ProblemSpec spec, Family f) : spec_(spec), family_(std::move(f)) {}

    ProblemSpec spec_;
    Family family_;
};

double eval(const ClosedFormSolution& sol, double t, std::span<const double> x);

/// du/dt - F_k^{+-}(D^2 u) - u^{1+p} with central differences of spacing h in t
/// and x (four-point stencil for mixed derivatives). O(h^2) at smooth points.
/// DomainError when t <= h, outside the domain, or within 10h of a non-smooth set.
double pde_residual(const ClosedFormSolution& sol, double t, std::span<const double> x, double h);

enum class ProfileCondition {
    hyp_self,  // phi'' >= phi'/r
    hyp_CI,    // g''  >= g'/s (same inequality on the initial profile)
    reverse    // phi'' <= phi'/r
};

struct ProfileViolation {
    double r;
    double margin;  // g'' - g'/r (sign-adjusted so negative means violated)
};

/// Grid points where the chosen eigenvalue-ordering inequality fails beyond
/// tol = 1e-9 (1 + |g''(r)|). Points with r <= 0 are skipped. Never throws.
std::vector<ProfileViolation> check_profile_condition(const RadialProfile& g, std::span<const double> r_grid,
                                                      ProfileCondition which);

/// Builds a catalog member from a string id such as
/// `self_similar_minus{beta=1,mu=1,eps=0}`. ParamError on unknown names or keys.
ClosedFormSolution parse_catalog_id(std::string_view id, int N, int k);

/// Builds a radial profile from an id such as `cap{eps=1,amp=2}` or `quenching`.
RadialProfile parse_profile_id(std::string_view id, int k);

/// Every family with representative parameters, as string ids (for verify runs).
std::vector<std::string> default_catalog_ids();

/// Parsed `name{key=value,...}` id.
struct ParsedId {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
};
ParsedId parse_id(std::string_view id);

}  // namespace heatlab
