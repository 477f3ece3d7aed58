#pragma once

#include "heatlab/analytic_catalog.hpp"
#include "heatlab/spectral.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace heatlab {

/// Samples of u(t, .) on the uniform grid {-L + i h}^N, h = 2L/(m-1).
/// Index 0 varies slowest in the flat layout.
struct GridField {
    int N = 2;
    double L = 1.0;
    int m = 9;
    double t = 0.0;
    std::vector<double> values;
    bool blown_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();

    using Point = std::array<double, 3>;

    static GridField zeros(int N, double L, int m, double t = 0.0);
    static GridField sample(int N, double L, int m, double t, const std::function<double(std::span<const double>)>& f);
    static GridField from_solution(const ClosedFormSolution& sol, double L, int m, double t);

    double h() const noexcept { return 2.0 * L / (m - 1); }
    /// Symmetric about 0: coord(m - 1 - i) == -coord(i) exactly.
    double coord(int i) const noexcept { return (i - 0.5 * (m - 1)) * h(); }
    std::size_t size() const noexcept { return values.size(); }
    std::size_t stride(int axis) const noexcept;
    std::size_t flat(std::span<const int> idx) const;
    std::array<int, 3> multi(std::size_t flat) const noexcept;
    Point point(std::size_t flat) const noexcept;

    double sup_norm() const;
    double max_value() const;
    double min_value() const;

    /// ParamError unless N in {2,3}, m >= 9, L > 0 and values has m^N entries;
    /// NonFinite when a value is not finite and the field is not blown up.
    void validate() const;
};

struct DirichletOracle {
    ClosedFormSolution solution;
};
struct ExtrapolateConstant {};
using Boundary = std::variant<ExtrapolateConstant, DirichletOracle>;

struct SchemeConfig {
    std::optional<double> dt;  // default: cfl h^2 / (2k)
    double cfl = 0.2;
    Boundary boundary = ExtrapolateConstant{};
    double blowup_threshold = 1e6;
    int snapshot_stride = 0;   // 0: keep only the initial and final fields
    int threads = 1;

    /// Time step for the field; ConfigError when it exceeds cfl h^2/(2k) or is not positive.
    double resolve_dt(const GridField& f, const ProblemSpec& spec) const;
};

/// Central second differences; mixed terms (f++ + f-- - f+- - f-+)/(4h^2).
/// BoundaryIndex unless every index lies in [1, m-2].
SymMatrix discrete_hessian(const GridField& f, std::span<const int> idx);

/// One forward-Euler step of size dt. Boundary nodes follow cfg.boundary.
/// A value above the threshold (or non-finite) returns a blown-up field with
/// blowup_time at the midpoint of the step.
GridField step(const GridField& f, const ProblemSpec& spec, const SchemeConfig& cfg, double dt);

struct Trajectory {
    std::vector<GridField> snapshots;
    GridField final_state;
    std::vector<double> times;  // one entry per step, including t0
    std::vector<double> sup;    // sup |u| at each entry of `times`
    std::size_t steps = 0;
    double dt = 0.0;

    bool blown_up() const noexcept { return final_state.blown_up; }
    double t_star() const noexcept { return final_state.blowup_time; }
};

/// Integrates to time T. The step is shrunk so that T is reached exactly.
/// ConfigError on a CFL violation or T <= u0.t.
Trajectory solve(GridField u0, const ProblemSpec& spec, const SchemeConfig& cfg, double T);

/// Lockstep variant: calls observe(u) after every step (and once at the start).
/// Returns the final field; stops early on blow-up.
GridField solve_observed(GridField u0, const ProblemSpec& spec, const SchemeConfig& cfg, double T,
                         const std::function<void(const GridField&)>& observe);

/// max |u - ref| over nodes with max_a |x_a| <= window.
double sup_error(const GridField& f, const std::function<double(std::span<const double>)>& ref,
                 double window = std::numeric_limits<double>::infinity());
double sup_error(const GridField& f, const ClosedFormSolution& sol,
                 double window = std::numeric_limits<double>::infinity());

/// Scheme tolerance (T - t0) * tau, with tau the stencil consistency error
/// sum_a (h^2/12) max|d_a^4 u0| estimated from fourth differences of the data.
double scheme_tolerance(const GridField& u0, double T);

struct ComparisonTrial {
    std::uint64_t seed = 0;
    double margin = 0.0;     // min over nodes and steps of v - u
    double tolerance = 0.0;  // 10 x scheme tolerance of the pair
    bool violated = false;
};

struct ComparisonReport {
    std::vector<ComparisonTrial> trials;
    double worst_margin = 0.0;
    std::size_t violations = 0;
};

/// Generator of ordered initial pairs u0 <= v0 on the given grid.
using PairGenerator = std::function<std::pair<GridField, GridField>(std::uint64_t trial_seed)>;

/// Sums of random Gaussian bumps; v0 = u0 + a nonnegative random bump sum.
PairGenerator random_bump_pairs(int N, double L, int m);

/// Evolves each pair in lockstep and records min (v - u) over the interior
/// window shrunk by sqrt(2kT). Trials run in parallel; output order is by trial.
ComparisonReport comparison_fuzz(const PairGenerator& gen, const ProblemSpec& spec, const SchemeConfig& cfg, double T,
                                 int trials, std::uint64_t seed);

/// CSV rows `t,x1,...,xN,value` for each field (header written once).
void write_grid_csv(std::ostream& out, std::span<const GridField> fields);
/// Binary block: int32 N, int32 m, float64 L, float64 t, then m^N float64 values, little-endian.
void write_grid_binary(std::ostream& out, const GridField& f);
GridField read_grid_binary(std::istream& in);

}  // namespace heatlab
