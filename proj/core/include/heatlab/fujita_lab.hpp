#pragma once

#include "heatlab/grid_solver.hpp"
#include "heatlab/radial_profile.hpp"
#include "heatlab/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace heatlab {

namespace envelope {

/// Data below C e^{-|x|^2/(2k)}, 0 < C <= 1, minus operator.
struct LightTailMinus {
    double C = 0.5;
    double p = 1.0;
};

/// Data below C (|x|^2 + eps)^{-beta}, p beta > 1, minus operator.
struct HeavyTailMinus {
    double C = 1.0;
    double eps = 1.0;
    double beta = 1.0;
    double p = 2.0;
};

/// Data below C (4 pi a)^{-k/2} e^{-|x|^2/(4a)}, p k > 2, plus operator.
struct GaussianPlus {
    double C = 0.5;
    double a = 1.0;
    double p = 3.0;
};

}  // namespace envelope

using Envelope = std::variant<envelope::LightTailMinus, envelope::HeavyTailMinus, envelope::GaussianPlus>;

/// ParamError when the envelope's hypotheses fail for truncation index k.
void validate_envelope(const Envelope& e, int k);

/// The explicit sup-norm bound at time t:
///   LightTailMinus  C (1 - C^p)^{-1/p} e^{-t}  (C < 1),  C  (C = 1)
///   HeavyTailMinus  C' (2kt + eps)^{-beta} (strict),  C' (2kt + eps)^{-1/p} (equality)
///   GaussianPlus    C' (a + t)^{-k/2}
double envelope_bound(const Envelope& e, int k, double t);

/// The factor f(t) of the supersolution f(t) v(t, x); f(0) = 1, nondecreasing.
double supersolution_factor(const Envelope& e, int k, double t);

/// 1 - p C^p / ((4 pi)^{pk/2} (pk/2 - 1) a^{pk/2 - 1}); positive means C is small enough.
double gaussian_smallness(double C, double a, double p, int k);
/// Largest C with positive smallness margin.
double gaussian_smallness_limit(double a, double p, int k);

/// Extremal initial data of the envelope on the grid.
GridField envelope_data(const Envelope& e, int N, int k, double L, int m);
/// Problem solved by the envelope's data: sign and reaction exponent.
ProblemSpec envelope_problem(const Envelope& e, int N, int k);

struct EnvelopeReport {
    std::vector<double> times;
    std::vector<double> sup;
    std::vector<double> bound;
    double worst_ratio = 0.0;     // max sup / bound
    double tolerance = 0.0;       // relative slack allowed above the bound
    std::size_t violations = 0;
    bool blown_up = false;
};

/// Runs the grid solver from the envelope's data and compares sup |u| with
/// the bound at every step, allowing (1 + scheme tolerance / sup |u0|).
EnvelopeReport verify_envelope(const Envelope& e, int N, int k, double L, int m, const SchemeConfig& cfg, double T);

/// Blow-up time 1 / (p C g0^p) of g' = C g^{1+p}, g(0) = g0.
double jensen_blowup_time(double g0, double C, double p);
/// C = ||g||_{L^1(R^k)}^p for radial data g.
double jensen_constant(const RadialProfile& g, int k, double p);

struct BlowupVerdict {
    enum class Kind { blow_up, global_decay, undecided };
    Kind kind = Kind::undecided;
    double t_star = 0.0;  // blow_up
    double rate = 0.0;    // global_decay: log-log slope of sup |u| against t + shift
    std::vector<double> times;
    std::vector<double> sup;
};

std::string to_string(BlowupVerdict::Kind k);

/// Least-squares slope of log sup against log(t + shift) over the last decade
/// t + shift in [(T + shift)/10, T + shift].
double last_decade_slope(std::span<const double> times, std::span<const double> sup, double shift);

/// Blow-up if the trajectory crossed the threshold; otherwise global decay when
/// the last-decade slope is <= decay_slope, else undecided.
BlowupVerdict classify(const Trajectory& tr, double shift, double decay_slope = -0.05);

enum class SweepData {
    automatic,       // plus: caps below 2/k, small Gaussians above; minus: light Gaussians
    cap,             // A (eps^2 - |x|^2)_+
    small_gaussian,  // C (4 pi a)^{-k/2} e^{-|x|^2/(4a)}, C = fraction * smallness limit
    light_gaussian   // C e^{-|x|^2/(2k)}, C = fraction
};

struct SweepConfig {
    int N = 2;
    int k = 1;
    Sign sign = Sign::plus;
    std::vector<double> p_list;
    SweepData data = SweepData::automatic;
    std::vector<double> cap_amplitudes{1.0, 2.0};
    double cap_eps = 1.0;
    std::vector<double> fractions{0.5};  // of the smallness limit (1 for light Gaussians)
    double gaussian_a = 1.0;
    double L = 16.0;
    int m = 129;
    double T_max = 20.0;
    SchemeConfig scheme;
    int threads = 1;
};

struct SweepEntry {
    double p = 0.0;
    double scale = 0.0;  // data amplitude (A for caps, C for Gaussians)
    std::string data;    // cap, small_gaussian, light_gaussian, or none
    BlowupVerdict verdict;
};

struct VerdictTable {
    Sign sign = Sign::plus;
    int k = 1;
    int N = 2;
    std::vector<SweepEntry> entries;  // sorted by (p, scale)
    double p_lo = 0.0;                // largest p blowing up at every scale (0 if none)
    std::optional<double> p_hi;       // smallest p decaying at some scale

    bool bracket_contains(double p) const { return p_lo <= p && (!p_hi || p <= *p_hi); }
};

/// Runs every (p, scale) job on a worker pool. The critical p = 2/k of the plus
/// operator is entered as undecided without running.
VerdictTable exponent_sweep(const SweepConfig& cfg);

/// CSV `sign,k,N,p,scale,verdict,t_star_or_rate`.
void write_verdict_csv(std::ostream& out, const VerdictTable& table);

/// min over sample radii of F_k^+(D_h^2 u) - (phi'' + (k-1)/r phi') for u = phi(|x|)
/// in R^N, using the grid stencil of spacing h around x = r e_1 rotated by a
/// fixed angle. Nonnegative up to O(h^2) at smooth points.
double lower_dimensional_gap(const RadialProfile& phi, int N, int k, double h, std::span<const double> radii);

}  // namespace heatlab
