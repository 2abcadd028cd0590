#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "burstlab/series.hpp"

namespace burstlab {

// Nonlinear SDE with power-law drift and diffusion,
//
//   dx = (eta - lambda/2) x^(2 eta - 1) dt + x^eta dW,
//
// kept between reflective bounds 0 < x_min < x < x_max. Stationary PDF
// ~ x^(-lambda); PSD ~ 1/f^beta with beta = 1 + (lambda-3)/(2 eta - 2).
struct PowerLawSdeSpec {
    double eta;
    double lambda;
    double x_min;
    double x_max;

    void validate() const;
};

// Frequency band, in cycles per unit model time. The band where the
// power-law PSD prediction applies can come out inverted (f_low >=
// f_high) for eta < 1 with wide bounds; callers must check empty().
struct FrequencyBand {
    double f_low;
    double f_high;
    bool empty() const { return !(f_low < f_high); }
};

double drift(const PowerLawSdeSpec& spec, double x);
double diffusion(const PowerLawSdeSpec& spec, double x);

// beta = 1 + (lambda - 3)/(2 eta - 2). Throws for eta == 1.
double predicted_beta(const PowerLawSdeSpec& spec);

// Frequency band in which the 1/f^beta prediction holds, bounded by the
// diffusion-restriction levels: 2 pi f between x_min^(2 eta - 2) and
// x_max^(2 eta - 2) for eta > 1, exponents 2 - 2 eta with the roles of
// the bounds swapped for eta < 1. Throws for eta == 1.
FrequencyBand psd_validity_range(const PowerLawSdeSpec& spec);

// Bessel-function order used in the burst-duration law. NOTE: the
// expression this is drawn from is stated self-referentially in the
// literature we follow (nu appears on both sides); we use
//   nu = (lambda - 2 eta + 1) / (2 (eta - 1)),
// which is dimensionally consistent with the first-passage framework.
// The tau^(-3/2) short-time law does not depend on this choice.
double bessel_order(const PowerLawSdeSpec& spec);

// Crossover time separating the tau^(-3/2) regime of the burst-duration
// PDF from the exponential tail:
//   tau_c = 2 / ((eta-1)^2 h_x^(2(eta-1)) j_{nu,1}^2),
// with j_{nu,1} the first positive zero of J_nu. Requires eta > 1.
double burst_crossover_time(const PowerLawSdeSpec& spec, double h_x);

// Bessel function of the first kind of real order nu >= 0, and its
// first positive zero found by bracketed bisection. No table lookup.
double bessel_j(double nu, double x);
double bessel_j_first_zero(double nu);

// User-supplied drift/diffusion between optional reflective bounds.
// With reflect_lower = false the state may cross x_min and go negative;
// the upper bound then applies to |x| (symmetric fold), which is the
// right treatment for diffusions that are regular through zero.
// step_scale is the state magnitude below which the adaptive step stops
// shrinking (the natural scale of the diffusion near zero).
struct GenericSdeSpec {
    std::function<double(double)> drift;
    std::function<double(double)> diffusion;
    double x_min = 0.0;
    double x_max = 1.0;
    bool reflect_lower = true;
    bool reflect_upper = true;
    double x0 = 0.5;
    double step_scale = 1.0;
};

// dx = (1 + x^2)^(3/4) dW, the driftless special case whose signal has
// P(|x|) ~ |x|^-3 and S(f) ~ 1/f. Regular at zero, so only the upper
// bound reflects.
GenericSdeSpec make_one_over_f_sde(double x_max = 1e3);

// Integration accuracy knobs. kappa is the per-step relative
// displacement target; the internal step is
//   dt_i = min(max_step, kappa^2 / x^(2 eta - 2))
// for the power-law class, and the analogous
//   dt_i = min(max_step, kappa^2 (x^2 + step_scale^2) / diffusion(x)^2)
// for generic specs.
struct StepControl {
    double kappa = 0.05;
    double max_step = 1e-3;

    void validate() const;
};

// Euler-Maruyama integration with state-adaptive internal step and
// reflective bounds, decimated to sample_dt. values[k] = x(k*sample_dt),
// including the initial state; length = floor(duration/sample_dt) + 1.
// Identical (spec, ctl, duration, sample_dt, seed) give bit-identical
// output. Power-law runs start at sqrt(x_min*x_max); generic runs at x0.
SampledSeries simulate_sde(const PowerLawSdeSpec& spec, const StepControl& ctl,
                           double duration, double sample_dt, std::uint64_t seed);
SampledSeries simulate_sde(const GenericSdeSpec& spec, const StepControl& ctl,
                           double duration, double sample_dt, std::uint64_t seed);

// Streaming variants: deliver each sample (after the initial state) to
// `sink` instead of materializing the series. Sample k is at time
// (k+1)*sample_dt. The vector-returning overloads are built on these.
void simulate_sde_stream(const PowerLawSdeSpec& spec, const StepControl& ctl,
                         double duration, double sample_dt, std::uint64_t seed,
                         const std::function<void(double)>& sink);
void simulate_sde_stream(const GenericSdeSpec& spec, const StepControl& ctl,
                         double duration, double sample_dt, std::uint64_t seed,
                         const std::function<void(double)>& sink);

} // namespace burstlab
