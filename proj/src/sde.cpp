#include "burstlab/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "burstlab/rng.hpp"

namespace burstlab {

void PowerLawSdeSpec::validate() const {
    if (!(x_min > 0.0)) throw std::invalid_argument("PowerLawSdeSpec: x_min must be > 0");
    if (!(x_max > x_min)) throw std::invalid_argument("PowerLawSdeSpec: x_max must be > x_min");
}

void StepControl::validate() const {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("StepControl: kappa must be in (0,1)");
    if (!(max_step > 0.0)) throw std::invalid_argument("StepControl: max_step must be > 0");
}

double drift(const PowerLawSdeSpec& spec, double x) {
    if (!(x > 0.0)) throw std::domain_error("drift: x must be > 0");
    return (spec.eta - 0.5 * spec.lambda) * std::pow(x, 2.0 * spec.eta - 1.0);
}

double diffusion(const PowerLawSdeSpec& spec, double x) {
    if (!(x > 0.0)) throw std::domain_error("diffusion: x must be > 0");
    return std::pow(x, spec.eta);
}

double predicted_beta(const PowerLawSdeSpec& spec) {
    if (spec.eta == 1.0) throw std::domain_error("predicted_beta: undefined at eta == 1");
    return 1.0 + (spec.lambda - 3.0) / (2.0 * spec.eta - 2.0);
}

FrequencyBand psd_validity_range(const PowerLawSdeSpec& spec) {
    spec.validate();
    if (spec.eta == 1.0) throw std::domain_error("psd_validity_range: undefined at eta == 1");
    const double two_pi = 2.0 * M_PI;
    if (spec.eta > 1.0) {
        const double e = 2.0 * spec.eta - 2.0;
        return {std::pow(spec.x_min, e) / two_pi, std::pow(spec.x_max, e) / two_pi};
    }
    const double e = 2.0 - 2.0 * spec.eta;
    return {std::pow(spec.x_max, e) / two_pi, std::pow(spec.x_min, e) / two_pi};
}

double bessel_order(const PowerLawSdeSpec& spec) {
    if (spec.eta == 1.0) throw std::domain_error("bessel_order: undefined at eta == 1");
    return (spec.lambda - 2.0 * spec.eta + 1.0) / (2.0 * (spec.eta - 1.0));
}

// Ascending series: J_nu(x) = sum_k (-1)^k / (k! Gamma(k+nu+1)) (x/2)^(2k+nu).
// Adequate in doubles over the zero-search range (x <= ~60, nu in [0, ~20]).
double bessel_j(double nu, double x) {
    if (x < 0.0 || nu < 0.0) throw std::domain_error("bessel_j: requires x >= 0 and nu >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double half_x = 0.5 * x;
    double term = std::pow(half_x, nu) / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 1; k <= 200; ++k) {
        term *= -(half_x * half_x) / (static_cast<double>(k) * (static_cast<double>(k) + nu));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

double bessel_j_first_zero(double nu) {
    if (nu < 0.0) throw std::domain_error("bessel_j_first_zero: requires nu >= 0");
    // J_nu > 0 just above 0; walk out until the first sign change, then bisect.
    double lo = 1e-6;
    double flo = bessel_j(nu, lo);
    const double step = 0.05;
    double hi = lo;
    double fhi = flo;
    // j_{nu,1} < nu + 1.86 nu^(1/3) + 2.5 for all nu >= 0; 3*nu + 60 is a lazy cover.
    const double limit = 3.0 * nu + 60.0;
    while (hi < limit) {
        hi += step;
        fhi = bessel_j(nu, hi);
        if (flo > 0.0 && fhi <= 0.0) break;
        lo = hi;
        flo = fhi;
    }
    if (!(flo > 0.0 && fhi <= 0.0))
        throw std::runtime_error("bessel_j_first_zero: no sign change up to x = " + std::to_string(limit));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_j(nu, mid) > 0.0) lo = mid; else hi = mid;
        if (hi - lo < 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double burst_crossover_time(const PowerLawSdeSpec& spec, double h_x) {
    if (!(spec.eta > 1.0)) throw std::domain_error("burst_crossover_time: requires eta > 1");
    if (!(h_x > 0.0)) throw std::domain_error("burst_crossover_time: requires h_x > 0");
    const double nu = bessel_order(spec);
    const double j1 = bessel_j_first_zero(nu);
    const double em1 = spec.eta - 1.0;
    return 2.0 / (em1 * em1 * std::pow(h_x, 2.0 * em1) * j1 * j1);
}

GenericSdeSpec make_one_over_f_sde(double x_max) {
    GenericSdeSpec spec;
    spec.drift = [](double) { return 0.0; };
    spec.diffusion = [](double x) { return std::pow(1.0 + x * x, 0.75); };
    spec.x_min = 0.0;
    spec.x_max = x_max;
    spec.reflect_lower = false;
    spec.reflect_upper = true;
    spec.x0 = 1.0;
    spec.step_scale = 1.0;
    return spec;
}

namespace {

// Fold an overshoot back inside the allowed region. The adaptive step
// keeps displacements at ~kappa relative, so one fold almost always
// suffices; the loop bound guards pathological coefficients.
double reflect(double x, double lo, double hi, bool use_lo, bool use_hi) {
    for (int i = 0; i < 64; ++i) {
        if (use_hi && x > hi) { x = 2.0 * hi - x; continue; }
        if (use_lo && x < lo) { x = 2.0 * lo - x; continue; }
        if (!use_lo && use_hi && x < -hi) { x = -2.0 * hi - x; continue; }
        return x;
    }
    throw std::runtime_error("simulate_sde: reflection failed to terminate");
}

[[noreturn]] void abort_nonfinite(double t, double x) {
    throw std::runtime_error("simulate_sde: non-finite state x = " + std::to_string(x) +
                             " at t = " + std::to_string(t));
}

// Generic Euler-Maruyama driver. Step::operator()(x, dt_cap) advances
// one internal step of at most dt_cap and returns the dt actually taken.
// Time is accumulated per sample interval so that tiny adaptive steps
// never vanish against a large absolute clock.
template <typename Step, typename Sink>
void run_sampled(double duration, double sample_dt, Step&& step, Sink&& sink) {
    if (!(sample_dt > 0.0) || !(duration >= sample_dt))
        throw std::invalid_argument("simulate_sde: need duration >= sample_dt > 0");
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(duration / sample_dt));
    for (std::size_t k = 0; k < n_samples; ++k) {
        double s = 0.0;
        while (s < sample_dt) {
            s += step(sample_dt - s, static_cast<double>(k) * sample_dt + s);
        }
        sink();
    }
}

} // namespace

void simulate_sde_stream(const PowerLawSdeSpec& spec, const StepControl& ctl, double duration,
                         double sample_dt, std::uint64_t seed,
                         const std::function<void(double)>& sink) {
    spec.validate();
    ctl.validate();
    Xoshiro256 rng(seed);
    NormalSampler normal;
    const double kappa2 = ctl.kappa * ctl.kappa;
    const double drift_coef = spec.eta - 0.5 * spec.lambda;
    const double eta = spec.eta;
    const double lo = spec.x_min, hi = spec.x_max;
    double x = std::sqrt(lo * hi);
    // One pow per step: sigma = x^eta, then x^(2eta-2) = sigma^2/x^2 and
    // x^(2eta-1) = sigma^2/x.
    auto step = [&](double dt_cap, double t_now) -> double {
        const double sigma = std::pow(x, eta);
        const double sigma2 = sigma * sigma;
        double dt = kappa2 * (x * x) / sigma2;
        if (dt > ctl.max_step) dt = ctl.max_step;
        if (dt > dt_cap) dt = dt_cap;
        const double w = normal(rng) * std::sqrt(dt);
        x += drift_coef * (sigma2 / x) * dt + sigma * w;
        x = reflect(x, lo, hi, true, true);
        if (!std::isfinite(x)) abort_nonfinite(t_now, x);
        return dt;
    };
    run_sampled(duration, sample_dt, step, [&] { sink(x); });
}

void simulate_sde_stream(const GenericSdeSpec& spec, const StepControl& ctl, double duration,
                         double sample_dt, std::uint64_t seed,
                         const std::function<void(double)>& sink) {
    ctl.validate();
    if (!spec.drift || !spec.diffusion)
        throw std::invalid_argument("simulate_sde: GenericSdeSpec needs drift and diffusion");
    Xoshiro256 rng(seed);
    NormalSampler normal;
    const double kappa2 = ctl.kappa * ctl.kappa;
    const double scale2 = spec.step_scale * spec.step_scale;
    double x = spec.x0;
    auto step = [&](double dt_cap, double t_now) -> double {
        const double sigma = spec.diffusion(x);
        const double sigma2 = sigma * sigma;
        double dt = sigma2 > 0.0 ? kappa2 * (x * x + scale2) / sigma2 : ctl.max_step;
        if (dt > ctl.max_step) dt = ctl.max_step;
        if (dt > dt_cap) dt = dt_cap;
        const double w = normal(rng) * std::sqrt(dt);
        x += spec.drift(x) * dt + sigma * w;
        x = reflect(x, spec.x_min, spec.x_max, spec.reflect_lower, spec.reflect_upper);
        if (!std::isfinite(x)) abort_nonfinite(t_now, x);
        return dt;
    };
    run_sampled(duration, sample_dt, step, [&] { sink(x); });
}

namespace {

template <typename Spec>
SampledSeries collect(const Spec& spec, const StepControl& ctl, double duration,
                      double sample_dt, std::uint64_t seed, double x0) {
    SampledSeries out;
    out.t0 = 0.0;
    out.dt = sample_dt;
    out.unit = "model";
    out.seed = seed;
    out.values.reserve(static_cast<std::size_t>(duration / sample_dt) + 2);
    out.values.push_back(x0);
    simulate_sde_stream(spec, ctl, duration, sample_dt, seed,
                        [&](double x) { out.values.push_back(x); });
    return out;
}

} // namespace

SampledSeries simulate_sde(const PowerLawSdeSpec& spec, const StepControl& ctl, double duration,
                           double sample_dt, std::uint64_t seed) {
    spec.validate();
    return collect(spec, ctl, duration, sample_dt, seed, std::sqrt(spec.x_min * spec.x_max));
}

SampledSeries simulate_sde(const GenericSdeSpec& spec, const StepControl& ctl, double duration,
                           double sample_dt, std::uint64_t seed) {
    return collect(spec, ctl, duration, sample_dt, seed, spec.x0);
}

} // namespace burstlab
