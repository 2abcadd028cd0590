#pragma once

#include <cstdint>
#include <vector>

#include "burstlab/rng.hpp"
#include "burstlab/sde.hpp"
#include "burstlab/series.hpp"

namespace burstlab {

// Three-state herding model parameters. Rates are idiosyncratic
// switching rates scaled by the herding rate h (eps_ij = sigma_ij / h);
// time inside the state equations is scaled as t_s = h * t, so one
// trading day spans h_per_sec * seconds_per_day units of model time.
// delta (short return window) and Delta (aggregation window) are in
// trading days, with Delta an integer multiple of delta.
struct MarketParams {
    double eps_cf = 1.1;
    double eps_fc = 3.0;
    double eps_cc = 3.0;
    double H = 1000.0;        // chartist speed-up
    double a0 = 1.0;          // endogenous impact on volatility
    double a_tau = 0.7;       // trading-activity feedback strength
    double alpha = 2.0;       // feedback exponent
    double r0 = 1.0;          // chartist impact on price
    double b0 = 1.0;          // volatility normalization
    double w = 0.25;          // intraday pattern width, trading days
    double h_per_sec = 0.3e-8;
    double seconds_per_day = 23400.0; // 6.5 h trading day
    double delta = 1.0 / 390.0;
    double Delta = 1.0 / 390.0;

    void validate() const;
    int windows_per_return() const; // Delta / delta, exact integer
};

// Which noise sources enter the return series. With use_exogenous off
// the "return" is the modulating signal sigma_t itself; with use_xi off
// the chartist mood is pinned at 1; with use_seasonality off b0 is
// constant. The standard ladder: (a) all off, (b) exogenous only,
// (c) exogenous + mood, (d) all on.
struct CompositionFlags {
    bool use_xi = false;
    bool use_exogenous = false;
    bool use_seasonality = false;
};

CompositionFlags composition(char label); // 'a' | 'b' | 'c' | 'd'

struct MarketState {
    double n_f;
    double xi;
    double t; // model time t_s
};

// tau(n_f) = (1 + a_tau (1 - n_f)/n_f)^(-alpha); the state-dependent
// inter-event time slowing agent dynamics down at high fundamentalist
// concentration and speeding it up during chartist bursts.
double inter_event_time(double n_f, double a_tau, double alpha);

// p = r0 (1 - n_f)/n_f * xi, the log price implied by demand balance.
double log_price(double n_f, double xi, double r0);

// b0(t) = b0 exp(-((t mod 1) - 0.5)^2 / w^2) + 0.5, t in trading days.
double seasonal_b0(double t_days, double b0, double w);

// sigma_t = b0_t (1 + a0 |p|).
double volatility(double p_abs, double a0, double b0_t);

// One Euler-Maruyama update of (n_f, xi) over dt (model time). noise_f
// and noise_xi are standard-normal draws; the sqrt(dt) scaling happens
// inside. Both variables share the 1/tau(n_f) factor evaluated at the
// incoming state. Results are reflected into (0,1) and (-1,1).
MarketState step_state(const MarketState& state, const MarketParams& p, double dt,
                       double noise_f, double noise_xi);

// One trading day expressed in model time units (h_per_sec * seconds_per_day).
double model_time_per_day(const MarketParams& p);

// Aggregated return series: r values on a grid of Delta trading days,
// optionally with the latent state (n_f, effective xi, sigma) at each
// window start.
struct ReturnSeries {
    double dt = 0.0; // = Delta, trading days
    std::vector<double> r;
    std::vector<double> n_f;   // empty unless latent recording was on
    std::vector<double> xi;    // effective mood entering the price
    std::vector<double> sigma;

    std::size_t size() const { return r.size(); }
};

// Incremental simulator producing one short-window return per call.
// Three independent RNG substreams (n_f noise, xi noise, exogenous
// noise) are derived from the seed, so runs that differ only in flags
// share the same n_f trajectory. Within each delta window: sigma_t is
// evaluated from the state at the window start, the return is drawn,
// and then the state advances through enough substeps to keep both the
// kappa displacement rule and the xi relaxation resolved.
class MarketSim {
  public:
    struct WindowSample {
        double r;
        double n_f;
        double xi;    // effective mood used for the price
        double sigma;
    };

    MarketSim(const MarketParams& params, const CompositionFlags& flags, std::uint64_t seed,
              const StepControl& ctl = StepControl{});

    WindowSample next_window();
    void skip_days(double days); // advance without producing output

    const MarketState& state() const { return state_; }
    std::int64_t window_index() const { return window_index_; }

  private:
    MarketParams p_;
    CompositionFlags flags_;
    StepControl ctl_;
    MarketState state_;
    double delta_model_;
    double substep_factor_; // max(1/kappa^2, 20 H eps_cc)
    std::int64_t window_index_ = 0;
    Xoshiro256 rng_f_, rng_xi_, rng_omega_;
    NormalSampler normal_f_, normal_xi_, normal_omega_;

    void advance_one_window();
};

// n_days of aggregated returns, deterministic per seed. record_latent
// keeps (n_f, xi, sigma) at each Delta window start.
ReturnSeries simulate_market(const MarketParams& p, const CompositionFlags& flags, int n_days,
                             std::uint64_t seed, bool record_latent = false,
                             const StepControl& ctl = StepControl{});

// Continuous-time Markov chain of N agents hopping between K states
// with per-agent i->j rate sigma[i][j] + h[i][j] * (count in j). State
// 0 is the fundamentalist state; the fraction N_0/N is sampled on a
// uniform grid (zero-order hold) in the same scaled time as the SDEs.
struct AgentChainRates {
    std::vector<std::vector<double>> sigma;
    std::vector<std::vector<double>> h;

    std::size_t n_states() const { return sigma.size(); }
    void validate() const;
};

// Two-state reduction (fundamentalists vs chartists) in scaled time:
// per-agent rates f->c: eps_fc + n_c N, c->f: eps_cf + n_f N.
AgentChainRates two_state_chain(double eps_cf, double eps_fc);

// Full three-state topology (fundamentalist, optimist, pessimist) with
// the symmetric rate relationships and chartist speed-up H.
AgentChainRates three_state_chain(const MarketParams& p);

SampledSeries simulate_agent_chain(int n_agents, const AgentChainRates& rates, double duration,
                                   double sample_dt, std::uint64_t seed,
                                   std::vector<int> initial_counts = {});

} // namespace burstlab
