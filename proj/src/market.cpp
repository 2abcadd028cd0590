#include "burstlab/market.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace burstlab {

namespace {

constexpr double kNfFloor = 1e-6;  // reflect n_f into [floor, 1 - floor]
constexpr double kXiFloor = 1e-9;  // reflect xi into [-1 + floor, 1 - floor]

double reflect_into(double x, double lo, double hi) {
    for (int i = 0; i < 64; ++i) {
        if (x < lo) { x = 2.0 * lo - x; continue; }
        if (x > hi) { x = 2.0 * hi - x; continue; }
        return x;
    }
    // Huge overshoot (can only happen with absurd dt); pin to the box.
    return x < lo ? lo : hi;
}

} // namespace

void MarketParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("MarketParams: ") + name + " must be > 0");
    };
    positive(eps_cf, "eps_cf");
    positive(eps_fc, "eps_fc");
    positive(eps_cc, "eps_cc");
    positive(r0, "r0");
    positive(b0, "b0");
    positive(w, "w");
    positive(h_per_sec, "h_per_sec");
    positive(seconds_per_day, "seconds_per_day");
    positive(delta, "delta");
    positive(Delta, "Delta");
    if (!(H >= 1.0)) throw std::invalid_argument("MarketParams: H must be >= 1");
    if (a0 < 0.0 || a_tau < 0.0 || alpha < 0.0)
        throw std::invalid_argument("MarketParams: a0, a_tau, alpha must be >= 0");
    windows_per_return();
}

int MarketParams::windows_per_return() const {
    const double ratio = Delta / delta;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
        throw std::invalid_argument("MarketParams: Delta must be an integer multiple of delta");
    return static_cast<int>(rounded);
}

CompositionFlags composition(char label) {
    switch (label) {
        case 'a': return {false, false, false};
        case 'b': return {false, true, false};
        case 'c': return {true, true, false};
        case 'd': return {true, true, true};
        default: throw std::invalid_argument("composition: label must be one of a, b, c, d");
    }
}

double inter_event_time(double n_f, double a_tau, double alpha) {
    if (!(n_f > 0.0 && n_f < 1.0)) throw std::domain_error("inter_event_time: n_f must be in (0,1)");
    return std::pow(1.0 + a_tau * (1.0 - n_f) / n_f, -alpha);
}

double log_price(double n_f, double xi, double r0) {
    if (!(n_f > 0.0)) throw std::domain_error("log_price: n_f must be > 0");
    return r0 * (1.0 - n_f) / n_f * xi;
}

double seasonal_b0(double t_days, double b0, double w) {
    if (!(w > 0.0)) throw std::domain_error("seasonal_b0: w must be > 0");
    double frac = t_days - std::floor(t_days);
    const double u = (frac - 0.5) / w;
    return b0 * std::exp(-u * u) + 0.5;
}

double volatility(double p_abs, double a0, double b0_t) {
    return b0_t * (1.0 + a0 * p_abs);
}

MarketState step_state(const MarketState& state, const MarketParams& p, double dt,
                       double noise_f, double noise_xi) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_state: dt must be > 0");
    const double inv_tau = 1.0 / inter_event_time(state.n_f, p.a_tau, p.alpha);
    const double n = state.n_f;
    const double sqrt_dt = std::sqrt(dt);

    const double drift_n = ((1.0 - n) * p.eps_cf - n * p.eps_fc) * inv_tau;
    const double diff_n = std::sqrt(2.0 * n * (1.0 - n) * inv_tau);
    double n_next = n + drift_n * dt + diff_n * noise_f * sqrt_dt;
    n_next = reflect_into(n_next, kNfFloor, 1.0 - kNfFloor);

    const double xi = state.xi;
    const double drift_xi = -2.0 * p.H * p.eps_cc * xi * inv_tau;
    const double diff_xi = std::sqrt(2.0 * p.H * (1.0 - xi * xi) * inv_tau);
    double xi_next = xi + drift_xi * dt + diff_xi * noise_xi * sqrt_dt;
    xi_next = reflect_into(xi_next, -1.0 + kXiFloor, 1.0 - kXiFloor);

    return {n_next, xi_next, state.t + dt};
}

double model_time_per_day(const MarketParams& p) { return p.h_per_sec * p.seconds_per_day; }

MarketSim::MarketSim(const MarketParams& params, const CompositionFlags& flags,
                     std::uint64_t seed, const StepControl& ctl)
    : p_(params), flags_(flags), ctl_(ctl),
      rng_f_(derive_seed(seed, 1)), rng_xi_(derive_seed(seed, 2)),
      rng_omega_(derive_seed(seed, 3)) {
    p_.validate();
    ctl_.validate();
    delta_model_ = p_.delta * model_time_per_day(p_);
    // Substep count resolves both the kappa displacement rule for n_f
    // and the xi relaxation rate 2 H eps_cc / tau (ten substeps per
    // relaxation time). The same count is used whether or not xi is
    // active so that the n_f path is flag-independent at fixed seed.
    substep_factor_ = std::max(1.0 / (ctl_.kappa * ctl_.kappa), 20.0 * p_.H * p_.eps_cc);
    state_ = {p_.eps_cf / (p_.eps_cf + p_.eps_fc), 0.0, 0.0};
}

void MarketSim::advance_one_window() {
    const double tau = inter_event_time(state_.n_f, p_.a_tau, p_.alpha);
    const double n_sub_real = std::ceil(delta_model_ * substep_factor_ / tau);
    const int n_sub = n_sub_real < 1.0 ? 1 : (n_sub_real > 1e7 ? 10000000 : static_cast<int>(n_sub_real));
    const double dt = delta_model_ / static_cast<double>(n_sub);
    for (int s = 0; s < n_sub; ++s) {
        const double g_f = normal_f_(rng_f_);
        const double g_xi = flags_.use_xi ? normal_xi_(rng_xi_) : 0.0;
        state_ = step_state(state_, p_, dt, g_f, g_xi);
    }
}

MarketSim::WindowSample MarketSim::next_window() {
    const double t_days = static_cast<double>(window_index_) * p_.delta;
    const double xi_eff = flags_.use_xi ? state_.xi : 1.0;
    const double price = log_price(state_.n_f, xi_eff, p_.r0);
    const double b0_t = flags_.use_seasonality ? seasonal_b0(t_days, p_.b0, p_.w) : p_.b0;
    const double sigma = volatility(std::abs(price), p_.a0, b0_t);
    WindowSample out{sigma, state_.n_f, xi_eff, sigma};
    if (flags_.use_exogenous) out.r = sigma * normal_omega_(rng_omega_);
    advance_one_window();
    ++window_index_;
    return out;
}

void MarketSim::skip_days(double days) {
    const double n = std::round(days / p_.delta);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) next_window();
}

ReturnSeries simulate_market(const MarketParams& p, const CompositionFlags& flags, int n_days,
                             std::uint64_t seed, bool record_latent, const StepControl& ctl) {
    if (n_days < 1) throw std::invalid_argument("simulate_market: n_days must be >= 1");
    p.validate();
    MarketSim sim(p, flags, seed, ctl);
    const int per_return = p.windows_per_return();
    const auto n_returns = static_cast<std::int64_t>(std::floor(static_cast<double>(n_days) / p.Delta + 1e-9));
    ReturnSeries out;
    out.dt = p.Delta;
    out.r.reserve(static_cast<std::size_t>(n_returns));
    if (record_latent) {
        out.n_f.reserve(static_cast<std::size_t>(n_returns));
        out.xi.reserve(static_cast<std::size_t>(n_returns));
        out.sigma.reserve(static_cast<std::size_t>(n_returns));
    }
    for (std::int64_t i = 0; i < n_returns; ++i) {
        double r_sum = 0.0;
        for (int j = 0; j < per_return; ++j) {
            const auto w = sim.next_window();
            r_sum += w.r;
            if (j == 0 && record_latent) {
                out.n_f.push_back(w.n_f);
                out.xi.push_back(w.xi);
                out.sigma.push_back(w.sigma);
            }
        }
        out.r.push_back(r_sum);
    }
    return out;
}

void AgentChainRates::validate() const {
    const std::size_t k = sigma.size();
    if (k < 2) throw std::invalid_argument("AgentChainRates: need at least 2 states");
    if (h.size() != k) throw std::invalid_argument("AgentChainRates: sigma/h size mismatch");
    for (std::size_t i = 0; i < k; ++i) {
        if (sigma[i].size() != k || h[i].size() != k)
            throw std::invalid_argument("AgentChainRates: matrices must be K x K");
        for (std::size_t j = 0; j < k; ++j)
            if (sigma[i][j] < 0.0 || h[i][j] < 0.0)
                throw std::invalid_argument("AgentChainRates: rates must be >= 0");
    }
}

AgentChainRates two_state_chain(double eps_cf, double eps_fc) {
    AgentChainRates r;
    r.sigma = {{0.0, eps_fc}, {eps_cf, 0.0}};
    r.h = {{0.0, 1.0}, {1.0, 0.0}};
    return r;
}

AgentChainRates three_state_chain(const MarketParams& p) {
    // States: 0 fundamentalist, 1 optimist, 2 pessimist. In scaled time
    // the idiosyncratic f->o/f->p rate is eps_fc/2 each, o<->p runs H
    // times faster, and all herding terms count peers in the target state.
    AgentChainRates r;
    const double e_fc2 = 0.5 * p.eps_fc;
    r.sigma = {{0.0, e_fc2, e_fc2},
               {p.eps_cf, 0.0, p.H * p.eps_cc},
               {p.eps_cf, p.H * p.eps_cc, 0.0}};
    r.h = {{0.0, 1.0, 1.0},
           {1.0, 0.0, p.H},
           {1.0, p.H, 0.0}};
    return r;
}

SampledSeries simulate_agent_chain(int n_agents, const AgentChainRates& rates, double duration,
                                   double sample_dt, std::uint64_t seed,
                                   std::vector<int> initial_counts) {
    rates.validate();
    if (n_agents < 2) throw std::invalid_argument("simulate_agent_chain: need at least 2 agents");
    if (!(sample_dt > 0.0) || !(duration >= sample_dt))
        throw std::invalid_argument("simulate_agent_chain: need duration >= sample_dt > 0");
    const std::size_t k = rates.n_states();
    std::vector<int> counts = std::move(initial_counts);
    if (counts.empty()) {
        counts.assign(k, static_cast<int>(n_agents / k));
        counts[0] += n_agents - static_cast<int>(k) * (n_agents / static_cast<int>(k));
    }
    if (counts.size() != k || std::accumulate(counts.begin(), counts.end(), 0) != n_agents)
        throw std::invalid_argument("simulate_agent_chain: initial counts must sum to N over K states");

    Xoshiro256 rng(seed);
    SampledSeries out;
    out.t0 = 0.0;
    out.dt = sample_dt;
    out.unit = "model";
    out.seed = seed;
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(duration / sample_dt)) + 1;
    out.values.reserve(n_samples);
    out.values.push_back(static_cast<double>(counts[0]) / n_agents);

    std::vector<double> channel(k * k, 0.0);
    double t = 0.0;
    std::size_t next_sample = 1;
    while (next_sample < n_samples) {
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (i == j) { channel[i * k + j] = 0.0; continue; }
                const double per_agent = rates.sigma[i][j] + rates.h[i][j] * counts[j];
                const double c = counts[i] * per_agent;
                channel[i * k + j] = c;
                total += c;
            }
        }
        if (total <= 0.0) break; // absorbed; hold the state for remaining samples
        const double dt_event = -std::log(rng.uniform_pos()) / total;
        const double t_event = t + dt_event;
        while (next_sample < n_samples &&
               static_cast<double>(next_sample) * sample_dt <= t_event) {
            out.values.push_back(static_cast<double>(counts[0]) / n_agents);
            ++next_sample;
        }
        double pick = rng.uniform() * total;
        std::size_t chosen = 0;
        for (std::size_t c = 0; c < channel.size(); ++c) {
            pick -= channel[c];
            if (pick <= 0.0) { chosen = c; break; }
        }
        const std::size_t from = chosen / k, to = chosen % k;
        if (counts[from] > 0) { --counts[from]; ++counts[to]; }
        t = t_event;
    }
    while (next_sample < n_samples) {
        out.values.push_back(static_cast<double>(counts[0]) / n_agents);
        ++next_sample;
    }
    return out;
}

} // namespace burstlab
