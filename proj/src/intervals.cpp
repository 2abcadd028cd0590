#include "burstlab/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "burstlab/stats.hpp"

namespace burstlab {

IntervalSet extract_bursts(const SampledSeries& series, double h_x) {
    if (series.values.size() < 3) throw std::invalid_argument("extract_bursts: series length must be >= 3");
    IntervalSet out;
    out.unit = series.unit;
    const auto& v = series.values;
    const double dt = series.dt;
    std::int64_t up = -1;   // index of the opening up-crossing
    std::int64_t down = -1; // index of the down-crossing that closed it
    for (std::size_t i = 1; i < v.size(); ++i) {
        const bool above_prev = v[i - 1] >= h_x;
        const bool above_now = v[i] >= h_x;
        if (!above_prev && above_now) {
            if (up >= 0 && down >= 0) {
                const double tau = static_cast<double>(down - up) * dt;
                const double theta = static_cast<double>(static_cast<std::int64_t>(i) - down) * dt;
                out.tau.push_back(tau);
                out.theta.push_back(theta);
                out.T.push_back(tau + theta);
            }
            up = static_cast<std::int64_t>(i);
            down = -1;
        } else if (above_prev && !above_now) {
            if (up >= 0) down = static_cast<std::int64_t>(i);
        }
    }
    return out;
}

ThresholdIntervals extract_threshold_intervals(std::span<const double> abs_values, double q,
                                               bool pre_normalized,
                                               std::span<const std::size_t> boundaries) {
    if (abs_values.empty()) throw std::invalid_argument("extract_threshold_intervals: empty input");
    double scale = 1.0;
    if (!pre_normalized) {
        const double sd = sample_stddev(abs_values);
        if (!(sd > 0.0)) throw std::invalid_argument("extract_threshold_intervals: zero-variance series");
        scale = 1.0 / sd;
    }
    ThresholdIntervals out;
    out.q = q;
    ExceedanceTracker tracker(q);
    std::size_t next_boundary = 0;
    for (std::size_t i = 0; i < abs_values.size(); ++i) {
        while (next_boundary < boundaries.size() && boundaries[next_boundary] == i) {
            tracker.reset();
            ++next_boundary;
        }
        if (auto gap = tracker.feed(abs_values[i] * scale))
            out.intervals.push_back(static_cast<double>(*gap));
    }
    if (!out.intervals.empty()) {
        double s = 0.0;
        for (double t : out.intervals) s += t;
        out.mean_T = s / static_cast<double>(out.intervals.size());
    }
    return out;
}

std::vector<double> scale_by_mean(std::span<const double> intervals) {
    if (intervals.empty()) throw std::invalid_argument("scale_by_mean: empty input");
    double m = 0.0;
    for (double t : intervals) m += t;
    m /= static_cast<double>(intervals.size());
    if (!(m > 0.0)) throw std::invalid_argument("scale_by_mean: nonpositive mean");
    std::vector<double> out(intervals.begin(), intervals.end());
    for (double& t : out) t /= m;
    return out;
}

} // namespace burstlab
