#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burstlab/series.hpp"

namespace burstlab {

// Burst anatomy of a thresholded signal: a burst starts at an upward
// crossing of h_x (value goes from < h_x to >= h_x), ends at the next
// downward crossing, and the next upward crossing closes the triple.
//   tau   = duration above threshold
//   T     = up-crossing to next up-crossing (burst return interval)
//   theta = T - tau (time below threshold between bursts)
// Values are in the input series' time units (index gap * dt); T is
// stored as tau + theta so the identity holds exactly.
struct IntervalSet {
    std::vector<double> tau;
    std::vector<double> T;
    std::vector<double> theta;
    std::string unit;

    std::size_t size() const { return tau.size(); }
};

// Equality with the threshold counts as "above". The trailing
// incomplete burst (no closing up-crossing) is discarded. A series
// that never crosses yields an empty set.
IntervalSet extract_bursts(const SampledSeries& series, double h_x);

// Gaps, in samples, between consecutive exceedances (value >= q) of a
// nonnegative series. q is in units of standard deviations: when
// pre_normalized is false the series is divided by its own sample
// standard deviation first.
struct ThresholdIntervals {
    double q = 0.0;
    std::vector<double> intervals; // in samples, each >= 1
    double mean_T = 0.0;
};

// `boundaries` (optional) are segment start indices of a concatenated
// data set; an interval whose two exceedances straddle a boundary is
// dropped rather than counted across unrelated segments.
ThresholdIntervals extract_threshold_intervals(std::span<const double> abs_values, double q,
                                               bool pre_normalized,
                                               std::span<const std::size_t> boundaries = {});

// intervals / mean(intervals); the result has mean 1.
std::vector<double> scale_by_mean(std::span<const double> intervals);

// Streaming exceedance-gap tracker (the engine behind
// extract_threshold_intervals). Feed normalized values in order; an
// interval is emitted at every exceedance after the first. reset()
// breaks the chain at data-set boundaries.
class ExceedanceTracker {
  public:
    explicit ExceedanceTracker(double q) : q_(q) {}

    std::optional<std::int64_t> feed(double value) {
        const std::int64_t i = index_++;
        if (!(value >= q_)) return std::nullopt;
        std::optional<std::int64_t> gap;
        if (last_hit_ >= 0) gap = i - last_hit_;
        last_hit_ = i;
        return gap;
    }

    void reset() { last_hit_ = -1; }

  private:
    double q_;
    std::int64_t index_ = 0;
    std::int64_t last_hit_ = -1;
};

} // namespace burstlab
