#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "burstlab/series.hpp"

namespace burstlab {

// Log-binned probability density. Bin edges are anchored to the decimal
// grid (edge index i maps to 10^(i/bins_per_decade)), so histograms of
// different data sets with the same bins_per_decade share bin edges and
// can be compared bin by bin. Normalized: sum(density * width) == 1.
struct LogHistogram {
    std::vector<double> bin_edges; // size n_bins + 1, strictly increasing
    std::vector<double> density;   // probability density per bin
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    std::size_t n_bins() const { return counts.size(); }
    double center(std::size_t i) const; // geometric mean of the bin's edges
    std::vector<double> centers() const;
};

// Streaming accumulator behind log_binned_pdf; usable when the data is
// too large to materialize. Values must be positive.
class LogBinAccumulator {
  public:
    explicit LogBinAccumulator(int bins_per_decade);
    void add(double value);
    void add_count(double value, std::int64_t count);
    LogHistogram finalize() const; // trims empty leading/trailing bins
    std::int64_t total() const { return total_; }

  private:
    int bpd_;
    long base_index_ = 0;
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

LogHistogram log_binned_pdf(std::span<const double> values, int bins_per_decade);

// Averaged-periodogram spectral density estimate. freq is in cycles per
// unit of the input series' time step; power is one-sided, normalized so
// that sum(power) * df equals the mean per-segment variance.
struct PsdEstimate {
    std::vector<double> freq;
    std::vector<double> power;
    int n_segments = 0;
    bool log_binned = false;
};

// Streaming Welch accumulator: rectangular window, per-segment mean
// removal, non-overlapping segments of fixed length. Samples beyond the
// last whole segment are ignored.
class PsdAccumulator {
  public:
    PsdAccumulator(std::size_t segment_length, double dt);
    ~PsdAccumulator();
    PsdAccumulator(const PsdAccumulator&) = delete;
    PsdAccumulator& operator=(const PsdAccumulator&) = delete;

    void add(double value);
    int completed_segments() const { return n_segments_; }
    PsdEstimate finalize(int log_bins_per_decade = 0) const; // 0 = unbinned

  private:
    std::size_t seg_len_;
    double dt_;
    std::vector<double> buffer_;
    std::size_t fill_ = 0;
    std::vector<double> accum_; // summed |X_k|^2, k = 0 .. L/2
    int n_segments_ = 0;
    void* plan_ = nullptr;      // fftw_plan
    std::vector<double> fft_in_;
    std::vector<double> fft_out_; // fftw halfcomplex layout
    void flush_segment();
};

// n_segments >= 1 and series length >= 2 * n_segments required.
PsdEstimate estimate_psd(const SampledSeries& series, int n_segments,
                         int log_bins_per_decade = 0);

// Reduce a raw estimate onto decimal-grid log-frequency bins: power is
// averaged per bin, the representative frequency is the geometric mean
// of the bin edges, bins containing no points are dropped.
PsdEstimate log_bin_psd(const PsdEstimate& raw, int bins_per_decade);

// Straight-line fit in log10-log10 coordinates over xs in [fit_lo, fit_hi].
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0; // log10 y at log10 x = 0
    double stderr_slope = 0.0;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    int n_points = 0;
};

// Ordinary least squares on (log10 x, log10 y) using the points with
// fit_lo <= x <= fit_hi and y > 0. Requires at least 5 usable points.
SlopeFit fit_power_law_slope(std::span<const double> xs, std::span<const double> ys,
                             double fit_lo, double fit_hi);
SlopeFit fit_power_law_slope(const LogHistogram& hist, double fit_lo, double fit_hi);
SlopeFit fit_power_law_slope(const PsdEstimate& psd, double fit_lo, double fit_hi);

// Kolmogorov-Smirnov distances. The one-sample form takes any CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction;
// feeds the Beta-distribution oracle CDFs.
double regularized_incomplete_beta(double a, double b, double x);

double mean(std::span<const double> v);
double sample_stddev(std::span<const double> v); // n-1 denominator

} // namespace burstlab
