#include "burstlab/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace burstlab {

namespace {

// FFTW's planner is not thread-safe; executing distinct plans is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

double LogHistogram::center(std::size_t i) const {
    return std::sqrt(bin_edges[i] * bin_edges[i + 1]);
}

std::vector<double> LogHistogram::centers() const {
    std::vector<double> c(n_bins());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = center(i);
    return c;
}

LogBinAccumulator::LogBinAccumulator(int bins_per_decade) : bpd_(bins_per_decade) {
    if (bins_per_decade < 2) throw std::invalid_argument("LogBinAccumulator: bins_per_decade must be >= 2");
}

void LogBinAccumulator::add(double value) { add_count(value, 1); }

void LogBinAccumulator::add_count(double value, std::int64_t count) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument("LogBinAccumulator: values must be positive and finite");
    const long idx = static_cast<long>(std::floor(std::log10(value) * bpd_));
    if (counts_.empty()) {
        base_index_ = idx;
        counts_.assign(1, 0);
    } else if (idx < base_index_) {
        counts_.insert(counts_.begin(), static_cast<std::size_t>(base_index_ - idx), 0);
        base_index_ = idx;
    } else if (idx >= base_index_ + static_cast<long>(counts_.size())) {
        counts_.resize(static_cast<std::size_t>(idx - base_index_ + 1), 0);
    }
    counts_[static_cast<std::size_t>(idx - base_index_)] += count;
    total_ += count;
}

LogHistogram LogBinAccumulator::finalize() const {
    if (total_ == 0) throw std::logic_error("LogBinAccumulator: no data");
    std::size_t first = 0, last = counts_.size();
    while (first < last && counts_[first] == 0) ++first;
    while (last > first && counts_[last - 1] == 0) --last;
    const std::size_t n = last - first;
    LogHistogram h;
    h.counts.assign(counts_.begin() + static_cast<long>(first), counts_.begin() + static_cast<long>(last));
    h.total = total_;
    h.bin_edges.resize(n + 1);
    h.density.resize(n);
    for (std::size_t i = 0; i <= n; ++i) {
        const long idx = base_index_ + static_cast<long>(first + i);
        h.bin_edges[i] = std::pow(10.0, static_cast<double>(idx) / bpd_);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double width = h.bin_edges[i + 1] - h.bin_edges[i];
        h.density[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(total_) * width);
    }
    return h;
}

LogHistogram log_binned_pdf(std::span<const double> values, int bins_per_decade) {
    if (values.empty()) throw std::invalid_argument("log_binned_pdf: empty input");
    LogBinAccumulator acc(bins_per_decade);
    for (double v : values) acc.add(v);
    return acc.finalize();
}

PsdAccumulator::PsdAccumulator(std::size_t segment_length, double dt)
    : seg_len_(segment_length), dt_(dt) {
    if (segment_length < 2) throw std::invalid_argument("PsdAccumulator: segment_length must be >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("PsdAccumulator: dt must be > 0");
    buffer_.resize(seg_len_);
    accum_.assign(seg_len_ / 2 + 1, 0.0);
    fft_in_.resize(seg_len_);
    fft_out_.resize(seg_len_);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_r2r_1d(static_cast<int>(seg_len_), fft_in_.data(), fft_out_.data(),
                             FFTW_R2HC, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("PsdAccumulator: fftw plan creation failed");
}

PsdAccumulator::~PsdAccumulator() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void PsdAccumulator::add(double value) {
    buffer_[fill_++] = value;
    if (fill_ == seg_len_) {
        flush_segment();
        fill_ = 0;
    }
}

void PsdAccumulator::flush_segment() {
    double m = 0.0;
    for (double v : buffer_) m += v;
    m /= static_cast<double>(seg_len_);
    for (std::size_t i = 0; i < seg_len_; ++i) fft_in_[i] = buffer_[i] - m;
    fftw_execute(static_cast<fftw_plan>(plan_));
    // Halfcomplex layout: r0, r1, ..., r_{L/2}, i_{(L+1)/2-1}, ..., i_1.
    const std::size_t half = seg_len_ / 2;
    accum_[0] += fft_out_[0] * fft_out_[0];
    for (std::size_t k = 1; k < (seg_len_ + 1) / 2; ++k) {
        const double re = fft_out_[k];
        const double im = fft_out_[seg_len_ - k];
        accum_[k] += re * re + im * im;
    }
    if (seg_len_ % 2 == 0) accum_[half] += fft_out_[half] * fft_out_[half];
    ++n_segments_;
}

PsdEstimate PsdAccumulator::finalize(int log_bins_per_decade) const {
    if (n_segments_ == 0) throw std::logic_error("PsdAccumulator: no complete segment");
    PsdEstimate est;
    est.n_segments = n_segments_;
    const std::size_t half = seg_len_ / 2;
    est.freq.reserve(half);
    est.power.reserve(half);
    // One-sided, k = 0 dropped (mean removed). With S(f_k) as below,
    // sum_k S(f_k) * df = per-segment variance (Parseval).
    const double norm = 2.0 * dt_ / (static_cast<double>(seg_len_) * n_segments_);
    for (std::size_t k = 1; k <= half; ++k) {
        const double f = static_cast<double>(k) / (static_cast<double>(seg_len_) * dt_);
        double p = norm * accum_[k];
        if (k == half && seg_len_ % 2 == 0) p *= 0.5; // Nyquist bin is not doubled
        est.freq.push_back(f);
        est.power.push_back(p);
    }
    if (log_bins_per_decade > 0) return log_bin_psd(est, log_bins_per_decade);
    return est;
}

PsdEstimate estimate_psd(const SampledSeries& series, int n_segments, int log_bins_per_decade) {
    series.validate();
    if (n_segments < 1) throw std::invalid_argument("estimate_psd: n_segments must be >= 1");
    if (series.values.size() < 2 * static_cast<std::size_t>(n_segments))
        throw std::invalid_argument("estimate_psd: series too short for segment count");
    const std::size_t seg_len = series.values.size() / static_cast<std::size_t>(n_segments);
    PsdAccumulator acc(seg_len, series.dt);
    for (std::size_t i = 0; i < seg_len * static_cast<std::size_t>(n_segments); ++i)
        acc.add(series.values[i]);
    return acc.finalize(log_bins_per_decade);
}

PsdEstimate log_bin_psd(const PsdEstimate& raw, int bins_per_decade) {
    if (bins_per_decade < 2) throw std::invalid_argument("log_bin_psd: bins_per_decade must be >= 2");
    if (raw.freq.empty()) throw std::invalid_argument("log_bin_psd: empty estimate");
    PsdEstimate out;
    out.n_segments = raw.n_segments;
    out.log_binned = true;
    const double bpd = bins_per_decade;
    long current = 0;
    double sum = 0.0;
    long count = 0;
    auto emit = [&]() {
        if (count == 0) return;
        const double lo = std::pow(10.0, static_cast<double>(current) / bpd);
        const double hi = std::pow(10.0, static_cast<double>(current + 1) / bpd);
        out.freq.push_back(std::sqrt(lo * hi));
        out.power.push_back(sum / static_cast<double>(count));
    };
    for (std::size_t i = 0; i < raw.freq.size(); ++i) {
        const long idx = static_cast<long>(std::floor(std::log10(raw.freq[i]) * bpd));
        if (count > 0 && idx != current) {
            emit();
            sum = 0.0;
            count = 0;
        }
        current = idx;
        sum += raw.power[i];
        ++count;
    }
    emit();
    return out;
}

SlopeFit fit_power_law_slope(std::span<const double> xs, std::span<const double> ys,
                             double fit_lo, double fit_hi) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_power_law_slope: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] >= fit_lo && xs[i] <= fit_hi && ys[i] > 0.0 && xs[i] > 0.0) {
            lx.push_back(std::log10(xs[i]));
            ly.push_back(std::log10(ys[i]));
        }
    }
    const int n = static_cast<int>(lx.size());
    if (n < 5) throw std::invalid_argument("fit_power_law_slope: fewer than 5 usable points in range");
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) { mx += lx[i]; my += ly[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_power_law_slope: degenerate x values");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.fit_lo = fit_lo;
    fit.fit_hi = fit_hi;
    fit.n_points = n;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ssr += r * r;
    }
    fit.stderr_slope = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return fit;
}

SlopeFit fit_power_law_slope(const LogHistogram& hist, double fit_lo, double fit_hi) {
    return fit_power_law_slope(hist.centers(), hist.density, fit_lo, fit_hi);
}

SlopeFit fit_power_law_slope(const PsdEstimate& psd, double fit_lo, double fit_hi) {
    return fit_power_law_slope(psd.freq, psd.power, fit_lo, fit_hi);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample set");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz).
double ibeta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-15) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("regularized_incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
    if (v.size() < 2) throw std::invalid_argument("sample_stddev: need at least 2 values");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace burstlab
