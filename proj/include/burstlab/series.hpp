#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace burstlab {

// Uniformly sampled real-valued time series. `unit` records what one
// unit of t means ("model" for intrinsic SDE time, "days" for trading
// days). `seed` is provenance: the seed of the run that produced it.
struct SampledSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::string unit = "model";
    std::vector<double> values;
    std::uint64_t seed = 0;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SampledSeries: dt must be > 0");
        if (values.size() < 2) throw std::invalid_argument("SampledSeries: length must be >= 2");
    }
};

} // namespace burstlab
