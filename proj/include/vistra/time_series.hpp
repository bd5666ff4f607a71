#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vistra {

/// One channel of samples. Timestamps are either the uniform grid
/// t_i = t0 + i*dt or, after peak compression, an explicit strictly
/// increasing list carried alongside the values.
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, double dt, double t0 = 0.0);

    /// Series with explicit timestamps; `dt` is kept as the nominal
    /// sampling interval of the grid the samples came from.
    static TimeSeries with_times(std::vector<double> values, std::vector<double> times, double dt);

    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double dt() const { return dt_; }
    double t0() const { return t0_; }
    bool has_explicit_times() const { return !times_.empty(); }
    std::span<const double> explicit_times() const { return times_; }

    double time(std::size_t i) const;

    /// Time elapsed since the first sample. Exact `i*dt` on uniform grids,
    /// so constructions built on it do not depend on t0.
    double elapsed(std::size_t i) const;

    TimeSeries slice(std::size_t begin, std::size_t count) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    TimeSeries() = default;

    std::vector<double> values_;
    std::vector<double> times_;
    double dt_ = 1.0;
    double t0_ = 0.0;
};

/// A labeled multi-channel signal. Channel order is the declaration order,
/// which is the order features get fused in.
struct MultiChannelSignal {
    std::string id;
    std::string label;
    std::optional<double> snr_db;
    std::vector<std::string> channel_names;
    std::vector<TimeSeries> channels;

    const TimeSeries& channel(const std::string& name) const;
    const TimeSeries* find_channel(const std::string& name) const;
    void add_channel(std::string name, TimeSeries series);

    /// Throws std::invalid_argument unless every channel shares length and dt.
    /// Channels carrying explicit timestamps are exempt from the length check.
    void validate() const;
};

}  // namespace vistra
