#include "vistra/time_series.hpp"

#include <cmath>
#include <stdexcept>

namespace vistra {

namespace {

void check_values(const std::vector<double>& values, double dt) {
    if (values.empty()) throw std::invalid_argument("time series must not be empty");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sampling interval must be positive");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
        }
    }
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, double dt, double t0)
    : values_(std::move(values)), dt_(dt), t0_(t0) {
    check_values(values_, dt_);
    if (!std::isfinite(t0_)) throw std::invalid_argument("start time must be finite");
}

TimeSeries TimeSeries::with_times(std::vector<double> values, std::vector<double> times, double dt) {
    check_values(values, dt);
    if (times.size() != values.size()) throw std::invalid_argument("timestamp count differs from sample count");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw std::invalid_argument("non-finite timestamp");
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("timestamps must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
    TimeSeries s;
    s.values_ = std::move(values);
    s.times_ = std::move(times);
    s.dt_ = dt;
    s.t0_ = s.times_.front();
    return s;
}

double TimeSeries::time(std::size_t i) const {
    return times_.empty() ? t0_ + static_cast<double>(i) * dt_ : times_[i];
}

double TimeSeries::elapsed(std::size_t i) const {
    return times_.empty() ? static_cast<double>(i) * dt_ : times_[i] - times_.front();
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t count) const {
    if (count == 0 || begin + count > size()) throw std::invalid_argument("slice out of range");
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                          values_.begin() + static_cast<std::ptrdiff_t>(begin + count));
    if (times_.empty()) return TimeSeries(std::move(v), dt_, time(begin));
    std::vector<double> t(times_.begin() + static_cast<std::ptrdiff_t>(begin),
                          times_.begin() + static_cast<std::ptrdiff_t>(begin + count));
    return with_times(std::move(v), std::move(t), dt_);
}

const TimeSeries& MultiChannelSignal::channel(const std::string& name) const {
    if (const auto* s = find_channel(name)) return *s;
    throw std::invalid_argument("signal '" + id + "' has no channel '" + name + "'");
}

const TimeSeries* MultiChannelSignal::find_channel(const std::string& name) const {
    for (std::size_t i = 0; i < channel_names.size(); ++i) {
        if (channel_names[i] == name) return &channels[i];
    }
    return nullptr;
}

void MultiChannelSignal::add_channel(std::string name, TimeSeries series) {
    if (find_channel(name)) throw std::invalid_argument("duplicate channel '" + name + "'");
    channel_names.push_back(std::move(name));
    channels.push_back(std::move(series));
}

void MultiChannelSignal::validate() const {
    if (channels.empty()) throw std::invalid_argument("signal '" + id + "' has no channels");
    if (channels.size() != channel_names.size()) throw std::invalid_argument("channel name count mismatch");
    const TimeSeries& first = channels.front();
    for (std::size_t i = 1; i < channels.size(); ++i) {
        const TimeSeries& c = channels[i];
        if (c.dt() != first.dt()) {
            throw std::invalid_argument("channel '" + channel_names[i] + "' has a different sampling interval");
        }
        if (!c.has_explicit_times() && !first.has_explicit_times() && c.size() != first.size()) {
            throw std::invalid_argument("channel '" + channel_names[i] + "' has a different length");
        }
    }
}

}  // namespace vistra
