#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vistra/time_series.hpp"

namespace vistra::signals {

using State3 = std::array<double, 3>;

/// sin(5*pi*(t + phase)) sampled at t_i = i*dt. phase = 0 starts at 0.
TimeSeries gen_sinusoid(std::size_t n, double dt, double phase = 0.0);

/// Right-hand sides of the Lorenz (sigma=10, rho=28, beta=8/3) and
/// Rossler (a=0.2, b=0.2, c=5.7) systems.
State3 lorenz_rhs(const State3& s);
State3 rossler_rhs(const State3& s);

/// Fixed-step RK4 with internal step = dt; returns the x component, one
/// sample per step, starting with init[0]. Throws NumericError naming the
/// step if the state stops being finite.
TimeSeries integrate_lorenz(std::size_t n, double dt, const State3& init);
TimeSeries integrate_rossler(std::size_t n, double dt, const State3& init);

/// Reference initial conditions and sampling intervals for the artificial signals.
inline constexpr State3 kLorenzInit{2.0, 2.0, 20.0};
inline constexpr State3 kRosslerInit{-1.0, 0.0, 1.0};
inline constexpr double kSinusoidDt = 0.01;
inline constexpr double kLorenzDt = 0.01;
inline constexpr double kRosslerDt = 0.1;

/// Mean squared sample value.
double signal_power(const TimeSeries& series);

/// Adds zero-mean Gaussian noise with variance P/10^(snr_db/10). An infinite
/// snr_db returns the input unchanged. Throws std::invalid_argument when the
/// signal power is zero.
TimeSeries add_awgn(const TimeSeries& series, double snr_db, std::uint64_t seed);

/// Applies add_awgn to every channel; channel i uses seed ^ (i + 1) * golden-ratio constant.
MultiChannelSignal add_awgn(const MultiChannelSignal& signal, double snr_db, std::uint64_t seed);

struct PeakDetectParams {
    std::size_t w = 3;
};

/// Keeps x_k when (max(x_{k-w..k}) + max(x_{k..k+w})) / 2 <= x_k, evaluated on
/// the series padded with w zeros at both ends. Retained samples keep their
/// original timestamps.
TimeSeries peak_compress(const TimeSeries& series, PeakDetectParams params);

/// Indices (0-based) that peak_compress retains.
std::vector<std::size_t> peak_indices(std::span<const double> values, std::size_t w);

/// Amplitude sqrt(I^2+Q^2) and phase atan2(Q, I); phase is 0 at the origin.
std::pair<TimeSeries, TimeSeries> derive_channels(const TimeSeries& i, const TimeSeries& q);

/// Splits into k contiguous equal-length pieces.
std::vector<TimeSeries> segment(const TimeSeries& series, std::size_t k);

/// Labels of the synthetic I/Q stand-in, mirroring the 11 RadioML classes.
const std::vector<std::string>& iq_standin_labels();

/// Synthetic baseband I/Q burst for modulation class `label`: random symbols,
/// simple pulse shaping, then AWGN at snr_db. Not a channel model; only a
/// structurally similar substitute for converted RadioML records.
MultiChannelSignal gen_iq_standin(std::string_view label, std::size_t n, double snr_db, std::uint64_t seed);

}  // namespace vistra::signals
