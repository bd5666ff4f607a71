#include "vistra/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vistra/error.hpp"

namespace vistra::signals {

namespace {

void check_grid(std::size_t n, double dt) {
    if (n == 0) throw std::invalid_argument("sample count must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sampling interval must be positive");
}

State3 axpy(const State3& s, double h, const State3& k) {
    return {s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]};
}

template <typename Rhs>
TimeSeries integrate_rk4(std::size_t n, double dt, const State3& init, Rhs rhs, const char* system) {
    check_grid(n, dt);
    std::vector<double> xs;
    xs.reserve(n);
    State3 s = init;
    xs.push_back(s[0]);
    for (std::size_t step = 1; step < n; ++step) {
        const State3 k1 = rhs(s);
        const State3 k2 = rhs(axpy(s, dt / 2.0, k1));
        const State3 k3 = rhs(axpy(s, dt / 2.0, k2));
        const State3 k4 = rhs(axpy(s, dt, k3));
        for (int d = 0; d < 3; ++d) s[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
            throw NumericError(std::string(system) + " integration diverged at step " + std::to_string(step));
        }
        xs.push_back(s[0]);
    }
    return TimeSeries(std::move(xs), dt);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

TimeSeries gen_sinusoid(std::size_t n, double dt, double phase) {
    check_grid(n, dt);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::sin(5.0 * std::numbers::pi * (static_cast<double>(i) * dt + phase));
    }
    return TimeSeries(std::move(v), dt);
}

State3 lorenz_rhs(const State3& s) {
    const auto [x, y, z] = s;
    return {-10.0 * (x - y), -y + 28.0 * x - x * z, x * y - 8.0 / 3.0 * z};
}

State3 rossler_rhs(const State3& s) {
    const auto [x, y, z] = s;
    return {-y - z, x + 0.2 * y, 0.2 + z * (x - 5.7)};
}

TimeSeries integrate_lorenz(std::size_t n, double dt, const State3& init) {
    return integrate_rk4(n, dt, init, lorenz_rhs, "Lorenz");
}

TimeSeries integrate_rossler(std::size_t n, double dt, const State3& init) {
    return integrate_rk4(n, dt, init, rossler_rhs, "Rossler");
}

double signal_power(const TimeSeries& series) {
    double acc = 0.0;
    for (double v : series.values()) acc += v * v;
    return acc / static_cast<double>(series.size());
}

TimeSeries add_awgn(const TimeSeries& series, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db)) throw std::invalid_argument("SNR must not be NaN");
    if (snr_db == std::numeric_limits<double>::infinity()) return series;
    const double power = signal_power(series);
    if (!(power > 0.0)) throw std::invalid_argument("SNR is undefined for a zero-power signal");
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> v(series.values().begin(), series.values().end());
    for (double& x : v) x += noise(rng);

    if (series.has_explicit_times()) {
        return TimeSeries::with_times(std::move(v), {series.explicit_times().begin(), series.explicit_times().end()},
                                      series.dt());
    }
    return TimeSeries(std::move(v), series.dt(), series.t0());
}

MultiChannelSignal add_awgn(const MultiChannelSignal& signal, double snr_db, std::uint64_t seed) {
    MultiChannelSignal out = signal;
    for (std::size_t i = 0; i < out.channels.size(); ++i) {
        out.channels[i] = add_awgn(signal.channels[i], snr_db, seed ^ ((i + 1) * kGolden));
    }
    if (std::isfinite(snr_db)) out.snr_db = snr_db;
    return out;
}

std::vector<std::size_t> peak_indices(std::span<const double> values, std::size_t w) {
    const std::size_t n = values.size();
    if (w < 1 || w >= n) throw std::invalid_argument("peak window must satisfy 1 <= w < length");
    // padded[j] == values[j - w] inside, 0 in the w-wide margins
    auto padded = [&](std::size_t j) { return (j < w || j >= n + w) ? 0.0 : values[j - w]; };

    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = k + w;
        double left = padded(j - w);
        double right = padded(j);
        for (std::size_t d = 1; d <= w; ++d) {
            left = std::max(left, padded(j - w + d));
            right = std::max(right, padded(j + d));
        }
        if ((left + right) / 2.0 <= values[k]) kept.push_back(k);
    }
    return kept;
}

TimeSeries peak_compress(const TimeSeries& series, PeakDetectParams params) {
    const auto kept = peak_indices(series.values(), params.w);
    if (kept.empty()) throw std::invalid_argument("peak detection retained no samples");
    std::vector<double> v;
    std::vector<double> t;
    v.reserve(kept.size());
    t.reserve(kept.size());
    for (std::size_t k : kept) {
        v.push_back(series[k]);
        t.push_back(series.time(k));
    }
    return TimeSeries::with_times(std::move(v), std::move(t), series.dt());
}

std::pair<TimeSeries, TimeSeries> derive_channels(const TimeSeries& i, const TimeSeries& q) {
    if (i.size() != q.size()) throw std::invalid_argument("I and Q lengths differ");
    if (i.dt() != q.dt()) throw std::invalid_argument("I and Q sampling intervals differ");
    std::vector<double> amp(i.size());
    std::vector<double> phase(i.size());
    for (std::size_t k = 0; k < i.size(); ++k) {
        amp[k] = std::hypot(i[k], q[k]);
        // atan2(0, 0) is 0 on IEEE platforms; keep it explicit for -0.0 inputs.
        phase[k] = (i[k] == 0.0 && q[k] == 0.0) ? 0.0 : std::atan2(q[k], i[k]);
    }
    if (i.has_explicit_times()) {
        std::vector<double> t(i.explicit_times().begin(), i.explicit_times().end());
        return {TimeSeries::with_times(std::move(amp), t, i.dt()),
                TimeSeries::with_times(std::move(phase), t, i.dt())};
    }
    return {TimeSeries(std::move(amp), i.dt(), i.t0()), TimeSeries(std::move(phase), i.dt(), i.t0())};
}

std::vector<TimeSeries> segment(const TimeSeries& series, std::size_t k) {
    if (k == 0 || series.size() % k != 0) {
        throw std::invalid_argument("length " + std::to_string(series.size()) + " is not divisible into " +
                                    std::to_string(k) + " segments");
    }
    const std::size_t len = series.size() / k;
    std::vector<TimeSeries> out;
    out.reserve(k);
    for (std::size_t s = 0; s < k; ++s) out.push_back(series.slice(s * len, len));
    return out;
}

const std::vector<std::string>& iq_standin_labels() {
    static const std::vector<std::string> labels{"8PSK",  "AM-DSB", "AM-SSB", "BPSK",  "CPFSK", "GFSK",
                                                 "PAM4",  "QAM16",  "QAM64",  "QPSK",  "WBFM"};
    return labels;
}

MultiChannelSignal gen_iq_standin(std::string_view label, std::size_t n, double snr_db, std::uint64_t seed) {
    using cd = std::complex<double>;
    constexpr double pi = std::numbers::pi;
    constexpr std::size_t sps = 8;  // samples per symbol
    const auto& labels = iq_standin_labels();
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
        throw std::invalid_argument("unknown modulation label '" + std::string(label) + "'");
    }
    if (n < 2) throw std::invalid_argument("stand-in signals need at least 2 samples");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n_sym = (n + sps - 1) / sps + 1;
    auto draw = [&](int levels) { return static_cast<int>(unit(rng) * levels) % levels; };

    std::vector<cd> x(n);
    auto hold = [&](const std::vector<cd>& symbols) {
        // Rectangular pulses smoothed by a half-symbol moving average.
        std::vector<cd> raw(n);
        for (std::size_t k = 0; k < n; ++k) raw[k] = symbols[k / sps];
        const std::size_t span = sps / 2;
        for (std::size_t k = 0; k < n; ++k) {
            cd acc = 0.0;
            std::size_t cnt = 0;
            for (std::size_t j = (k >= span ? k - span : 0); j <= std::min(n - 1, k + span); ++j, ++cnt) acc += raw[j];
            x[k] = acc / static_cast<double>(cnt);
        }
    };
    auto qam = [&](int side) {
        std::vector<cd> s(n_sym);
        for (auto& v : s) v = cd(2.0 * draw(side) - (side - 1), 2.0 * draw(side) - (side - 1));
        hold(s);
    };
    auto psk = [&](int order, double offset) {
        std::vector<cd> s(n_sym);
        for (auto& v : s) v = std::polar(1.0, offset + 2.0 * pi * draw(order) / order);
        hold(s);
    };
    auto fsk = [&](bool gaussian) {
        std::vector<double> freq(n);
        std::vector<double> bits(n_sym);
        for (auto& b : bits) b = draw(2) ? 1.0 : -1.0;
        for (std::size_t k = 0; k < n; ++k) freq[k] = bits[k / sps];
        if (gaussian) {
            std::vector<double> smooth(n);
            for (std::size_t k = 0; k < n; ++k) {
                double acc = 0.0, wsum = 0.0;
                for (std::size_t j = (k >= sps ? k - sps : 0); j <= std::min(n - 1, k + sps); ++j) {
                    const double d = (static_cast<double>(j) - static_cast<double>(k)) / (sps / 2.0);
                    const double w = std::exp(-0.5 * d * d);
                    acc += w * freq[j];
                    wsum += w;
                }
                smooth[k] = acc / wsum;
            }
            freq = smooth;
        }
        double phase = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            phase += pi * 0.5 * freq[k] / sps;
            x[k] = std::polar(1.0, phase);
        }
    };
    auto message = [&](std::size_t k, double f1, double f2, double p1, double p2) {
        const double t = static_cast<double>(k);
        return 0.6 * std::sin(2.0 * pi * f1 * t + p1) + 0.4 * std::sin(2.0 * pi * f2 * t + p2);
    };

    const double f1 = 0.01 + 0.03 * unit(rng);
    const double f2 = 0.02 + 0.05 * unit(rng);
    const double p1 = 2.0 * pi * unit(rng);
    const double p2 = 2.0 * pi * unit(rng);

    if (label == "BPSK") {
        psk(2, 0.0);
    } else if (label == "QPSK") {
        psk(4, pi / 4.0);
    } else if (label == "8PSK") {
        psk(8, 0.0);
    } else if (label == "QAM16") {
        qam(4);
    } else if (label == "QAM64") {
        qam(8);
    } else if (label == "PAM4") {
        std::vector<cd> s(n_sym);
        for (auto& v : s) v = cd(2.0 * draw(4) - 3.0, 0.0);
        hold(s);
    } else if (label == "CPFSK") {
        fsk(false);
    } else if (label == "GFSK") {
        fsk(true);
    } else if (label == "WBFM") {
        double phase = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            phase += 0.8 * message(k, f1, f2, p1, p2);
            x[k] = std::polar(1.0, phase);
        }
    } else if (label == "AM-DSB") {
        for (std::size_t k = 0; k < n; ++k) x[k] = cd(1.0 + 0.7 * message(k, f1, f2, p1, p2), 0.0);
    } else {  // AM-SSB
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k);
            x[k] = 0.6 * std::polar(1.0, 2.0 * pi * f1 * t + p1) + 0.4 * std::polar(1.0, 2.0 * pi * f2 * t + p2);
        }
    }

    // Random carrier phase and a small residual frequency offset.
    const double rot = 2.0 * pi * unit(rng);
    const double cfo = (unit(rng) - 0.5) * 0.002;
    double power = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        x[k] *= std::polar(1.0, rot + 2.0 * pi * cfo * static_cast<double>(k));
        power += std::norm(x[k]);
    }
    power /= static_cast<double>(n);
    const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 1.0;

    std::normal_distribution<double> noise(0.0, std::sqrt(0.5 / std::pow(10.0, snr_db / 10.0)));
    std::vector<double> i_ch(n), q_ch(n);
    for (std::size_t k = 0; k < n; ++k) {
        i_ch[k] = x[k].real() * scale + noise(rng);
        q_ch[k] = x[k].imag() * scale + noise(rng);
    }

    MultiChannelSignal s;
    s.label = std::string(label);
    s.snr_db = snr_db;
    s.add_channel("I", TimeSeries(std::move(i_ch), 1.0));
    s.add_channel("Q", TimeSeries(std::move(q_ch), 1.0));
    return s;
}

}  // namespace vistra::signals
