#pragma once

// Dual-demodulator receiver: channel 1 mixes the echo with the transmit
// sweep, channel 2 with the local oscillator; both products go through the
// same low-pass filter and are added. The filter does the segment selection:
// in blind time channel 1 sits at the jump frequency mu*(T - tau) and
// channel 2 at the beat mu*tau, outside blind time channel 2 sits at
// B + mu*tau, so a cutoff between mu*tau_max and B - mu*tau_max passes
// exactly one channel at a time.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ctfm/scene.hpp"
#include "ctfm/waveform.hpp"

namespace ctfm {

struct LowpassSpec {
    double cutoff = 50.0;       // Hz
    int tap_count = 513;        // odd
    double sample_rate = 4000.0;  // Hz
};

inline void validate(const LowpassSpec& spec) {
    if (!(spec.sample_rate > 0.0)) throw ConfigError("low-pass sample rate must be positive");
    if (!(spec.cutoff > 0.0) || !(spec.cutoff < spec.sample_rate / 2.0))
        throw ConfigError("low-pass cutoff must lie in (0, Nyquist)");
    if (spec.tap_count < 1 || spec.tap_count % 2 == 0)
        throw ConfigError("low-pass tap count must be a positive odd integer");
}

/// Seconds of delay introduced by the linear-phase filter.
inline double group_delay(const LowpassSpec& spec) {
    return (spec.tap_count - 1) / (2.0 * spec.sample_rate);
}

/// Prefix excluded from spectral analysis: group delay plus one filter length.
inline double settle_time(const LowpassSpec& spec) {
    return group_delay(spec) + spec.tap_count / spec.sample_rate;
}

/// Hamming-windowed sinc, normalised to unit DC gain.
inline std::vector<double> design_lowpass(const LowpassSpec& spec) {
    validate(spec);
    const int n = spec.tap_count;
    const double fc = spec.cutoff / spec.sample_rate;  // cycles/sample
    const double mid = (n - 1) / 2.0;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i <= n / 2; ++i) {
        const double x = i - mid;
        const double sinc = x == 0.0 ? 2.0 * fc : std::sin(kTwoPi * fc * x) / (std::numbers::pi * x);
        const double window = n == 1 ? 1.0 : 0.54 - 0.46 * std::cos(kTwoPi * i / (n - 1));
        h[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(n - 1 - i)] = sinc * window;
    }
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (auto& c : h) c /= sum;
    return h;
}

/// H(f) = sum_n h[n] exp(-j 2 pi f n / fs).
inline std::complex<double> frequency_response(std::span<const double> taps, double freq, double sample_rate) {
    std::complex<double> acc{0.0, 0.0};
    const double w = kTwoPi * freq / sample_rate;
    for (std::size_t i = 0; i < taps.size(); ++i) acc += taps[i] * std::polar(1.0, -w * static_cast<double>(i));
    return acc;
}

inline double response_db(std::span<const double> taps, double freq, double sample_rate) {
    return 20.0 * std::log10(std::abs(frequency_response(taps, freq, sample_rate)));
}

/// Causal FIR filtering with zero initial state; output has the input length.
inline SampledSignal apply_fir(std::span<const double> taps, const SampledSignal& x) {
    const auto n = x.size();
    const auto in = x.samples();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t jmax = std::min(i + 1, taps.size());
        double acc = 0.0;
        for (std::size_t j = 0; j < jmax; ++j) acc += taps[j] * in[i - j];
        out[i] = acc;
    }
    return SampledSignal(x.sample_rate(), std::move(out), x.t0());
}

inline void check_aligned(const SampledSignal& a, const SampledSignal& b) {
    if (a.size() != b.size() || a.sample_rate() != b.sample_rate() || a.t0() != b.t0())
        throw ShapeError("signals differ in length, sample rate or start time");
}

/// Element-wise product.
inline SampledSignal mix(const SampledSignal& a, const SampledSignal& b) {
    check_aligned(a, b);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return SampledSignal(a.sample_rate(), std::move(out), a.t0());
}

struct DemodOutput {
    SampledSignal channel1;
    SampledSignal channel2;
    SampledSignal sum;
    double group_delay = 0.0;  // s; outputs are not shifted
};

inline void check_filter_rate(const SampledSignal& s, const LowpassSpec& lp) {
    if (s.sample_rate() != lp.sample_rate) throw ShapeError("low-pass sample rate differs from signal sample rate");
}

/// Conventional single-channel CTFM: lowpass(tx * rx).
inline SampledSignal ctfm_demodulate(const SampledSignal& tx, const SampledSignal& rx, const LowpassSpec& lp) {
    check_aligned(tx, rx);
    check_filter_rate(tx, lp);
    const auto taps = design_lowpass(lp);
    return apply_fir(taps, mix(tx, rx));
}

inline DemodOutput demodulate(const SampledSignal& tx, const SampledSignal& lo, const SampledSignal& rx,
                              const LowpassSpec& lp) {
    check_aligned(tx, rx);
    check_aligned(lo, rx);
    check_filter_rate(tx, lp);
    const auto taps = design_lowpass(lp);
    auto ch1 = apply_fir(taps, mix(tx, rx));
    auto ch2 = apply_fir(taps, mix(lo, rx));
    std::vector<double> sum(ch1.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = ch1[i] + ch2[i];
    SampledSignal total(tx.sample_rate(), std::move(sum), tx.t0());
    return DemodOutput{std::move(ch1), std::move(ch2), std::move(total), group_delay(lp)};
}

/// Open interval of cutoffs that pass the beat of every echo up to the
/// oscillator duration and stop both the jump frequency and the channel-2
/// cross term.
struct CutoffRange {
    double low = 0.0;
    double high = 0.0;
};

inline CutoffRange feasible_cutoffs(const SweepSchedule& schedule) {
    const double mu = sweep_rate(schedule.tx());
    const double beat_max = mu * schedule.lo().duration;
    return {beat_max, bandwidth(schedule.tx()) - beat_max};
}

inline void check_cutoff_feasible(const SweepSchedule& schedule, const LowpassSpec& lp) {
    validate(lp);
    const auto range = feasible_cutoffs(schedule);
    if (!(lp.cutoff > range.low && lp.cutoff < range.high))
        throw ConfigError("low-pass cutoff " + std::to_string(lp.cutoff) + " Hz outside feasible interval (" +
                          std::to_string(range.low) + ", " + std::to_string(range.high) + ") Hz");
}

// ---------------------------------------------------------------------------
// Channel gating

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

struct GatingWindows {
    std::vector<TimeWindow> blind;      // channel 2 should dominate
    std::vector<TimeWindow> non_blind;  // channel 1 should dominate
};

/// Trim applied to both ends of each gating window: half the group delay.
inline double gating_margin(const LowpassSpec& lp) { return group_delay(lp) / 2.0; }

/// Blind [kT, kT + tau) and non-blind [kT + tau, (k+1)T) intervals mapped to
/// filter-output time (shifted by the group delay) and trimmed by
/// gating_margin(). Windows that start before the filter has settled, or
/// before the first echo arrives, are dropped.
inline GatingWindows gating_windows(const SweepSchedule& schedule, double tau, const LowpassSpec& lp) {
    const double T = schedule.period();
    const double gd = group_delay(lp);
    const double m = gating_margin(lp);
    const double earliest = std::max(settle_time(lp), tau + gd);
    const double last = schedule.total_duration();
    GatingWindows w;
    for (int k = 0; k < schedule.cycles(); ++k) {
        const TimeWindow blind{k * T + gd + m, k * T + tau + gd - m};
        const TimeWindow steady{k * T + tau + gd + m, (k + 1) * T + gd - m};
        if (blind.begin >= earliest && blind.end > blind.begin && blind.end <= last) w.blind.push_back(blind);
        if (steady.begin >= earliest && steady.end > steady.begin && steady.end <= last) w.non_blind.push_back(steady);
    }
    return w;
}

struct EnergyShare {
    double channel1 = 0.0;  // fraction of ch1^2 + ch2^2
    double channel2 = 0.0;
};

inline EnergyShare energy_share(const DemodOutput& out, const TimeWindow& window) {
    const double fs = out.sum.sample_rate();
    const auto first = static_cast<std::size_t>(std::ceil((window.begin - out.sum.t0()) * fs));
    const auto last = std::min(out.sum.size(), static_cast<std::size_t>(std::ceil((window.end - out.sum.t0()) * fs)));
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        e1 += out.channel1[i] * out.channel1[i];
        e2 += out.channel2[i] * out.channel2[i];
    }
    const double total = e1 + e2;
    if (total == 0.0) return {};
    return {e1 / total, e2 / total};
}

}  // namespace ctfm
