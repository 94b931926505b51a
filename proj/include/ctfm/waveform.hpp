#pragma once

// Sawtooth-repeated linear FM transmit sweep and the phase-continuous local
// oscillator that extends it past the end of each sweep.
//
// All phase functions take *local* time, measured from the start of the sweep
// (transmit) or from the frequency-jump instant (oscillator). Use split_time()
// to map a global instant onto (cycle, local time).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctfm/error.hpp"

namespace ctfm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One linear up-sweep from f_start to f_end over `duration` seconds.
struct ChirpSpec {
    double f_start = 0.0;   // Hz
    double f_end = 0.0;     // Hz
    double duration = 0.0;  // s
    double phase0 = 0.0;    // rad

    bool operator==(const ChirpSpec&) const = default;
};

/// Oscillator sweep started at the transmit frequency jump.
struct LocalOscSpec {
    double f_start = 0.0;
    double f_end = 0.0;
    double duration = 0.0;
    double phase0 = 0.0;  // initial phase at the jump instant
};

inline void validate(const ChirpSpec& spec) {
    if (!(spec.duration > 0.0) || !std::isfinite(spec.duration))
        throw ConfigError("chirp duration must be positive and finite");
    if (!(spec.f_start >= 0.0) || !(spec.f_end >= 0.0) || !std::isfinite(spec.f_start) ||
        !std::isfinite(spec.f_end))
        throw ConfigError("chirp frequencies must be finite and non-negative");
    if (!std::isfinite(spec.phase0)) throw ConfigError("chirp phase0 must be finite");
}

inline void validate(const LocalOscSpec& spec) {
    validate(ChirpSpec{spec.f_start, spec.f_end, spec.duration, spec.phase0});
}

inline double sweep_rate(const ChirpSpec& spec) { return (spec.f_end - spec.f_start) / spec.duration; }
inline double sweep_rate(const LocalOscSpec& spec) { return (spec.f_end - spec.f_start) / spec.duration; }

inline double bandwidth(const ChirpSpec& spec) { return spec.f_end - spec.f_start; }

namespace detail {

inline double quadratic_phase(double phase0, double f_start, double rate, double t) {
    return phase0 + kTwoPi * (f_start * t + 0.5 * rate * t * t);
}

inline void check_local_time(double t_local, double duration, const char* what) {
    if (!(t_local >= 0.0 && t_local <= duration))
        throw DomainError(std::string(what) + ": local time " + std::to_string(t_local) +
                          " outside [0, " + std::to_string(duration) + "]");
}

}  // namespace detail

/// Unwrapped transmit phase at local time t_local in [0, duration].
inline double tx_phase(const ChirpSpec& spec, double t_local) {
    detail::check_local_time(t_local, spec.duration, "tx_phase");
    return detail::quadratic_phase(spec.phase0, spec.f_start, sweep_rate(spec), t_local);
}

/// Unwrapped oscillator phase, t_local measured from the jump instant.
inline double lo_phase(const LocalOscSpec& spec, double t_local) {
    detail::check_local_time(t_local, spec.duration, "lo_phase");
    return detail::quadratic_phase(spec.phase0, spec.f_start, sweep_rate(spec), t_local);
}

inline double tx_frequency(const ChirpSpec& spec, double t_local) {
    return spec.f_start + sweep_rate(spec) * t_local;
}

inline double lo_frequency(const LocalOscSpec& spec, double t_local) {
    return spec.f_start + sweep_rate(spec) * t_local;
}

/// Cycle index and time within that cycle.
struct CycleTime {
    long cycle = 0;
    double local = 0.0;
};

/// Maps global time onto the sawtooth. Instants within 1e-12 relative of a
/// cycle boundary snap to the start of the later cycle, so sample instants
/// that are exact multiples of the period never land at local time == period.
inline CycleTime split_time(double t_global, double period) {
    auto cycle = static_cast<long>(std::floor(t_global / period + 1e-12));
    double local = t_global - static_cast<double>(cycle) * period;
    if (local < 0.0) local = 0.0;
    return {cycle, local};
}

/// Transmit sweep plus the oscillator extension, repeated `cycles` times.
///
/// The oscillator starts at the transmit end frequency with the transmit
/// phase at t = T and keeps the transmit sweep rate.
class SweepSchedule {
public:
    /// Builds the oscillator from the transmit sweep; f_start and phase0 of the
    /// oscillator are always derived.
    static SweepSchedule continuing(const ChirpSpec& tx, double lo_f_end, double lo_duration, int cycles) {
        validate(tx);
        LocalOscSpec lo{tx.f_end, lo_f_end, lo_duration, tx_phase(tx, tx.duration)};
        return from_parts(tx, lo, cycles);
    }

    /// Validates an explicitly given oscillator against the continuity rules.
    static SweepSchedule from_parts(const ChirpSpec& tx, const LocalOscSpec& lo, int cycles) {
        validate(tx);
        validate(lo);
        if (cycles < 1) throw ConfigError("cycles must be a positive integer");
        if (lo.duration > tx.duration)
            throw ConfigError("oscillator duration must not exceed the sweep duration");
        if (lo.f_start != tx.f_end)
            throw ConfigError("oscillator must start at the transmit end frequency");
        const double mu_tx = sweep_rate(tx);
        const double mu_lo = sweep_rate(lo);
        const double scale = std::max({std::abs(mu_tx), std::abs(mu_lo), 1.0});
        if (std::abs(mu_tx - mu_lo) > 1e-9 * scale)
            throw ConfigError("oscillator sweep rate must equal the transmit sweep rate");
        const double d = lo.phase0 - tx_phase(tx, tx.duration);
        const double mismatch = std::remainder(d, kTwoPi);
        if (std::abs(mismatch) > 1e-9)
            throw ConfigError("oscillator initial phase must equal the transmit phase at the sweep end");
        return SweepSchedule(tx, lo, cycles);
    }

    const ChirpSpec& tx() const noexcept { return tx_; }
    const LocalOscSpec& lo() const noexcept { return lo_; }
    int cycles() const noexcept { return cycles_; }

    double period() const noexcept { return tx_.duration; }
    double total_duration() const noexcept { return cycles_ * tx_.duration; }
    double max_frequency() const noexcept {
        return std::max({tx_.f_start, tx_.f_end, lo_.f_start, lo_.f_end});
    }

private:
    SweepSchedule(ChirpSpec tx, LocalOscSpec lo, int cycles) : tx_(tx), lo_(lo), cycles_(cycles) {}

    ChirpSpec tx_;
    LocalOscSpec lo_;
    int cycles_;
};

/// Uniformly sampled real waveform.
class SampledSignal {
public:
    SampledSignal(double sample_rate, std::vector<double> samples, double t0 = 0.0)
        : sample_rate_(sample_rate), t0_(t0), samples_(std::move(samples)) {
        if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
            throw ConfigError("sample rate must be positive");
        if (samples_.empty()) throw ShapeError("a sampled signal needs at least one sample");
    }

    static SampledSignal zeros(double sample_rate, std::size_t count, double t0 = 0.0) {
        return SampledSignal(sample_rate, std::vector<double>(count, 0.0), t0);
    }

    double sample_rate() const noexcept { return sample_rate_; }
    double t0() const noexcept { return t0_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_; }
    double time_at(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) / sample_rate_; }

    std::span<const double> samples() const noexcept { return samples_; }
    std::vector<double>& mutable_samples() noexcept { return samples_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Copy of samples [first, first + count).
    SampledSignal slice(std::size_t first, std::size_t count) const {
        if (first + count > samples_.size() || count == 0) throw ShapeError("slice out of range");
        auto begin = samples_.begin() + static_cast<std::ptrdiff_t>(first);
        return SampledSignal(sample_rate_, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count)),
                             time_at(first));
    }

private:
    double sample_rate_;
    double t0_;
    std::vector<double> samples_;
};

inline std::size_t schedule_sample_count(const SweepSchedule& schedule, double sample_rate) {
    return static_cast<std::size_t>(std::llround(schedule.total_duration() * sample_rate));
}

inline void check_sample_rate(const SweepSchedule& schedule, double sample_rate) {
    if (!(sample_rate > 0.0) || sample_rate < 4.0 * schedule.max_frequency())
        throw ConfigError("sample rate " + std::to_string(sample_rate) +
                          " Hz is below 4x the highest sweep frequency");
}

/// Sawtooth transmit stream: each cycle restarts at phase0.
inline SampledSignal synthesize_transmit(const SweepSchedule& schedule, double sample_rate) {
    check_sample_rate(schedule, sample_rate);
    const auto n = schedule_sample_count(schedule, sample_rate);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ct = split_time(static_cast<double>(i) / sample_rate, schedule.period());
        out[i] = std::cos(tx_phase(schedule.tx(), ct.local));
    }
    return SampledSignal(sample_rate, std::move(out));
}

/// Oscillator stream, active over [kT, kT + lo.duration) and exactly zero elsewhere.
inline SampledSignal synthesize_lo(const SweepSchedule& schedule, double sample_rate) {
    check_sample_rate(schedule, sample_rate);
    const auto n = schedule_sample_count(schedule, sample_rate);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ct = split_time(static_cast<double>(i) / sample_rate, schedule.period());
        if (ct.local < schedule.lo().duration) out[i] = std::cos(lo_phase(schedule.lo(), ct.local));
    }
    return SampledSignal(sample_rate, std::move(out));
}

}  // namespace ctfm
