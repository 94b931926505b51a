#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctfm/waveform.hpp"

namespace ctfm {

inline constexpr double kDefaultSoundSpeed = 1500.0;  // m/s, sea water

/// Point reflector.
struct Echo {
    double delay = 0.0;      // s, two-way
    double amplitude = 1.0;

    bool operator==(const Echo&) const = default;
};

struct Scene {
    std::vector<Echo> echoes;
    double sound_speed = kDefaultSoundSpeed;
    // Additive white Gaussian noise, off when sigma == 0.
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;
};

inline void validate(const Scene& scene, const SweepSchedule& schedule) {
    if (!(scene.sound_speed > 0.0)) throw ConfigError("sound speed must be positive");
    if (!(scene.noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
    for (const auto& e : scene.echoes) {
        if (!(e.delay >= 0.0)) throw ConfigError("echo delay must be non-negative");
        if (!std::isfinite(e.amplitude)) throw ConfigError("echo amplitude must be finite");
        if (e.delay >= schedule.period())
            throw UnsupportedRangeError("echo delay " + std::to_string(e.delay) +
                                        " s must be < sweep duration " + std::to_string(schedule.period()) +
                                        " s");
    }
}

/// Sum of delayed, scaled copies of the full multi-cycle transmit stream,
/// evaluated in closed form at every sample instant. Nothing arrives before
/// t = delay. Delays that are a whole number of samples reuse the transmit
/// sample grid, so the result is the transmit signal shifted bit-for-bit.
inline SampledSignal synthesize_received(const SweepSchedule& schedule, const Scene& scene, double sample_rate) {
    check_sample_rate(schedule, sample_rate);
    validate(scene, schedule);
    const auto n = schedule_sample_count(schedule, sample_rate);
    std::vector<double> out(n, 0.0);
    for (const auto& echo : scene.echoes) {
        const double shift = echo.delay * sample_rate;
        const double whole = std::round(shift);
        const bool integral = std::abs(shift - whole) < 1e-9;
        const auto m = static_cast<long long>(whole);
        for (std::size_t i = 0; i < n; ++i) {
            const double t_echo = integral ? static_cast<double>(static_cast<long long>(i) - m) / sample_rate
                                           : static_cast<double>(i) / sample_rate - echo.delay;
            if (t_echo < 0.0) continue;
            const auto ct = split_time(t_echo, schedule.period());
            out[i] += echo.amplitude * std::cos(tx_phase(schedule.tx(), ct.local));
        }
    }
    if (scene.noise_sigma > 0.0) {
        std::mt19937_64 rng(scene.noise_seed);
        std::normal_distribution<double> noise(0.0, scene.noise_sigma);
        for (auto& v : out) v += noise(rng);
    }
    return SampledSignal(sample_rate, std::move(out));
}

/// Dechirped tone frequency for a reflector at delay tau.
inline double beat_frequency(double mu, double tau) {
    if (!(tau >= 0.0)) throw DomainError("delay must be non-negative");
    return mu * tau;
}

/// Two-way travel: r = C tau / 2.
inline double delay_to_range(double tau, double sound_speed) {
    if (!(tau >= 0.0) || !(sound_speed > 0.0)) throw DomainError("delay >= 0 and sound speed > 0 required");
    return sound_speed * tau / 2.0;
}

/// Conventional CTFM range resolution C / 2B.
inline double ctfm_resolution(double bandwidth, double sound_speed) {
    if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
    return sound_speed / (2.0 * bandwidth);
}

}  // namespace ctfm
