#pragma once

// Closed-form phase bookkeeping for the two demodulator channels.
//
// Channel 1 carries phi_x(t) - phi_y(t), channel 2 carries phi_l(t) - phi_y(t).
// Boundary instants are evaluated by substitution on closed intervals:
//   * the transmit sweep and the echo at an instant kT (or kT + tau for the
//     echo) are taken at the *end* of the sweep that just finished, so the
//     echo inside blind time follows the previous cycle's sweep;
//   * the oscillator at kT is taken at the start of its window.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctfm/waveform.hpp"

namespace ctfm {

/// Representative of theta mod 2 pi in (-pi, pi].
inline double wrap_phase(double theta) {
    if (!std::isfinite(theta)) throw DomainError("wrap_phase: non-finite phase");
    double r = std::remainder(theta, kTwoPi);
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

namespace detail {

// Sweep index whose closed interval [kT, (k+1)T] contains t, preferring the
// earlier sweep on a shared boundary.
inline CycleTime closed_cycle(double t, double period) {
    constexpr double kSnap = 1e-9;
    long k = t <= 0.0 ? 0 : static_cast<long>(std::ceil(t / period - kSnap)) - 1;
    if (k < 0) k = 0;
    double local = t - static_cast<double>(k) * period;
    local = std::clamp(local, 0.0, period);
    return {k, local};
}

inline void check_tau(const SweepSchedule& s, double tau) {
    if (!(tau >= 0.0)) throw DomainError("echo delay must be non-negative");
    if (tau >= s.period()) throw UnsupportedRangeError("echo delay must be < sweep duration");
}

inline void check_span(const SweepSchedule& s, double t) {
    if (!(t >= 0.0 && t <= s.total_duration() * (1.0 + 1e-12)))
        throw DomainError("instant " + std::to_string(t) + " s outside the simulated span");
}

}  // namespace detail

/// Unwrapped transmit phase at global t (closed-interval convention).
inline double transmit_phase_at(const SweepSchedule& s, double t) {
    detail::check_span(s, t);
    return tx_phase(s.tx(), detail::closed_cycle(t, s.period()).local);
}

/// Unwrapped echo phase phi_y at global t for a reflector at delay tau.
inline double echo_phase_at(const SweepSchedule& s, double tau, double t) {
    detail::check_tau(s, tau);
    detail::check_span(s, t);
    const double te = t - tau;
    if (te < -1e-12 * s.period()) throw DomainError("no echo before t = tau");
    return tx_phase(s.tx(), detail::closed_cycle(std::max(te, 0.0), s.period()).local);
}

/// Unwrapped oscillator phase at global t inside [kT, kT + lo.duration].
inline double oscillator_phase_at(const SweepSchedule& s, double t) {
    detail::check_span(s, t);
    const auto ct = split_time(t, s.period());
    if (ct.local > s.lo().duration * (1.0 + 1e-12))
        throw DomainError("instant " + std::to_string(t) + " s outside the oscillator window");
    return lo_phase(s.lo(), std::min(ct.local, s.lo().duration));
}

inline double channel1_phase(const SweepSchedule& s, double tau, double t) {
    detail::check_tau(s, tau);
    return transmit_phase_at(s, t) - echo_phase_at(s, tau, t);
}

inline double channel2_phase(const SweepSchedule& s, double tau, double t) {
    detail::check_tau(s, tau);
    return oscillator_phase_at(s, t) - echo_phase_at(s, tau, t);
}

/// Wrapped jump when the sum hands over from channel 2 back to channel 1 at
/// t = kT + tau.
inline double boundary_jump(const SweepSchedule& s, double tau, int k) {
    detail::check_tau(s, tau);
    if (k < 1 || k > s.cycles() - 1) throw DomainError("handoff cycle index must be in [1, cycles - 1]");
    if (tau > s.lo().duration) throw DomainError("echo delay exceeds the oscillator window");
    const double t = k * s.period() + tau;
    return wrap_phase(channel1_phase(s, tau, t) - channel2_phase(s, tau, t));
}

/// Wrapped jump when the sum hands over from channel 1 to channel 2 at t = kT.
/// Zero for every schedule whose oscillator starts in phase with the sweep end.
inline double handoff_jump(const SweepSchedule& s, double tau, int k) {
    if (k < 1 || k > s.cycles() - 1) throw DomainError("handoff cycle index must be in [1, cycles - 1]");
    const double t = k * s.period();
    return wrap_phase(channel2_phase(s, tau, t) - channel1_phase(s, tau, t));
}

/// wrap(-2 pi (B tau + f_c T)), f_c the sweep centre frequency.
inline double discontinuity_law(const SweepSchedule& s, double tau) {
    const auto& tx = s.tx();
    const double centre = 0.5 * (tx.f_start + tx.f_end);
    return wrap_phase(-kTwoPi * (bandwidth(tx) * tau + centre * tx.duration));
}

struct PhaseLedgerEntry {
    std::string label;
    double instant = 0.0;    // global time, s
    double unwrapped = 0.0;  // rad
    double wrapped = 0.0;    // rad in (-pi, pi]
};

struct Discontinuity {
    double instant = 0.0;
    double jump = 0.0;  // wrapped, rad
};

struct PhaseReport {
    std::vector<PhaseLedgerEntry> entries;
    std::vector<Discontinuity> discontinuities;

    const PhaseLedgerEntry* find(std::string_view label) const {
        for (const auto& e : entries)
            if (e.label == label) return &e;
        return nullptr;
    }
};

namespace ledger {
inline constexpr std::string_view kTxAtT = "phase of x(t) at t=T";
inline constexpr std::string_view kEchoAtT = "phase of y(t) at t=T";
inline constexpr std::string_view kLoAtT = "phase of z(t) at t=T";
inline constexpr std::string_view kTxAtTTau = "phase of x(t) at t=T+tau";
inline constexpr std::string_view kEchoAtTTau = "phase of y(t) at t=T+tau";
inline constexpr std::string_view kLoAtTTau = "phase of z(t) at t=T+tau";
inline constexpr std::string_view kCh1AtT = "phase of channel 1 at t=T";
inline constexpr std::string_view kCh2AtT = "phase of channel 2 at t=T";
inline constexpr std::string_view kCh1AtTTau = "phase of channel 1 at t=T+tau";
inline constexpr std::string_view kCh2AtTTau = "phase of channel 2 at t=T+tau";
}  // namespace ledger

/// Phase ledger around the first sweep boundary, plus every handoff jump.
inline PhaseReport phase_table(const SweepSchedule& s, double tau) {
    detail::check_tau(s, tau);
    if (tau > s.lo().duration) throw DomainError("echo delay exceeds the oscillator window");
    const double T = s.period();
    const double t1 = T;
    const double t2 = T + tau;

    PhaseReport report;
    auto add = [&](std::string_view label, double instant, double value) {
        report.entries.push_back({std::string(label), instant, value, wrap_phase(value)});
    };
    add(ledger::kTxAtT, t1, transmit_phase_at(s, t1));
    add(ledger::kEchoAtT, t1, echo_phase_at(s, tau, t1));
    add(ledger::kLoAtT, t1, oscillator_phase_at(s, t1));
    add(ledger::kTxAtTTau, t2, transmit_phase_at(s, t2));
    add(ledger::kEchoAtTTau, t2, echo_phase_at(s, tau, t2));
    add(ledger::kLoAtTTau, t2, oscillator_phase_at(s, t2));
    add(ledger::kCh1AtT, t1, channel1_phase(s, tau, t1));
    add(ledger::kCh2AtT, t1, channel2_phase(s, tau, t1));
    add(ledger::kCh1AtTTau, t2, channel1_phase(s, tau, t2));
    add(ledger::kCh2AtTTau, t2, channel2_phase(s, tau, t2));

    for (int k = 1; k < s.cycles(); ++k) {
        report.discontinuities.push_back({k * T, handoff_jump(s, tau, k)});
        report.discontinuities.push_back({k * T + tau, boundary_jump(s, tau, k)});
    }
    return report;
}

/// `label,instant_s,unwrapped_pi,wrapped_pi` rows, phases in multiples of pi.
inline std::string to_table_text(const PhaseReport& report) {
    std::ostringstream os;
    os << "label,instant_s,unwrapped_pi,wrapped_pi\n";
    char buf[128];
    for (const auto& e : report.entries) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f\n", e.instant, e.unwrapped / std::numbers::pi,
                      e.wrapped / std::numbers::pi);
        os << e.label << buf;
    }
    return os.str();
}

/// `instant_s,jump_rad,jump_pi` rows.
inline std::string to_discontinuity_text(const PhaseReport& report) {
    std::ostringstream os;
    os << "instant_s,jump_rad,jump_pi\n";
    char buf[128];
    for (const auto& d : report.discontinuities) {
        std::snprintf(buf, sizeof buf, "%.6f,%.12f,%.6f\n", d.instant, d.jump, d.jump / std::numbers::pi);
        os << buf;
    }
    return os.str();
}

}  // namespace ctfm
