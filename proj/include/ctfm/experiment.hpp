#pragma once

// End-to-end runs: synthesize, demodulate, analyze and export.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctfm/config.hpp"
#include "ctfm/demod.hpp"
#include "ctfm/phase_analysis.hpp"
#include "ctfm/scene.hpp"
#include "ctfm/spectrum.hpp"
#include "ctfm/waveform.hpp"

namespace ctfm {

enum class Mode { ddctfm, ctfm, ideal };

inline std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::ddctfm: return "ddctfm";
        case Mode::ctfm: return "ctfm";
        case Mode::ideal: return "ideal";
    }
    return "?";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "ddctfm") return Mode::ddctfm;
    if (s == "ctfm") return Mode::ctfm;
    if (s == "ideal") return Mode::ideal;
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

/// Every signal of one run, before analysis.
struct Simulation {
    SweepSchedule schedule;
    SampledSignal tx;
    SampledSignal lo;
    SampledSignal rx;
    DemodOutput demod;
};

inline Simulation simulate(const SimConfig& cfg) {
    auto schedule = cfg.schedule();
    check_cutoff_feasible(schedule, cfg.lowpass());
    auto tx = synthesize_transmit(schedule, cfg.sample_rate);
    auto lo = synthesize_lo(schedule, cfg.sample_rate);
    auto rx = synthesize_received(schedule, cfg.scene(), cfg.sample_rate);
    auto demod = demodulate(tx, lo, rx, cfg.lowpass());
    return {std::move(schedule), std::move(tx), std::move(lo), std::move(rx), std::move(demod)};
}

/// Continuous-phase beat tone for one echo: what the receiver would output
/// if the two channels joined without any phase jump. Amplitude a/2 and the
/// channel-1 phase 2 pi (f1 tau - mu tau^2 / 2) at local time zero.
inline SampledSignal ideal_output(const SweepSchedule& schedule, const Echo& echo, double sample_rate) {
    const double mu = sweep_rate(schedule.tx());
    const double f1 = schedule.tx().f_start;
    const double tau = echo.delay;
    const double phase0 = kTwoPi * (f1 * tau - 0.5 * mu * tau * tau);
    const double beat = beat_frequency(mu, tau);
    const auto n = schedule_sample_count(schedule, sample_rate);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = 0.5 * echo.amplitude * std::cos(phase0 + kTwoPi * beat * static_cast<double>(i) / sample_rate);
    return SampledSignal(sample_rate, std::move(out));
}

inline SampledSignal output_for(const Simulation& sim, const SimConfig& cfg, Mode mode) {
    switch (mode) {
        case Mode::ddctfm: return sim.demod.sum;
        case Mode::ctfm: return sim.demod.channel1;
        case Mode::ideal: return ideal_output(sim.schedule, cfg.echoes.front(), cfg.sample_rate);
    }
    throw ConfigError("unknown mode");
}

/// Drops the filter settling prefix.
inline SampledSignal analysis_window(const SampledSignal& s, const LowpassSpec& lp) {
    const auto skip = static_cast<std::size_t>(std::ceil(settle_time(lp) * s.sample_rate()));
    if (skip >= s.size()) throw ShapeError("signal shorter than the filter settling time");
    return s.slice(skip, s.size() - skip);
}

struct Analysis {
    Spectrum spectrum;
    SpectrumReport report;
};

inline Analysis analyze(const SampledSignal& output, const SimConfig& cfg) {
    auto spectrum = dft_magnitude(analysis_window(output, cfg.lowpass()), cfg.spectrum.zero_pad_factor);
    const auto peak = find_peak(spectrum, cfg.spectrum.band);
    auto report = sidelobe_report(spectrum, peak, cfg.spectrum.search_span, cfg.spectrum.floor_db);
    return {std::move(spectrum), std::move(report)};
}

struct ReportBundle {
    PhaseReport phase_report;
    SpectrumReport spectrum_report;
    std::vector<std::filesystem::path> manifest;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       std::vector<std::filesystem::path>& manifest) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    manifest.push_back(path);
}

inline std::string waveform_csv(const SampledSignal& s) {
    std::string out = "time_s,value\n";
    char buf[64];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9f,%.12g\n", s.time_at(i), s[i]);
        out += buf;
    }
    return out;
}

template <typename FreqAt>
std::string track_csv(std::size_t n, double sample_rate, FreqAt freq_at) {
    std::string out = "time_s,freq_hz\n";
    char buf[64];
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        if (const std::optional<double> f = freq_at(t)) {
            std::snprintf(buf, sizeof buf, "%.9f,%.9g\n", t, *f);
            out += buf;
        }
    }
    return out;
}

}  // namespace detail

/// Analytic instantaneous-frequency tracks of transmit, oscillator and the
/// first echo, as `time_s,freq_hz` CSV keyed by name.
inline std::vector<std::pair<std::string, std::string>> frequency_tracks(const SweepSchedule& s, const Echo& echo,
                                                                          double sample_rate) {
    const auto n = schedule_sample_count(s, sample_rate);
    const double T = s.period();
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("track_tx.csv", detail::track_csv(n, sample_rate, [&](double t) -> std::optional<double> {
                         return tx_frequency(s.tx(), split_time(t, T).local);
                     }));
    out.emplace_back("track_lo.csv", detail::track_csv(n, sample_rate, [&](double t) -> std::optional<double> {
                         const double local = split_time(t, T).local;
                         if (local >= s.lo().duration) return std::nullopt;
                         return lo_frequency(s.lo(), local);
                     }));
    out.emplace_back("track_echo.csv", detail::track_csv(n, sample_rate, [&](double t) -> std::optional<double> {
                         if (t < echo.delay) return std::nullopt;
                         return tx_frequency(s.tx(), split_time(t - echo.delay, T).local);
                     }));
    return out;
}

inline std::string report_text(const SpectrumReport& r, Mode mode) {
    std::ostringstream os;
    char buf[128];
    os << "mode = " << to_string(mode) << '\n';
    std::snprintf(buf, sizeof buf, "peak_frequency_hz = %.6f\npeak_magnitude = %.9g\nmainlobe_width_3db_hz = %.6f\n",
                  r.peak_frequency, r.peak_magnitude, r.mainlobe_width_3db);
    os << buf;
    if (const auto* s = r.strongest_sidelobe()) {
        std::snprintf(buf, sizeof buf, "strongest_sidelobe_hz = %.6f\nstrongest_sidelobe_db = %.4f\n", s->frequency,
                      s->ratio_db);
        os << buf;
    }
    os << "sidelobes = " << r.sidelobes.size() << '\n';
    for (const auto& s : r.sidelobes) {
        std::snprintf(buf, sizeof buf, "sidelobe = %.6f Hz, offset %+.6f Hz, %.4f dB\n", s.frequency, s.offset,
                      s.ratio_db);
        os << buf;
    }
    return os.str();
}

/// Full pipeline for one mode; writes artifacts into out_dir.
inline ReportBundle run(const SimConfig& cfg, Mode mode, const std::filesystem::path& out_dir) {
    const auto sim = simulate(cfg);
    const auto output = output_for(sim, cfg, mode);
    const auto analysis = analyze(output, cfg);

    ReportBundle bundle;
    bundle.phase_report = phase_table(sim.schedule, cfg.echoes.front().delay);
    bundle.spectrum_report = analysis.report;

    std::filesystem::create_directories(out_dir);
    const std::string tag(to_string(mode));
    auto& files = bundle.manifest;
    detail::write_file(out_dir / "waveform_tx.csv", detail::waveform_csv(sim.tx), files);
    detail::write_file(out_dir / "waveform_lo.csv", detail::waveform_csv(sim.lo), files);
    detail::write_file(out_dir / "waveform_rx.csv", detail::waveform_csv(sim.rx), files);
    detail::write_file(out_dir / ("output_" + tag + ".csv"), detail::waveform_csv(output), files);
    detail::write_file(out_dir / ("spectrum_" + tag + ".csv"), to_csv(analysis.spectrum), files);
    for (const auto& [name, csv] : frequency_tracks(sim.schedule, cfg.echoes.front(), cfg.sample_rate))
        detail::write_file(out_dir / name, csv, files);
    detail::write_file(out_dir / "phase_table.csv", to_table_text(bundle.phase_report), files);
    detail::write_file(out_dir / "discontinuities.csv", to_discontinuity_text(bundle.phase_report), files);
    detail::write_file(out_dir / ("report_" + tag + ".txt"), report_text(analysis.report, mode), files);
    return bundle;
}

struct ComparisonRow {
    Mode mode;
    SpectrumReport report;
};

/// Runs ctfm, ddctfm and ideal on one simulation; no files written.
inline std::vector<ComparisonRow> compare_modes(const SimConfig& cfg) {
    const auto sim = simulate(cfg);
    std::vector<ComparisonRow> rows;
    for (Mode m : {Mode::ctfm, Mode::ddctfm, Mode::ideal})
        rows.push_back({m, analyze(output_for(sim, cfg, m), cfg).report});
    return rows;
}

/// `mode,peak_hz,mainlobe_width_3db_hz,strongest_sidelobe_db` rows.
inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "mode,peak_hz,mainlobe_width_3db_hz,strongest_sidelobe_db\n";
    char buf[128];
    for (const auto& row : rows) {
        const auto* s = row.report.strongest_sidelobe();
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,", std::string(to_string(row.mode)).c_str(),
                      row.report.peak_frequency, row.report.mainlobe_width_3db);
        out += buf;
        if (s) {
            std::snprintf(buf, sizeof buf, "%.4f", s->ratio_db);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace ctfm
