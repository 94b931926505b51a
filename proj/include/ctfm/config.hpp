#pragma once

// Flat `dotted.key = value` experiment configuration.
//
//   tx.f_start, tx.f_end, tx.duration       transmit sweep (required)
//   lo.f_end, lo.duration                   oscillator extension (required)
//   cycles                                  sweep repetitions (required)
//   echo.<i>.delay, echo.<i>.amplitude      reflectors, i = 0, 1, ... (>= 1)
//   sample_rate                             default 4000
//   lowpass.cutoff, lowpass.taps            default 50 Hz, 513 taps
//   spectrum.zero_pad_factor                default 4
//   spectrum.band_low, spectrum.band_high   peak search band, default 10..50 Hz
//   spectrum.search_span                    sidelobe search span, default 12 Hz
//   spectrum.floor_db                       sidelobe floor, default -20 dB
//   sound_speed                             default 1500
//   noise.sigma, noise.seed                 default 0 (off), 0
//
// `#` starts a comment. Oscillator start frequency and initial phase are
// derived from the transmit sweep and cannot be set.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctfm/demod.hpp"
#include "ctfm/scene.hpp"
#include "ctfm/spectrum.hpp"
#include "ctfm/waveform.hpp"

namespace ctfm {

struct SpectrumSettings {
    int zero_pad_factor = 4;
    Band band{10.0, 50.0};
    double search_span = 12.0;
    double floor_db = -20.0;

    bool operator==(const SpectrumSettings&) const = default;
};

struct SimConfig {
    ChirpSpec tx{};
    double lo_f_end = 0.0;
    double lo_duration = 0.0;
    int cycles = 0;
    std::vector<Echo> echoes;
    double sample_rate = 4000.0;
    double lowpass_cutoff = 50.0;
    int lowpass_taps = 513;
    SpectrumSettings spectrum{};
    double sound_speed = kDefaultSoundSpeed;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;

    SweepSchedule schedule() const { return SweepSchedule::continuing(tx, lo_f_end, lo_duration, cycles); }
    LowpassSpec lowpass() const { return {lowpass_cutoff, lowpass_taps, sample_rate}; }
    Scene scene() const { return {echoes, sound_speed, noise_sigma, noise_seed}; }

    bool operator==(const SimConfig&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw LoadError(std::string(key), "cannot parse '" + std::string(text) + "' as a number");
    return value;
}

// Checks that need a field path in the error message.
inline void validate_config(const SimConfig& c) {
    auto require = [](bool ok, const char* field, const std::string& what) {
        if (!ok) throw LoadError(field, what);
    };
    require(c.tx.duration > 0.0, "tx.duration", "must be positive");
    require(c.tx.f_start >= 0.0, "tx.f_start", "must be non-negative");
    require(c.tx.f_end >= 0.0, "tx.f_end", "must be non-negative");
    require(c.tx.f_end >= c.tx.f_start, "tx.f_end", "only up-sweeps are supported");
    require(c.lo_duration > 0.0, "lo.duration", "must be positive");
    require(c.lo_duration <= c.tx.duration, "lo.duration", "must not exceed the sweep duration");
    require(c.lo_f_end >= c.tx.f_end, "lo.f_end", "must not be below the transmit end frequency");
    const double mu_tx = (c.tx.f_end - c.tx.f_start) / c.tx.duration;
    const double mu_lo = (c.lo_f_end - c.tx.f_end) / c.lo_duration;
    require(std::abs(mu_tx - mu_lo) <= 1e-9 * std::max(std::abs(mu_tx), 1.0), "lo.f_end",
            "oscillator sweep rate must equal the transmit sweep rate");
    require(c.cycles >= 1, "cycles", "must be a positive integer");
    require(!c.echoes.empty(), "echo", "at least one echo required");
    for (std::size_t i = 0; i < c.echoes.size(); ++i) {
        const auto field = "echo." + std::to_string(i) + ".delay";
        if (!(c.echoes[i].delay >= 0.0)) throw LoadError(field, "echo delay must be non-negative");
        if (!(c.echoes[i].delay < c.tx.duration)) throw LoadError(field, "echo delay must be < sweep duration");
        if (!(c.echoes[i].delay <= c.lo_duration))
            throw LoadError(field, "echo delay must be <= oscillator duration");
    }
    require(c.sound_speed > 0.0, "sound_speed", "must be positive");
    require(c.noise_sigma >= 0.0, "noise.sigma", "must be non-negative");
    try {
        check_sample_rate(c.schedule(), c.sample_rate);
    } catch (const ConfigError& e) {
        throw LoadError("sample_rate", e.what());
    }
    require(c.lowpass_taps >= 1 && c.lowpass_taps % 2 == 1, "lowpass.taps", "must be a positive odd integer");
    try {
        check_cutoff_feasible(c.schedule(), c.lowpass());
    } catch (const ConfigError& e) {
        throw LoadError("lowpass.cutoff", e.what());
    }
    require(c.spectrum.zero_pad_factor >= 1, "spectrum.zero_pad_factor", "must be >= 1");
    require(c.spectrum.band.low >= 0.0 && c.spectrum.band.low < c.spectrum.band.high &&
                c.spectrum.band.high <= c.sample_rate / 2.0,
            "spectrum.band_high", "band must satisfy 0 <= low < high <= Nyquist");
    require(c.spectrum.search_span > 0.0, "spectrum.search_span", "must be positive");
    require(c.spectrum.floor_db <= 0.0, "spectrum.floor_db", "must be <= 0 dB");
}

}  // namespace detail

inline SimConfig parse_config(std::string_view text) {
    std::map<std::string, std::string, std::less<>> values;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw LoadError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = std::string(detail::trim(line.substr(0, eq)));
        const auto value = std::string(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw LoadError("", "line " + std::to_string(line_no) + ": empty key");
        if (!values.emplace(key, value).second) throw LoadError(key, "duplicate key");
    }

    SimConfig cfg;
    std::set<std::string, std::less<>> used;
    auto take = [&](const std::string& key) -> const std::string* {
        const auto it = values.find(key);
        if (it == values.end()) return nullptr;
        used.insert(key);
        return &it->second;
    };
    auto real = [&](const std::string& key, double& out, bool required) {
        if (const auto* v = take(key)) out = detail::parse_number<double>(key, *v);
        else if (required) throw LoadError(key, "missing required key");
    };
    auto integer = [&](const std::string& key, auto& out, bool required) {
        using T = std::remove_reference_t<decltype(out)>;
        if (const auto* v = take(key)) out = detail::parse_number<T>(key, *v);
        else if (required) throw LoadError(key, "missing required key");
    };

    real("tx.f_start", cfg.tx.f_start, true);
    real("tx.f_end", cfg.tx.f_end, true);
    real("tx.duration", cfg.tx.duration, true);
    real("lo.f_end", cfg.lo_f_end, true);
    real("lo.duration", cfg.lo_duration, true);
    integer("cycles", cfg.cycles, true);
    real("sample_rate", cfg.sample_rate, false);
    real("lowpass.cutoff", cfg.lowpass_cutoff, false);
    integer("lowpass.taps", cfg.lowpass_taps, false);
    integer("spectrum.zero_pad_factor", cfg.spectrum.zero_pad_factor, false);
    real("spectrum.band_low", cfg.spectrum.band.low, false);
    real("spectrum.band_high", cfg.spectrum.band.high, false);
    real("spectrum.search_span", cfg.spectrum.search_span, false);
    real("spectrum.floor_db", cfg.spectrum.floor_db, false);
    real("sound_speed", cfg.sound_speed, false);
    real("noise.sigma", cfg.noise_sigma, false);
    integer("noise.seed", cfg.noise_seed, false);

    for (std::size_t i = 0;; ++i) {
        const auto prefix = "echo." + std::to_string(i) + ".";
        const bool has_delay = values.contains(prefix + "delay");
        const bool has_amp = values.contains(prefix + "amplitude");
        if (!has_delay && !has_amp) break;
        Echo e;
        real(prefix + "delay", e.delay, true);
        real(prefix + "amplitude", e.amplitude, false);
        cfg.echoes.push_back(e);
    }

    for (const auto& [key, value] : values)
        if (!used.contains(key)) throw LoadError(key, "unknown key");

    detail::validate_config(cfg);
    return cfg;
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Canonical text form; parse_config(to_config_text(c)) == c.
inline std::string to_config_text(const SimConfig& c) {
    std::ostringstream os;
    char buf[64];
    auto put = [&](std::string_view key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << key << " = " << buf << '\n';
    };
    put("tx.f_start", c.tx.f_start);
    put("tx.f_end", c.tx.f_end);
    put("tx.duration", c.tx.duration);
    put("lo.f_end", c.lo_f_end);
    put("lo.duration", c.lo_duration);
    os << "cycles = " << c.cycles << '\n';
    for (std::size_t i = 0; i < c.echoes.size(); ++i) {
        put("echo." + std::to_string(i) + ".delay", c.echoes[i].delay);
        put("echo." + std::to_string(i) + ".amplitude", c.echoes[i].amplitude);
    }
    put("sample_rate", c.sample_rate);
    put("lowpass.cutoff", c.lowpass_cutoff);
    os << "lowpass.taps = " << c.lowpass_taps << '\n';
    os << "spectrum.zero_pad_factor = " << c.spectrum.zero_pad_factor << '\n';
    put("spectrum.band_low", c.spectrum.band.low);
    put("spectrum.band_high", c.spectrum.band.high);
    put("spectrum.search_span", c.spectrum.search_span);
    put("spectrum.floor_db", c.spectrum.floor_db);
    put("sound_speed", c.sound_speed);
    put("noise.sigma", c.noise_sigma);
    os << "noise.seed = " << c.noise_seed << '\n';
    return os.str();
}

}  // namespace ctfm
