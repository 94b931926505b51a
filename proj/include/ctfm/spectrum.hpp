#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "ctfm/waveform.hpp"

namespace ctfm {

/// One-sided DFT magnitude on [0, Nyquist].
struct Spectrum {
    std::vector<double> bin_frequencies;  // Hz, uniform
    std::vector<double> magnitudes;
    double sample_rate = 0.0;
    double record_duration = 0.0;  // s, before zero padding
    int zero_pad_factor = 1;

    double bin_spacing() const { return 1.0 / (zero_pad_factor * record_duration); }
    /// Resolution of the unpadded record.
    double native_bin() const { return 1.0 / record_duration; }
    std::size_t padded_length() const {
        return static_cast<std::size_t>(std::llround(zero_pad_factor * record_duration * sample_rate));
    }
};

namespace detail {

// The FFTW planner is not re-entrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

class RealForwardPlan {
public:
    explicit RealForwardPlan(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        if (!in_ || !out_) throw std::bad_alloc();
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    }
    ~RealForwardPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    RealForwardPlan(const RealForwardPlan&) = delete;
    RealForwardPlan& operator=(const RealForwardPlan&) = delete;

    double* input() noexcept { return in_.get(); }
    const fftw_complex* output() const noexcept { return out_.get(); }
    void execute() noexcept { fftw_execute(plan_); }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    std::unique_ptr<double, FftwFree> in_;
    std::unique_ptr<fftw_complex, FftwFree> out_;
    fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Rectangular-window DFT magnitude of the signal zero-padded to
/// zero_pad_factor times its length.
inline Spectrum dft_magnitude(const SampledSignal& signal, int zero_pad_factor = 4) {
    if (zero_pad_factor < 1) throw ConfigError("zero pad factor must be >= 1");
    const std::size_t n = signal.size();
    const std::size_t padded = n * static_cast<std::size_t>(zero_pad_factor);

    detail::RealForwardPlan plan(padded);
    std::fill_n(plan.input(), padded, 0.0);
    std::copy(signal.samples().begin(), signal.samples().end(), plan.input());
    plan.execute();

    Spectrum spec;
    spec.sample_rate = signal.sample_rate();
    spec.record_duration = signal.duration();
    spec.zero_pad_factor = zero_pad_factor;
    const std::size_t bins = padded / 2 + 1;
    spec.bin_frequencies.resize(bins);
    spec.magnitudes.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        spec.bin_frequencies[k] = static_cast<double>(k) * signal.sample_rate() / static_cast<double>(padded);
        spec.magnitudes[k] = std::hypot(plan.output()[k][0], plan.output()[k][1]);
    }
    return spec;
}

struct Peak {
    double frequency = 0.0;
    double magnitude = 0.0;
};

struct Band {
    double low = 0.0;
    double high = 0.0;

    bool operator==(const Band&) const = default;
};

namespace detail {

// Vertex of the parabola through the log-magnitudes at i-1, i, i+1.
inline Peak refine_peak(const Spectrum& spec, std::size_t i) {
    const auto& m = spec.magnitudes;
    const double df = spec.bin_frequencies.size() > 1 ? spec.bin_frequencies[1] - spec.bin_frequencies[0] : 0.0;
    Peak p{spec.bin_frequencies[i], m[i]};
    if (i == 0 || i + 1 >= m.size() || m[i - 1] <= 0.0 || m[i + 1] <= 0.0) return p;
    const double a = std::log(m[i - 1]);
    const double b = std::log(m[i]);
    const double c = std::log(m[i + 1]);
    const double denom = a - 2.0 * b + c;
    if (!(denom < 0.0)) return p;
    const double delta = 0.5 * (a - c) / denom;
    p.frequency = spec.bin_frequencies[i] + delta * df;
    p.magnitude = std::exp(b - 0.25 * (a - c) * delta);
    return p;
}

inline std::size_t nearest_bin(const Spectrum& spec, double freq) {
    const double df = spec.bin_frequencies[1] - spec.bin_frequencies[0];
    const auto k = static_cast<long long>(std::llround(freq / df));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(spec.magnitudes.size()) - 1));
}

}  // namespace detail

/// Largest bin in [band.low, band.high], refined by log-parabolic
/// interpolation. Equal maxima resolve to the lower frequency.
inline Peak find_peak(const Spectrum& spec, Band band) {
    if (spec.magnitudes.size() < 3) throw ShapeError("spectrum too short");
    const double nyquist = spec.bin_frequencies.back();
    if (!(band.low >= 0.0) || !(band.high <= nyquist + 1e-9) || !(band.low < band.high))
        throw DomainError("band outside the spectrum grid");
    std::size_t first = spec.magnitudes.size(), last = 0;
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) {
        const double f = spec.bin_frequencies[k];
        if (f >= band.low && f <= band.high) {
            first = std::min(first, k);
            last = k;
        }
    }
    if (first > last || last - first + 1 < 3) throw DomainError("band must contain at least 3 bins");
    std::size_t best = first;
    for (std::size_t k = first + 1; k <= last; ++k)
        if (spec.magnitudes[k] > spec.magnitudes[best]) best = k;
    if (!(spec.magnitudes[best] > 0.0)) throw NoPeakError("no spectral energy in band");
    return detail::refine_peak(spec, best);
}

struct Sidelobe {
    double frequency = 0.0;  // Hz
    double offset = 0.0;     // Hz from the main peak
    double ratio_db = 0.0;   // <= 0
};

struct SpectrumReport {
    double peak_frequency = 0.0;
    double peak_magnitude = 0.0;
    std::vector<Sidelobe> sidelobes;  // ascending frequency
    double mainlobe_width_3db = 0.0;  // Hz

    const Sidelobe* strongest_sidelobe() const {
        const Sidelobe* best = nullptr;
        for (const auto& s : sidelobes)
            if (!best || s.ratio_db > best->ratio_db) best = &s;
        return best;
    }
};

/// Sidelobes are bins that dominate every bin within 2 native bins on each
/// side (sinc ripple of a line never qualifies, its neighbour toward the line
/// is always larger), lie outside the -3 dB mainlobe, within
/// search_span of the peak, and reach floor_db relative to the peak.
inline SpectrumReport sidelobe_report(const Spectrum& spec, const Peak& peak, double search_span, double floor_db) {
    if (!(peak.magnitude > 0.0)) throw NoPeakError("peak magnitude is zero");
    const auto& m = spec.magnitudes;
    const auto& f = spec.bin_frequencies;
    const std::size_t n = m.size();

    // Climb to the grid maximum nearest the interpolated peak.
    std::size_t top = detail::nearest_bin(spec, peak.frequency);
    while (top + 1 < n && m[top + 1] > m[top]) ++top;
    while (top > 0 && m[top - 1] > m[top]) --top;

    const double threshold = peak.magnitude / std::numbers::sqrt2;
    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double t = (m[inside] - threshold) / (m[inside] - m[outside]);
        return f[inside] + t * (f[outside] - f[inside]);
    };
    std::size_t l = top;
    while (l > 0 && m[l - 1] >= threshold) --l;
    std::size_t r = top;
    while (r + 1 < n && m[r + 1] >= threshold) ++r;
    const double left_edge = l > 0 ? crossing(l, l - 1) : f[0];
    const double right_edge = r + 1 < n ? crossing(r, r + 1) : f[n - 1];

    SpectrumReport report;
    report.peak_frequency = peak.frequency;
    report.peak_magnitude = peak.magnitude;
    report.mainlobe_width_3db = right_edge - left_edge;

    const auto half = static_cast<std::size_t>(2 * spec.zero_pad_factor);
    for (std::size_t k = 0; k < n; ++k) {
        if (f[k] >= left_edge && f[k] <= right_edge) continue;
        if (std::abs(f[k] - peak.frequency) > search_span) continue;
        if (!(m[k] > 0.0) || m[k] > peak.magnitude) continue;
        bool dominant = true;
        for (std::size_t j = k > half ? k - half : 0; j < k && dominant; ++j) dominant = m[j] < m[k];
        for (std::size_t j = k + 1; j <= std::min(n - 1, k + half) && dominant; ++j) dominant = m[j] <= m[k];
        if (!dominant) continue;
        const auto refined = detail::refine_peak(spec, k);
        const double ratio = std::min(0.0, 20.0 * std::log10(refined.magnitude / peak.magnitude));
        if (ratio < floor_db) continue;
        report.sidelobes.push_back({refined.frequency, refined.frequency - peak.frequency, ratio});
    }
    return report;
}

/// `freq_hz,magnitude` rows.
inline std::string to_csv(const Spectrum& spec) {
    std::ostringstream os;
    os << "freq_hz,magnitude\n";
    char buf[96];
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g,%.12g\n", spec.bin_frequencies[k], spec.magnitudes[k]);
        os << buf;
    }
    return os.str();
}

}  // namespace ctfm
