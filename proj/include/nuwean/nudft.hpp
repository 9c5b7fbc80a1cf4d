#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nuwean/series.hpp"

namespace nuwean {

// Strictly increasing, uniformly spaced, all-positive frequencies (DC excluded).
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> frequencies);

    const std::vector<double>& frequencies() const { return freqs_; }
    std::size_t size() const { return freqs_.size(); }
    double operator[](std::size_t k) const { return freqs_[k]; }
    double spacing() const { return spacing_; }
    double min() const { return freqs_.front(); }
    double max() const { return freqs_.back(); }

private:
    std::vector<double> freqs_;
    double spacing_ = 0.0;
};

// One transform evaluation. psd[k] == |complex_values[k]|^2 / sample_count.
struct Spectrum {
    FrequencyGrid grid;
    std::vector<std::complex<double>> complex_values;
    std::vector<double> psd;
    std::size_t sample_count = 0;
};

struct SpectrogramFrame {
    double start = 0.0;    // seconds
    double duration = 0.0; // window length
    std::size_t sample_count = 0;
    Spectrum spectrum;
};

struct SpectrogramConfig {
    double window_s = 100.0;
    double overlap_fraction = 0.75;
    std::size_t bins = 128;
    std::size_t min_samples_per_frame = 8;

    double hop_s() const { return window_s * (1.0 - overlap_fraction); }
    void validate() const;
};

// One term-by-term evaluation of sum_n v_n * w_n * e^{-i 2 pi f t_n}.
// Valid at any real frequency, including negative ones.
std::complex<double> dft_sum(std::span<const double> times, std::span<const double> values,
                             std::span<const double> weights, double frequency);

// Direct summation transform of the series on the grid. `weights`, when
// non-empty, multiplies the sample values (window weights).
Spectrum nudft(const NonUniformSeries& series, const FrequencyGrid& grid,
               std::span<const double> weights = {});

// 0.54 - 0.46 cos(2 pi (t - frame_start)/window_s), evaluated at the actual
// sample times. All times must lie inside [frame_start, frame_start + window_s].
std::vector<double> hamming_weights(std::span<const double> times, double frame_start,
                                    double window_s);

// M uniform bins on (0, f_max], f_max = 1/(2 * median inter-sample interval).
FrequencyGrid make_grid(const NonUniformSeries& series_window, std::size_t bins);

// Sliding Hamming-weighted transform. Frames with fewer than
// min_samples_per_frame samples are skipped.
std::vector<SpectrogramFrame> spectrogram(const NonUniformSeries& series,
                                          const SpectrogramConfig& cfg);

enum class InterpMethod { Linear, CubicSpline };

// Uniform resampling at t_0, t_0 + 1/rate, ... <= t_end. The interpolation
// baselines exist to quantify the artifacts they introduce.
NonUniformSeries resample_uniform(const NonUniformSeries& series, double rate_hz,
                                  InterpMethod method);

// Same summation as nudft, restricted to uniformly spaced input.
Spectrum uniform_periodogram(const NonUniformSeries& uniform_series, const FrequencyGrid& grid);

// Piecewise-linear interpolant evaluation (exact at sample times).
double interp_linear(const NonUniformSeries& series, double t);

// Natural cubic spline through all samples.
class CubicSpline {
public:
    explicit CubicSpline(const NonUniformSeries& series);
    double operator()(double t) const;

private:
    std::vector<double> x_, y_, m_; // knots, values, second derivatives
};

} // namespace nuwean
