#include "nuwean/nudft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nuwean {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FrequencyGrid::FrequencyGrid(std::vector<double> frequencies) : freqs_(std::move(frequencies)) {
    if (freqs_.size() < 2)
        throw Error("nudft", "frequency grid needs at least 2 bins");
    if (!(freqs_.front() > 0.0))
        throw Error("nudft", "frequency grid must exclude DC (all frequencies > 0)");
    spacing_ = freqs_[1] - freqs_[0];
    const double tol = 1e-12 * std::max(1.0, freqs_.back());
    for (std::size_t k = 1; k < freqs_.size(); ++k) {
        const double d = freqs_[k] - freqs_[k - 1];
        if (!(d > 0.0))
            throw Error("nudft", "frequency grid must be strictly increasing");
        if (std::abs(d - spacing_) > tol)
            throw Error("nudft", "frequency grid must be uniformly spaced");
    }
}

void SpectrogramConfig::validate() const {
    if (!(window_s > 0.0))
        throw Error("spectrogram", "window_s must be > 0");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw Error("spectrogram", "overlap_fraction must be in [0, 1)");
    if (bins < 2)
        throw Error("spectrogram", "bins must be >= 2");
    if (min_samples_per_frame < 2)
        throw Error("spectrogram", "min_samples_per_frame must be >= 2");
}

std::complex<double> dft_sum(std::span<const double> times, std::span<const double> values,
                             std::span<const double> weights, double frequency) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < times.size(); ++n) {
        const double w = weights.empty() ? 1.0 : weights[n];
        const double phase = -kTwoPi * frequency * times[n];
        acc += values[n] * w * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc;
}

Spectrum nudft(const NonUniformSeries& series, const FrequencyGrid& grid,
               std::span<const double> weights) {
    series.validate("nudft");
    if (series.empty())
        throw Error("nudft", "cannot transform an empty series");
    if (!weights.empty() && weights.size() != series.size())
        throw Error("nudft", "weights length must match series length");

    Spectrum out{grid, {}, {}, series.size()};
    out.complex_values.resize(grid.size());
    out.psd.resize(grid.size());
    const double inv_n = 1.0 / static_cast<double>(series.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::complex<double> f = dft_sum(series.times, series.values, weights, grid[k]);
        out.complex_values[k] = f;
        out.psd[k] = std::norm(f) * inv_n;
    }
    return out;
}

std::vector<double> hamming_weights(std::span<const double> times, double frame_start,
                                    double window_s) {
    if (!(window_s > 0.0))
        throw Error("nudft", "hamming window length must be > 0");
    std::vector<double> w(times.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        const double rel = times[n] - frame_start;
        if (rel < 0.0 || rel > window_s)
            throw Error("nudft", "sample time outside the window");
        w[n] = 0.54 - 0.46 * std::cos(kTwoPi * rel / window_s);
    }
    return w;
}

FrequencyGrid make_grid(const NonUniformSeries& window, std::size_t bins) {
    if (window.size() < 2)
        throw Error("nudft", "make_grid requires a window with at least 2 samples");
    if (bins < 2)
        throw Error("nudft", "make_grid requires at least 2 bins");
    std::vector<double> intervals;
    intervals.reserve(window.size() - 1);
    for (std::size_t i = 1; i < window.size(); ++i)
        intervals.push_back(window.times[i] - window.times[i - 1]);
    const double med = median_of(std::move(intervals));
    if (!(med > 0.0))
        throw Error("nudft", "make_grid: degenerate window (zero median interval)");
    const double f_max = 1.0 / (2.0 * med);
    const double step = f_max / static_cast<double>(bins);
    std::vector<double> freqs(bins);
    for (std::size_t k = 0; k < bins; ++k)
        freqs[k] = static_cast<double>(k + 1) * step;
    return FrequencyGrid(std::move(freqs));
}

std::vector<SpectrogramFrame> spectrogram(const NonUniformSeries& series,
                                          const SpectrogramConfig& cfg) {
    series.validate("spectrogram");
    cfg.validate();
    if (series.duration() < cfg.window_s)
        throw Error("spectrogram", "series shorter than one window");

    const double t0 = series.times.front();
    const double t_end = series.times.back();
    const double hop = cfg.hop_s();
    const double eps = 1e-9 * cfg.window_s;

    std::vector<SpectrogramFrame> frames;
    for (std::size_t j = 0;; ++j) {
        const double start = t0 + static_cast<double>(j) * hop;
        if (start + cfg.window_s > t_end + eps) break;
        const double stop = start + cfg.window_s;

        const auto first = std::lower_bound(series.times.begin(), series.times.end(), start);
        const auto last = std::upper_bound(series.times.begin(), series.times.end(), stop);
        const std::size_t i0 = static_cast<std::size_t>(first - series.times.begin());
        const std::size_t i1 = static_cast<std::size_t>(last - series.times.begin());
        if (i1 - i0 < cfg.min_samples_per_frame) continue;

        NonUniformSeries window;
        window.kind = series.kind;
        window.times.assign(series.times.begin() + i0, series.times.begin() + i1);
        window.values.assign(series.values.begin() + i0, series.values.begin() + i1);

        const std::vector<double> w = hamming_weights(window.times, start, cfg.window_s);
        Spectrum spec = nudft(window, make_grid(window, cfg.bins), w);
        frames.push_back(SpectrogramFrame{start, cfg.window_s, window.size(), std::move(spec)});
    }
    return frames;
}

double interp_linear(const NonUniformSeries& series, double t) {
    const auto& x = series.times;
    const auto& y = series.values;
    if (x.size() < 2)
        throw Error("nudft", "linear interpolation requires at least 2 samples");
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double u = (t - x[i]) / (x[i + 1] - x[i]);
    return y[i] + u * (y[i + 1] - y[i]);
}

CubicSpline::CubicSpline(const NonUniformSeries& series) : x_(series.times), y_(series.values) {
    const std::size_t n = x_.size();
    if (n < 4)
        throw Error("nudft", "cubic spline requires at least 4 samples");

    // natural boundary conditions: m_0 = m_{n-1} = 0; tridiagonal solve for
    // the interior second derivatives
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    diag[n - 1] = 1.0;

    // Thomas algorithm; lower diagonal at row i is h0 = x_i - x_{i-1}
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double factor = h0 / diag[i - 1];
        diag[i] -= factor * upper[i - 1];
        rhs[i] -= factor * rhs[i - 1];
    }
    for (std::size_t i = n - 1; i-- > 1;) {
        m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    }
}

double CubicSpline::operator()(double t) const {
    if (t <= x_.front()) t = x_.front();
    if (t >= x_.back()) t = x_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.end() ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) / 6.0;
}

NonUniformSeries resample_uniform(const NonUniformSeries& series, double rate_hz,
                                  InterpMethod method) {
    series.validate("nudft");
    if (!(rate_hz > 0.0))
        throw Error("nudft", "resample rate must be > 0");
    const std::size_t min_n = method == InterpMethod::CubicSpline ? 4u : 2u;
    if (series.size() < min_n)
        throw Error("nudft", "resample_uniform: insufficient samples for the chosen method");

    const double t0 = series.times.front();
    const double t_end = series.times.back();
    const double dt = 1.0 / rate_hz;
    const double eps = 1e-12 * std::max(1.0, t_end - t0);

    NonUniformSeries out;
    out.kind = series.kind;
    std::optional<CubicSpline> spline;
    if (method == InterpMethod::CubicSpline) spline.emplace(series);
    for (std::size_t k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        if (t > t_end + eps) break;
        out.times.push_back(t);
        out.values.push_back(method == InterpMethod::Linear ? interp_linear(series, t)
                                                            : (*spline)(t));
    }
    return out;
}

Spectrum uniform_periodogram(const NonUniformSeries& uniform_series, const FrequencyGrid& grid) {
    uniform_series.validate("nudft");
    if (uniform_series.size() < 2)
        throw Error("nudft", "uniform_periodogram requires at least 2 samples");
    const auto& t = uniform_series.times;
    const double dt0 = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (std::abs((t[i + 1] - t[i]) - dt0) > 1e-9 * dt0)
            throw Error("nudft", "uniform_periodogram requires uniformly spaced input");
    }
    return nudft(uniform_series, grid);
}

} // namespace nuwean
