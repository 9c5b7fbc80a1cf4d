#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "nuwean/nudft.hpp"
#include "nuwean/rng.hpp"
#include "oracles.hpp"

using namespace nuwean;

namespace {

NonUniformSeries make(std::vector<double> t, std::vector<double> v) {
    NonUniformSeries s;
    s.kind = SignalKind::F_OVER_VT;
    s.times = std::move(t);
    s.values = std::move(v);
    return s;
}

FrequencyGrid grid_of(std::vector<double> f) { return FrequencyGrid(std::move(f)); }

} // namespace

TEST_CASE("FrequencyGrid validation") {
    CHECK_THROWS_AS(grid_of({0.0, 0.5}), Error);        // DC excluded
    CHECK_THROWS_AS(grid_of({0.5}), Error);             // too small
    CHECK_THROWS_AS(grid_of({0.1, 0.2, 0.4}), Error);   // non-uniform
    CHECK_THROWS_AS(grid_of({0.2, 0.1}), Error);        // not increasing
    const auto g = grid_of({0.125, 0.25, 0.375, 0.5});
    CHECK(g.spacing() == doctest::Approx(0.125));
}

TEST_CASE("nudft: orthogonality on a uniform grid") {
    // x_n = n/4, all-ones signal, integer-cycle frequencies -> zero
    const auto s = make({0.0, 0.25, 0.5, 0.75}, {1, 1, 1, 1});
    const auto spec = nudft(s, grid_of({1.0, 2.0, 3.0}));
    for (const auto& f : spec.complex_values) CHECK(std::abs(f) <= 1e-12);
    for (double p : spec.psd) CHECK(p <= 1e-12);
}

TEST_CASE("nudft: one-term sum") {
    const auto s = make({0.3}, {2.0});
    const auto spec = nudft(s, grid_of({1.0, 2.0}));
    const std::complex<double> expect =
        2.0 * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * 0.3));
    CHECK(std::abs(spec.complex_values[0] - expect) <= 1e-12);
    // psd invariant with N = 1
    CHECK(spec.psd[0] == doctest::Approx(std::norm(expect)).epsilon(1e-12));
}

TEST_CASE("nudft matches the high-precision term-by-term oracle") {
    const std::vector<double> t{0.13, 0.91, 2.47};
    const std::vector<double> v{1.7, -0.4, 0.9};
    const auto spec = nudft(make(t, v), grid_of({0.35, 0.7}));
    const auto expect = oracles::dft_reference(t, v, 0.7);
    CHECK(std::abs(spec.complex_values[1] - expect) <= 1e-12);
}

TEST_CASE("nudft: psd invariant |F|^2/N on random input") {
    Rng rng(3);
    std::vector<double> t, v;
    double time = 0.0;
    for (int i = 0; i < 40; ++i) {
        time += rng.uniform(0.5, 1.5);
        t.push_back(time);
        v.push_back(rng.normal());
    }
    const auto spec = nudft(make(t, v), make_grid(make(t, v), 16));
    for (std::size_t k = 0; k < spec.psd.size(); ++k) {
        const double expect = std::norm(spec.complex_values[k]) / 40.0;
        CHECK(std::abs(spec.psd[k] - expect) <= 1e-12 * std::max(1.0, expect));
    }
}

TEST_CASE("nudft linearity (property)") {
    Rng rng(7);
    std::vector<double> t, f, g;
    double time = 0.0;
    for (int i = 0; i < 30; ++i) {
        time += rng.uniform(0.2, 1.0);
        t.push_back(time);
        f.push_back(rng.normal());
        g.push_back(rng.normal());
    }
    const double a = 2.5, b = -1.25;
    std::vector<double> combo(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) combo[i] = a * f[i] + b * g[i];

    const auto grid = make_grid(make(t, f), 12);
    const auto sf = nudft(make(t, f), grid);
    const auto sg = nudft(make(t, g), grid);
    const auto sc = nudft(make(t, combo), grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto expect = a * sf.complex_values[k] + b * sg.complex_values[k];
        CHECK(std::abs(sc.complex_values[k] - expect) <= 1e-10);
    }
}

TEST_CASE("nudft conjugate symmetry for real input") {
    Rng rng(9);
    std::vector<double> t, v;
    double time = 0.0;
    for (int i = 0; i < 25; ++i) {
        time += rng.uniform(0.3, 1.2);
        t.push_back(time);
        v.push_back(rng.normal());
    }
    for (double freq : {0.11, 0.37, 0.73}) {
        const auto pos = dft_sum(t, v, {}, freq);
        const auto neg = dft_sum(t, v, {}, -freq);
        CHECK(std::abs(neg - std::conj(pos)) <= 1e-10);
    }
}

TEST_CASE("nudft time-shift property") {
    Rng rng(13);
    std::vector<double> t, v;
    double time = 0.0;
    for (int i = 0; i < 20; ++i) {
        time += rng.uniform(0.4, 1.1);
        t.push_back(time);
        v.push_back(rng.normal());
    }
    const double tau = 3.7;
    std::vector<double> shifted(t);
    for (double& x : shifted) x += tau;

    for (double freq : {0.2, 0.55}) {
        const auto base = dft_sum(t, v, {}, freq);
        const auto moved = dft_sum(shifted, v, {}, freq);
        const std::complex<double> phase =
            std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * freq * tau));
        CHECK(std::abs(moved - base * phase) <= 1e-10);
    }
}

TEST_CASE("uniform-grid equivalence with a reference DFT") {
    for (std::size_t n : {8u, 64u, 256u}) {
        Rng rng(100 + n);
        std::vector<double> t(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<double>(i); // dt = 1
            v[i] = rng.normal();
        }
        std::vector<double> freqs;
        for (std::size_t k = 1; k <= n / 2; ++k)
            freqs.push_back(static_cast<double>(k) / static_cast<double>(n));
        const auto spec = nudft(make(t, v), grid_of(std::move(freqs)));
        double err = 0.0, ref_norm = 0.0;
        for (std::size_t k = 0; k < spec.grid.size(); ++k) {
            const auto expect = oracles::dft_reference(t, v, spec.grid[k]);
            err += std::norm(spec.complex_values[k] - expect);
            ref_norm += std::norm(expect);
        }
        CHECK(std::sqrt(err / ref_norm) <= 1e-9);
    }
}

TEST_CASE("hamming_weights endpoints and center") {
    const std::vector<double> t{10.0, 60.0, 110.0};
    const auto w = hamming_weights(t, 10.0, 100.0);
    CHECK(w[0] == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(0.08).epsilon(1e-12));
    CHECK_THROWS_AS(hamming_weights(std::vector<double>{9.0}, 10.0, 100.0), Error);
}

TEST_CASE("make_grid: f_max from the median interval") {
    // uniform 1 Hz sampling, M = 4
    const auto g = make_grid(make({0, 1, 2, 3}, {0, 0, 0, 0}), 4);
    CHECK(g.frequencies() == std::vector<double>{0.125, 0.25, 0.375, 0.5});

    // intervals {1,1,3}, M = 2 -> median 1, f_max 0.5
    const auto g2 = make_grid(make({0, 1, 2, 5}, {0, 0, 0, 0}), 2);
    CHECK(g2.frequencies() == std::vector<double>{0.25, 0.5});

    // single interval
    const auto g3 = make_grid(make({0, 2}, {0, 0}), 2);
    CHECK(g3.frequencies() == std::vector<double>{0.125, 0.25});
}

TEST_CASE("spectrogram frame layout at the published window/overlap") {
    SpectrogramConfig cfg; // 100 s, 75%
    cfg.min_samples_per_frame = 2;
    cfg.bins = 8;

    std::vector<double> t, v;
    for (double x = 0.0; x <= 200.0 + 1e-9; x += 2.0) {
        t.push_back(x);
        v.push_back(std::sin(x));
    }
    const auto frames = spectrogram(make(t, v), cfg);
    REQUIRE(frames.size() == 5);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(frames[j].start == doctest::Approx(25.0 * static_cast<double>(j)));

    // exactly one window
    std::vector<double> t1, v1;
    for (double x = 0.0; x <= 100.0 + 1e-9; x += 2.0) {
        t1.push_back(x);
        v1.push_back(std::cos(x));
    }
    CHECK(spectrogram(make(t1, v1), cfg).size() == 1);

    CHECK_THROWS_AS(spectrogram(make({0, 1, 2}, {0, 0, 0}), cfg), Error);
}

TEST_CASE("spectrogram frame count closed form (property)") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        SpectrogramConfig cfg;
        cfg.min_samples_per_frame = 2; // no filtering
        cfg.bins = 4;
        std::vector<double> t, v;
        double time = 0.0;
        const double span = rng.uniform(150.0, 600.0);
        while (time < span) {
            time += rng.uniform(0.5, 1.5);
            t.push_back(time);
            v.push_back(rng.normal());
        }
        const auto frames = spectrogram(make(t, v), cfg);
        const double covered = t.back() - t.front() - cfg.window_s;
        const auto expect = static_cast<std::size_t>(
            std::floor(covered / cfg.hop_s() + 1e-9)) + 1;
        CHECK(frames.size() == expect);
    }
}

TEST_CASE("spectrogram frame equals a standalone transform of its samples") {
    Rng rng(37);
    std::vector<double> t, v;
    double time = 0.0;
    while (time < 320.0) {
        time += rng.uniform(0.6, 1.4);
        t.push_back(time);
        v.push_back(std::sin(0.5 * time) + 0.2 * rng.normal());
    }
    SpectrogramConfig cfg;
    cfg.bins = 16;
    const auto frames = spectrogram(make(t, v), cfg);
    REQUIRE(!frames.empty());
    const auto& frame = frames[frames.size() / 2];

    NonUniformSeries window;
    window.kind = SignalKind::F_OVER_VT;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= frame.start && t[i] <= frame.start + frame.duration) {
            window.times.push_back(t[i]);
            window.values.push_back(v[i]);
        }
    }
    REQUIRE(window.size() == frame.sample_count);
    const auto weights = hamming_weights(window.times, frame.start, frame.duration);
    const auto standalone = nudft(window, make_grid(window, cfg.bins), weights);
    for (std::size_t k = 0; k < standalone.grid.size(); ++k) {
        CHECK(standalone.grid[k] == frame.spectrum.grid[k]);
        CHECK(standalone.complex_values[k] == frame.spectrum.complex_values[k]);
    }
}

TEST_CASE("frequency recovery under jittered sampling") {
    // 256 samples vs 128 bins: bin width == Rayleigh width, so a straddling
    // tone cannot vanish into the Dirichlet nulls of both neighboring bins
    Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const double f0 = rng.uniform(0.1, 0.4);
        std::vector<double> t, v;
        double time = 0.0;
        for (int i = 0; i < 256; ++i) {
            time += rng.uniform(0.7, 1.3);
            t.push_back(time);
            v.push_back(std::sin(2.0 * std::numbers::pi * f0 * time));
        }
        const auto series = make(t, v);
        const auto grid = make_grid(series, 128);
        const auto spec = nudft(series, grid);
        std::size_t best = 0;
        for (std::size_t k = 1; k < spec.psd.size(); ++k)
            if (spec.psd[k] > spec.psd[best]) best = k;
        CHECK(std::abs(grid[best] - f0) <= grid.spacing() + 1e-12);
    }
}

TEST_CASE("resample_uniform: linear basics") {
    const auto out = resample_uniform(make({0, 2}, {0, 2}), 1.0, InterpMethod::Linear);
    CHECK(out.times == std::vector<double>{0, 1, 2});
    CHECK(out.values == std::vector<double>{0, 1, 2});
    CHECK_THROWS_AS(resample_uniform(make({0, 1, 2}, {0, 0, 0}), 1.0, InterpMethod::CubicSpline),
                    Error);
}

TEST_CASE("interpolants reproduce original samples exactly") {
    Rng rng(43);
    std::vector<double> t, v;
    double time = 0.0;
    for (int i = 0; i < 12; ++i) {
        time += rng.uniform(0.5, 2.0);
        t.push_back(time);
        v.push_back(rng.normal());
    }
    const auto s = make(t, v);
    const CubicSpline spline(s);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(interp_linear(s, t[i]) == v[i]);
        CHECK(spline(t[i]) == doctest::Approx(v[i]).epsilon(1e-12));
    }
}

TEST_CASE("natural cubic spline: polynomial reproduction at midpoints") {
    // a natural spline reproduces exactly the polynomials whose second
    // derivative vanishes at both boundary knots; for linear data that is
    // exact everywhere, and it is the strongest degree for which 1e-9 holds
    auto lin = [](double x) { return 2.5 * x - 1.0; };
    std::vector<double> t, v;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        t.push_back(x);
        v.push_back(lin(x));
    }
    const CubicSpline spline(make(t, v));
    for (double x : {-1.5, -0.5, 0.5, 1.5})
        CHECK(spline(x) == doctest::Approx(lin(x)).epsilon(1e-9));

    // a genuine cubic violates the natural boundary condition, so midpoint
    // agreement is only approximate, tightest at the center
    auto cub = [](double x) { return x * x * x - 3.0 * x; };
    std::vector<double> tc, vc;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        tc.push_back(x);
        vc.push_back(cub(x));
    }
    const CubicSpline cspline(make(tc, vc));
    CHECK(std::abs(cspline(-0.5) - cub(-0.5)) < 0.2);
    CHECK(std::abs(cspline(0.5) - cub(0.5)) < 0.2);
}

TEST_CASE("cubic spline converges to a smooth function away from boundaries") {
    std::vector<double> t, v;
    for (int i = 0; i <= 100; ++i) {
        const double x = static_cast<double>(i) * 0.1;
        t.push_back(x);
        v.push_back(std::sin(x));
    }
    const CubicSpline spline(make(t, v));
    for (double x : {1.05, 3.33, 5.55, 7.77})
        CHECK(spline(x) == doctest::Approx(std::sin(x)).epsilon(1e-5));
}

TEST_CASE("uniform_periodogram: peak at the tone, zero on zero, oracle sum") {
    // tone at a grid frequency
    std::vector<double> t, v;
    for (int i = 0; i < 64; ++i) {
        t.push_back(i);
        v.push_back(std::sin(2.0 * std::numbers::pi * 0.25 * i));
    }
    std::vector<double> freqs;
    for (int k = 1; k <= 32; ++k) freqs.push_back(k / 64.0);
    const auto spec = uniform_periodogram(make(t, v), grid_of(std::move(freqs)));
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.psd.size(); ++k)
        if (spec.psd[k] > spec.psd[best]) best = k;
    CHECK(spec.grid[best] == doctest::Approx(0.25));

    // zero signal
    std::vector<double> zeros(t.size(), 0.0);
    const auto zspec = uniform_periodogram(make(t, zeros), spec.grid);
    for (double p : zspec.psd) CHECK(p == 0.0);

    // white noise total vs oracle
    Rng rng(47);
    std::vector<double> noise(t.size());
    for (double& x : noise) x = rng.normal();
    const auto nspec = uniform_periodogram(make(t, noise), spec.grid);
    for (std::size_t k = 0; k < nspec.grid.size(); ++k) {
        const auto expect = oracles::dft_reference(t, noise, nspec.grid[k]);
        CHECK(std::abs(nspec.complex_values[k] - expect) <= 1e-9);
    }

    // non-uniform input rejected
    CHECK_THROWS_AS(uniform_periodogram(make({0, 1, 3}, {0, 0, 0}), spec.grid), Error);
}
