#include "nuwean/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "nuwean/rng.hpp"

namespace nuwean {

namespace {

constexpr double kDurationS = 1800.0; // one 30-minute trial
constexpr double kJitter = 0.3;       // +-30% of the nominal interval

struct ClassParams {
    double tone_amp;
    double noise_amp;
    double freq_wander; // per-sample random-walk stddev of the modulation frequency
};

// success: stable narrowband modulation; failure: weak smeared tone in noise
constexpr ClassParams kSuccess{1.0, 0.35, 0.0};
constexpr ClassParams kFailure{0.35, 1.0, 0.004};

double lerp(double a, double b, double t) { return a + (b - a) * t; }

ClassParams params_for(int label, double difficulty) {
    const ClassParams mid{lerp(kSuccess.tone_amp, kFailure.tone_amp, 0.5),
                          lerp(kSuccess.noise_amp, kFailure.noise_amp, 0.5),
                          lerp(kSuccess.freq_wander, kFailure.freq_wander, 0.5)};
    const ClassParams& base = label == 0 ? kSuccess : kFailure;
    return {lerp(base.tone_amp, mid.tone_amp, difficulty),
            lerp(base.noise_amp, mid.noise_amp, difficulty),
            lerp(base.freq_wander, mid.freq_wander, difficulty)};
}

double nominal_interval(SignalKind kind) {
    return kind == SignalKind::RR ? 0.83 : 3.3; // heartbeats vs breaths
}

NonUniformSeries generate_signal(SignalKind kind, const ClassParams& params,
                                 std::uint64_t signal_seed) {
    Rng rng(signal_seed);
    Rng corrupt(derive_seed(signal_seed, 7));

    const double base_dt = nominal_interval(kind);
    const double f0 = rng.uniform(0.05, 0.10);
    const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);

    NonUniformSeries series;
    series.kind = kind;
    double t = 0.0;
    double f = f0;
    double phase = phase0;
    while (t < kDurationS) {
        const double dt = base_dt * rng.uniform(1.0 - kJitter, 1.0 + kJitter);
        t += dt;
        f = std::clamp(f + params.freq_wander * rng.normal(), 0.03, 0.13);
        phase += 2.0 * std::numbers::pi * f * dt;
        const double v = params.tone_amp * std::sin(phase) + params.noise_amp * rng.normal();
        series.times.push_back(t);
        series.values.push_back(v);
    }

    // corruption to exercise wrangling: sparse nulls, sparse large spikes,
    // and at most one mid-recording gap
    for (double& v : series.values) {
        if (corrupt.bernoulli(0.01)) {
            v = std::numeric_limits<double>::quiet_NaN();
        } else if (corrupt.bernoulli(0.005)) {
            const double sign = corrupt.bernoulli(0.5) ? 1.0 : -1.0;
            v += sign * corrupt.uniform(8.0, 15.0);
        }
    }
    if (corrupt.bernoulli(0.5)) {
        const double gap_start = corrupt.uniform(200.0, kDurationS - 300.0);
        const double gap_len = corrupt.uniform(30.0, 60.0);
        NonUniformSeries kept;
        kept.kind = kind;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series.times[i] >= gap_start && series.times[i] <= gap_start + gap_len) continue;
            kept.times.push_back(series.times[i]);
            kept.values.push_back(series.values[i]);
        }
        series = std::move(kept);
    }
    return series;
}

} // namespace

std::vector<PatientRecord> synth_cohort(std::size_t n_success, std::size_t n_failure,
                                        std::uint64_t seed, double difficulty) {
    if (n_success == 0 || n_failure == 0)
        throw Error("synth", "both class counts must be >= 1");
    if (!(difficulty >= 0.0 && difficulty <= 1.0))
        throw Error("synth", "difficulty must be in [0, 1]");

    std::vector<PatientRecord> cohort;
    cohort.reserve(n_success + n_failure);
    const std::size_t total = n_success + n_failure;
    for (std::size_t p = 0; p < total; ++p) {
        const int label = p < n_success ? 0 : 1;
        const std::size_t within = label == 0 ? p : p - n_success;

        PatientRecord record;
        char id[16];
        std::snprintf(id, sizeof(id), "%c%03zu", label == 0 ? 's' : 'f', within + 1);
        record.patient_id = id;
        record.label = label;

        const ClassParams params = params_for(label, difficulty);
        const std::uint64_t patient_seed = derive_seed(seed, 0x500, p);
        std::size_t ki = 0;
        for (SignalKind kind : all_signal_kinds()) {
            record.series[kind] = generate_signal(kind, params, derive_seed(patient_seed, ki));
            ++ki;
        }
        cohort.push_back(std::move(record));
    }
    return cohort;
}

} // namespace nuwean
