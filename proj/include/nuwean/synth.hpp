#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nuwean/series.hpp"

namespace nuwean {

struct PatientRecord {
    std::string patient_id;
    int label = 0; // 0 = success, 1 = failure
    std::map<SignalKind, NonUniformSeries> series;
};

// Synthetic stand-in cohort. Breath-by-breath (and beat-by-beat for RR)
// sampling from a jittered renewal process; the two classes differ in
// dominant-frequency stability and in how tonal versus broadband the series
// are. `difficulty` interpolates both classes toward a common parameter set:
// 0 = fully separated, 1 = statistically indistinguishable. Nulls, outlier
// spikes, and one optional gap per series exercise the wrangling stage.
std::vector<PatientRecord> synth_cohort(std::size_t n_success, std::size_t n_failure,
                                        std::uint64_t seed, double difficulty);

} // namespace nuwean
