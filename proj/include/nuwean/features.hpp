#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "nuwean/nudft.hpp"

namespace nuwean {

// The eight per-frame frequency-domain readings, in canonical order.
struct FrameFeatures {
    double if_hz = 0.0;  // dominant (argmax-PSD) frequency
    double mnf_hz = 0.0; // PSD-weighted mean frequency
    double mdf_hz = 0.0; // half-power frequency
    double se = 0.0;     // normalized spectral entropy, [0,1]
    double sen = 0.0;    // spectral energy, sum |F|^2
    double sc = 0.0;     // spectral contrast (mean over bands of max-min PSD)
    double sf = 0.0;     // spectral flatness GM/AM, [0,1]
    double scf = 0.0;    // spectral crest factor peak/RMS, >= 1

    std::array<double, 8> as_array() const {
        return {if_hz, mnf_hz, mdf_hz, se, sen, sc, sf, scf};
    }
};

inline constexpr int kSpectralFeatureCount = 8;
inline constexpr int kDescriptorCount = 7;
inline constexpr int kFeatureVectorSize = 448; // 8 signals x 8 features x 7 descriptors

const std::array<std::string, kSpectralFeatureCount>& spectral_feature_names(); // IF..SCF
const std::array<std::string, kDescriptorCount>& descriptor_names();            // M..RMS

// The 448 canonical names "Stat[Feat(Signal)]" in (signal, feature,
// descriptor) major-to-minor order. Built once.
const std::vector<std::string>& feature_names();

struct FeatureVector {
    std::string patient_id;
    int label = 0; // 0 = success, 1 = failure
    std::vector<double> values; // kFeatureVectorSize entries, canonical order
};

double instantaneous_frequency(const Spectrum& spectrum);
double mean_frequency(const Spectrum& spectrum);
double median_frequency(const Spectrum& spectrum);
double spectral_entropy(const Spectrum& spectrum);
double spectral_energy(const Spectrum& spectrum);
double spectral_contrast(const Spectrum& spectrum, std::size_t bands = 6);
double spectral_flatness(const Spectrum& spectrum);
double spectral_crest(const Spectrum& spectrum);

FrameFeatures frame_features(const Spectrum& spectrum);

// mean, population std, interquartile range, skewness, non-excess kurtosis,
// median, RMS — in that order. Quantiles interpolate at (n-1)*p.
std::array<double, kDescriptorCount> descriptor_vector(const std::vector<double>& trajectory);

// Per-signal frame-feature trajectories -> the 448-entry patient vector.
// Requires all eight signals, each with >= 2 frames.
FeatureVector assemble_features(const std::map<SignalKind, std::vector<FrameFeatures>>& by_signal,
                                const std::string& patient_id, int label);

// Quantile by linear interpolation at position (n-1)*p between order statistics.
double quantile(std::vector<double> v, double p);

} // namespace nuwean
