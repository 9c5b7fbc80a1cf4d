#include "nuwean/features.hpp"

#include <algorithm>
#include <cmath>

namespace nuwean {

namespace {

double psd_total(const Spectrum& s, const char* op) {
    double total = 0.0;
    for (double p : s.psd) total += p;
    if (!(total > 0.0))
        throw Error("features", std::string(op) + ": all-zero PSD");
    return total;
}

// floor used inside flatness/crest so a spike-among-zeros PSD stays finite
double epsilon_floor(const Spectrum& s) {
    double mx = 0.0;
    for (double p : s.psd) mx = std::max(mx, p);
    return 1e-12 * mx;
}

} // namespace

const std::array<std::string, kSpectralFeatureCount>& spectral_feature_names() {
    static const std::array<std::string, kSpectralFeatureCount> names = {
        "IF", "MNF", "MDF", "SE", "SEn", "SC", "SF", "SCF"};
    return names;
}

const std::array<std::string, kDescriptorCount>& descriptor_names() {
    static const std::array<std::string, kDescriptorCount> names = {
        "M", "Std", "Iq", "S", "K", "Me", "RMS"};
    return names;
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        out.reserve(kFeatureVectorSize);
        for (SignalKind kind : all_signal_kinds()) {
            const std::string signal = signal_label(kind);
            for (const std::string& feat : spectral_feature_names()) {
                for (const std::string& desc : descriptor_names()) {
                    out.push_back(desc + "[" + feat + "(" + signal + ")]");
                }
            }
        }
        return out;
    }();
    return names;
}

double instantaneous_frequency(const Spectrum& s) {
    psd_total(s, "instantaneous_frequency");
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.psd.size(); ++k) {
        if (s.psd[k] > s.psd[best]) best = k; // ties stay at the lower frequency
    }
    return s.grid[best];
}

double mean_frequency(const Spectrum& s) {
    const double total = psd_total(s, "mean_frequency");
    double acc = 0.0;
    for (std::size_t k = 0; k < s.psd.size(); ++k) acc += s.grid[k] * s.psd[k];
    return acc / total;
}

double median_frequency(const Spectrum& s) {
    const double total = psd_total(s, "median_frequency");
    const double half = 0.5 * total;
    // Each bin's power spread uniformly over a bin-width interval centered on
    // its frequency; MDF is the half-power point of that piecewise CDF.
    const double width = s.grid.spacing();
    double cum = 0.0;
    for (std::size_t k = 0; k < s.psd.size(); ++k) {
        if (cum + s.psd[k] >= half) {
            const double left_edge = s.grid[k] - 0.5 * width;
            const double frac = s.psd[k] > 0.0 ? (half - cum) / s.psd[k] : 0.0;
            return left_edge + frac * width;
        }
        cum += s.psd[k];
    }
    return s.grid.max(); // rounding fallthrough
}

double spectral_entropy(const Spectrum& s) {
    const double total = psd_total(s, "spectral_entropy");
    double h = 0.0;
    for (double p : s.psd) {
        const double q = p / total;
        if (q > 0.0) h -= q * std::log(q);
    }
    return h / std::log(static_cast<double>(s.psd.size()));
}

double spectral_energy(const Spectrum& s) {
    double e = 0.0;
    for (const auto& f : s.complex_values) e += std::norm(f);
    return e;
}

double spectral_contrast(const Spectrum& s, std::size_t bands) {
    const std::size_t m = s.psd.size();
    if (bands == 0 || m < bands)
        throw Error("features", "spectral_contrast: fewer bins than bands");
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < bands; ++b) {
        const std::size_t lo = b * m / bands;
        const std::size_t hi = (b + 1) * m / bands;
        if (lo == hi) continue;
        double mn = s.psd[lo], mx = s.psd[lo];
        for (std::size_t k = lo + 1; k < hi; ++k) {
            mn = std::min(mn, s.psd[k]);
            mx = std::max(mx, s.psd[k]);
        }
        acc += mx - mn;
        ++used;
    }
    return acc / static_cast<double>(used);
}

double spectral_flatness(const Spectrum& s) {
    psd_total(s, "spectral_flatness");
    const double eps = epsilon_floor(s);
    double log_sum = 0.0, sum = 0.0;
    for (double p : s.psd) {
        const double q = std::max(p, eps);
        log_sum += std::log(q);
        sum += q;
    }
    const double n = static_cast<double>(s.psd.size());
    const double gm = std::exp(log_sum / n);
    const double am = sum / n;
    return gm / am;
}

double spectral_crest(const Spectrum& s) {
    psd_total(s, "spectral_crest");
    const double eps = epsilon_floor(s);
    double mx = 0.0, sq = 0.0;
    for (double p : s.psd) {
        const double q = std::max(p, eps);
        mx = std::max(mx, q);
        sq += q * q;
    }
    const double rms = std::sqrt(sq / static_cast<double>(s.psd.size()));
    return mx / rms;
}

FrameFeatures frame_features(const Spectrum& s) {
    FrameFeatures f;
    f.if_hz = instantaneous_frequency(s);
    f.mnf_hz = mean_frequency(s);
    f.mdf_hz = median_frequency(s);
    f.se = spectral_entropy(s);
    f.sen = spectral_energy(s);
    f.sc = spectral_contrast(s);
    f.sf = spectral_flatness(s);
    f.scf = spectral_crest(s);
    return f;
}

double quantile(std::vector<double> v, double p) {
    if (v.empty())
        throw Error("features", "quantile of empty data");
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

std::array<double, kDescriptorCount> descriptor_vector(const std::vector<double>& trajectory) {
    const std::size_t n = trajectory.size();
    if (n < 2)
        throw Error("features", "descriptor_vector: trajectory shorter than 2 frames");

    const double m = mean_of(trajectory);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, sq = 0.0;
    for (double x : trajectory) {
        const double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        sq += x * x;
    }
    const double dn = static_cast<double>(n);
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;

    const double sd = std::sqrt(m2);
    const double skew = m2 > 0.0 ? m3 / (m2 * sd) : 0.0;
    const double kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0; // Pearson; normal -> 3
    const double iq = quantile(trajectory, 0.75) - quantile(trajectory, 0.25);
    const double me = quantile(trajectory, 0.5);
    const double rms = std::sqrt(sq / dn);
    return {m, sd, iq, skew, kurt, me, rms};
}

FeatureVector assemble_features(const std::map<SignalKind, std::vector<FrameFeatures>>& by_signal,
                                const std::string& patient_id, int label) {
    FeatureVector out;
    out.patient_id = patient_id;
    out.label = label;
    out.values.reserve(kFeatureVectorSize);

    for (SignalKind kind : all_signal_kinds()) {
        const auto it = by_signal.find(kind);
        if (it == by_signal.end())
            throw Error("features", "missing signal " + signal_label(kind) +
                                        " for patient " + patient_id);
        const std::vector<FrameFeatures>& frames = it->second;
        if (frames.size() < 2)
            throw Error("features", "signal " + signal_label(kind) + " for patient " +
                                        patient_id + " has fewer than 2 frames");

        for (int feat = 0; feat < kSpectralFeatureCount; ++feat) {
            std::vector<double> trajectory;
            trajectory.reserve(frames.size());
            for (const FrameFeatures& f : frames) trajectory.push_back(f.as_array()[feat]);
            const auto desc = descriptor_vector(trajectory);
            out.values.insert(out.values.end(), desc.begin(), desc.end());
        }
    }
    return out;
}

} // namespace nuwean
