// Python bindings for the main pipeline operations. Thin wrappers over the
// C++ core; vectors map to python lists.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nuwean/bayesopt.hpp"
#include "nuwean/features.hpp"
#include "nuwean/pipeline.hpp"
#include "nuwean/rng.hpp"

namespace py = pybind11;
using namespace nuwean;

namespace {

NonUniformSeries make_series(const std::string& kind, std::vector<double> times,
                             std::vector<double> values) {
    NonUniformSeries s;
    s.kind = signal_kind_from_string(kind);
    s.times = std::move(times);
    s.values = std::move(values);
    s.validate();
    return s;
}

FeatureMatrix make_matrix(std::vector<std::string> names, std::vector<std::string> patient_ids,
                          std::vector<int> labels, std::vector<std::vector<double>> rows) {
    FeatureMatrix m;
    m.names = std::move(names);
    m.patient_ids = std::move(patient_ids);
    m.labels = std::move(labels);
    m.rows = std::move(rows);
    m.validate();
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weaning-outcome prediction pipeline for non-uniformly sampled series";

    py::register_exception<Error>(m, "NuweanError");

    py::class_<NonUniformSeries>(m, "Series")
        .def(py::init(&make_series), py::arg("kind"), py::arg("times"), py::arg("values"))
        .def_property_readonly("kind", [](const NonUniformSeries& s) { return signal_label(s.kind); })
        .def_readonly("times", &NonUniformSeries::times)
        .def_readonly("values", &NonUniformSeries::values)
        .def("__len__", &NonUniformSeries::size);

    py::class_<WrangleConfig>(m, "WrangleConfig")
        .def(py::init<>())
        .def_readwrite("outlier_z_threshold", &WrangleConfig::outlier_z_threshold)
        .def_readwrite("neighbor_radius", &WrangleConfig::neighbor_radius)
        .def_readwrite("gap_threshold_s", &WrangleConfig::gap_threshold_s);

    m.def("remove_nulls", &remove_nulls);
    m.def("replace_outliers", &replace_outliers, py::arg("series"),
          py::arg("cfg") = WrangleConfig{});
    m.def("segment_gaps", &segment_gaps, py::arg("series"), py::arg("cfg") = WrangleConfig{});
    m.def("zscore_normalize", &zscore_normalize);
    m.def("wrangle", &wrangle, py::arg("series"), py::arg("cfg") = WrangleConfig{});

    m.def(
        "nudft",
        [](const NonUniformSeries& series, const std::vector<double>& freqs,
           const std::optional<std::vector<double>>& weights) {
            const Spectrum s = nudft(series, FrequencyGrid(freqs),
                                     weights ? std::span<const double>(*weights)
                                             : std::span<const double>{});
            return py::make_tuple(s.complex_values, s.psd);
        },
        py::arg("series"), py::arg("frequencies"), py::arg("weights") = std::nullopt,
        "Direct transform; returns (complex amplitudes, psd)");

    py::class_<SpectrogramConfig>(m, "SpectrogramConfig")
        .def(py::init<>())
        .def_readwrite("window_s", &SpectrogramConfig::window_s)
        .def_readwrite("overlap_fraction", &SpectrogramConfig::overlap_fraction)
        .def_readwrite("bins", &SpectrogramConfig::bins)
        .def_readwrite("min_samples_per_frame", &SpectrogramConfig::min_samples_per_frame);

    m.def(
        "spectrogram",
        [](const NonUniformSeries& series, const SpectrogramConfig& cfg) {
            py::list out;
            for (const SpectrogramFrame& f : spectrogram(series, cfg)) {
                py::dict d;
                d["start"] = f.start;
                d["duration"] = f.duration;
                d["sample_count"] = f.sample_count;
                d["frequencies"] = f.spectrum.grid.frequencies();
                d["psd"] = f.spectrum.psd;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("series"), py::arg("cfg") = SpectrogramConfig{});

    m.def(
        "frame_features",
        [](const std::vector<double>& freqs, const std::vector<double>& psd,
           const std::vector<std::complex<double>>& amplitudes, std::size_t sample_count) {
            Spectrum s{FrequencyGrid(freqs), amplitudes, psd, sample_count};
            const FrameFeatures f = frame_features(s);
            py::dict d;
            d["if_hz"] = f.if_hz;
            d["mnf_hz"] = f.mnf_hz;
            d["mdf_hz"] = f.mdf_hz;
            d["se"] = f.se;
            d["sen"] = f.sen;
            d["sc"] = f.sc;
            d["sf"] = f.sf;
            d["scf"] = f.scf;
            return d;
        },
        py::arg("frequencies"), py::arg("psd"), py::arg("amplitudes"), py::arg("sample_count"));

    m.def("descriptor_vector", &descriptor_vector);
    m.def("feature_names", [] { return feature_names(); });

    m.def(
        "mann_whitney",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const RankTestResult r = mann_whitney(a, b);
            py::dict d;
            d["u"] = r.u_statistic;
            d["z"] = r.z_value;
            d["p"] = r.p_two_sided;
            d["method"] = r.method == RankTestMethod::Exact ? "exact" : "normal_approx";
            return d;
        },
        py::arg("sample_a"), py::arg("sample_b"));

    m.def("auc_roc", &auc_roc, py::arg("scores"), py::arg("labels"));

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init([](const std::string& kind, double c, double scale, int degree) {
                 KernelSpec s;
                 s.kind = kernel_kind_from_string(kind);
                 s.c = c;
                 s.scale = scale;
                 s.degree = degree;
                 s.validate();
                 return s;
             }),
             py::arg("kind") = "rbf", py::arg("c") = 1.0, py::arg("scale") = 1.0,
             py::arg("degree") = 3)
        .def_property_readonly("kind",
                               [](const KernelSpec& s) { return kernel_kind_name(s.kind); })
        .def_readwrite("c", &KernelSpec::c)
        .def_readwrite("scale", &KernelSpec::scale)
        .def_readwrite("degree", &KernelSpec::degree);

    py::class_<TrainedModel>(m, "TrainedModel")
        .def_property_readonly("kernel", [](const TrainedModel& m_) { return m_.kernel; })
        .def_property_readonly("n_support_vectors",
                               [](const TrainedModel& m_) { return m_.support_vectors.size(); })
        .def_readonly("bias", &TrainedModel::bias);

    m.def(
        "train_svm",
        [](const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
           const KernelSpec& spec) { return train(rows, labels, spec); },
        py::arg("rows"), py::arg("labels"), py::arg("spec"));
    m.def(
        "decision_function",
        [](const TrainedModel& model, const std::vector<double>& row) {
            return decision_function(model, row);
        },
        py::arg("model"), py::arg("row"));
    m.def(
        "predict",
        [](const TrainedModel& model, const std::vector<double>& row) {
            return predict(model, row);
        },
        py::arg("model"), py::arg("row"));
    m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
    m.def("load_model", &load_model, py::arg("path"));

    m.def("expected_improvement", &expected_improvement, py::arg("mean"), py::arg("stddev"),
          py::arg("best"));
    m.def(
        "bo_maximize",
        [](const std::function<double(const std::vector<double>&)>& objective,
           const std::vector<double>& lo, const std::vector<double>& hi, std::size_t iterations,
           std::size_t init_random, std::uint64_t seed) {
            BoConfig cfg;
            cfg.iterations = iterations;
            cfg.init_random = init_random;
            cfg.seed = seed;
            const BoResult r = maximize(objective, BoxBounds{lo, hi}, cfg);
            py::dict d;
            d["best_point"] = r.best_point;
            d["best_value"] = r.best_value;
            py::list hist;
            for (const BoEvaluation& ev : r.history) {
                py::dict e;
                e["point"] = ev.point;
                e["value"] = ev.value;
                e["ok"] = ev.ok;
                hist.append(std::move(e));
            }
            d["history"] = std::move(hist);
            return d;
        },
        py::arg("objective"), py::arg("lo"), py::arg("hi"), py::arg("iterations") = 30,
        py::arg("init_random") = 10, py::arg("seed") = 1);

    m.def(
        "compare_interpolation",
        [](const NonUniformSeries& series, double rate_hz, const std::vector<double>& freqs) {
            const InterpComparison cmp =
                compare_interpolation(series, rate_hz, FrequencyGrid(freqs));
            py::dict d;
            d["frequencies"] = cmp.frequencies;
            d["psd_nudft"] = cmp.psd_nudft;
            d["psd_linear"] = cmp.psd_linear;
            d["psd_cubic"] = cmp.psd_cubic;
            d["mean_sampling_hz"] = cmp.mean_sampling_hz;
            auto diag = [](const InterpDiagnostics& x) {
                py::dict e;
                e["attenuation_ratio"] = x.attenuation_ratio;
                e["artifact_ratio"] = x.artifact_ratio;
                e["defined"] = x.defined;
                return e;
            };
            d["linear"] = diag(cmp.linear);
            d["cubic"] = diag(cmp.cubic);
            return d;
        },
        py::arg("series"), py::arg("rate_hz"), py::arg("frequencies"));

    m.def("make_feature_matrix", &make_matrix, py::arg("names"), py::arg("patient_ids"),
          py::arg("labels"), py::arg("rows"));
    m.def(
        "select_features",
        [](const FeatureMatrix& matrix, double threshold, std::size_t k) {
            const SelectionResult r = select_features(matrix, threshold, k);
            py::dict d;
            d["indices"] = r.kept_indices;
            d["names"] = r.kept_names;
            d["p_values"] = r.p_values;
            return d;
        },
        py::arg("matrix"), py::arg("threshold") = 0.05, py::arg("k") = 18);
    py::class_<FeatureMatrix>(m, "FeatureMatrix")
        .def_readonly("names", &FeatureMatrix::names)
        .def_readonly("patient_ids", &FeatureMatrix::patient_ids)
        .def_readonly("labels", &FeatureMatrix::labels)
        .def_readonly("rows", &FeatureMatrix::rows);

    m.def(
        "repeated_cv",
        [](const FeatureMatrix& matrix, const KernelSpec& spec, std::size_t repetitions,
           std::size_t folds, std::uint64_t seed) {
            RepeatedCvConfig cfg;
            cfg.repetitions = repetitions;
            cfg.folds = folds;
            cfg.seed = seed;
            const EvalReport r = repeated_cv(matrix, spec, cfg);
            py::dict d;
            d["auc_mean"] = r.auc.mean;
            d["auc_std"] = r.auc.stddev;
            d["accuracy_mean"] = r.accuracy.mean;
            d["evaluations"] = r.evaluations.size();
            return d;
        },
        py::arg("matrix"), py::arg("spec"), py::arg("repetitions") = 150, py::arg("folds") = 4,
        py::arg("seed") = 1);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("cv_repetitions", &RunConfig::cv_repetitions)
        .def_readwrite("cv_folds", &RunConfig::cv_folds)
        .def_readwrite("bo_iterations", &RunConfig::bo_iterations)
        .def_readwrite("bo_init_random", &RunConfig::bo_init_random)
        .def_readwrite("selection_threshold", &RunConfig::selection_threshold)
        .def_readwrite("selection_k", &RunConfig::selection_k)
        .def_readwrite("synth_success", &RunConfig::synth_success)
        .def_readwrite("synth_failure", &RunConfig::synth_failure)
        .def_readwrite("synth_difficulty", &RunConfig::synth_difficulty)
        .def_property_readonly("config_hash", &RunConfig::hash);

    m.def("synth_cohort_to_dir",
          [](const std::string& dir, std::size_t n_success, std::size_t n_failure,
             std::uint64_t seed, double difficulty) {
              const auto cohort = synth_cohort(n_success, n_failure, seed, difficulty);
              write_cohort(dir, cohort);
              return cohort.size();
          });
    m.def(
        "build_features",
        [](const std::string& manifest, const RunConfig& cfg) {
            return build_feature_matrix(ingest_cohort(manifest), cfg);
        },
        py::arg("manifest"), py::arg("cfg") = RunConfig{});
    m.def(
        "run_pipeline",
        [](const std::string& manifest, const std::string& out_dir, const RunConfig& cfg) {
            const RunArtifacts art = run_pipeline(ingest_cohort(manifest), cfg, out_dir);
            py::dict d;
            d["auc_mean"] = art.report.auc.mean;
            d["selected"] = art.selection.kept_names;
            d["best_kernel"] = kernel_kind_name(art.search.best_spec.kind);
            d["files"] = art.files;
            return d;
        },
        py::arg("manifest"), py::arg("out_dir"), py::arg("cfg") = RunConfig{});
}
