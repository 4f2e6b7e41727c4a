#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "morf/dataset.hpp"
#include "morf/descriptor.hpp"
#include "morf/svm.hpp"
#include "morf/temporal_filter.hpp"

namespace morf {

/// A gamma grid entry, either absolute or divided by the descriptor length.
struct GammaSpec {
  double value = 1.0;
  bool per_dimension = false;
};

struct GridSpec {
  std::vector<double> C;
  std::vector<GammaSpec> gamma;
  std::vector<double> c0;

  /// All combinations sorted ascending by C, then gamma, then c0.
  std::vector<KernelParams> expand(std::size_t descriptor_length) const;
};

/// C in {0.1, 1, 10, 100}, gamma in {1/d, 10/d}, c0 in {0, 1}.
GridSpec default_grid();

/// "C=0.1,1,10;gamma=1/d,0.5;c0=0,1". Throws ConfigError on malformed or
/// empty entries and on non-positive C or gamma.
GridSpec parse_grid_spec(std::string_view text);
std::string format_grid_spec(const GridSpec& grid);

struct GridSearchResult {
  KernelParams best;
  double best_accuracy = 0.0;
  /// True when the training set held one subject and stratified 3-fold
  /// replaced the inner leave-one-subject-out.
  bool used_fallback = false;
  std::vector<double> accuracies;  ///< per grid point, grid order
};

/// Exhaustive search by inner cross-validation over the given training data
/// only. Ties keep the earliest grid point.
GridSearchResult grid_search(std::span<const std::vector<double>> features,
                             std::span<const int> labels,
                             std::span<const std::string> subject_ids, int num_classes,
                             std::span<const KernelParams> grid);

/// Descriptors ready for classification, all in one order.
struct LabeledSamples {
  std::vector<std::string> classes;
  std::vector<std::string> ids;
  std::vector<std::string> subjects;
  std::vector<int> labels;
  std::vector<std::vector<double>> features;
};

struct FoldRecord {
  std::string subject;
  KernelParams params;
  double inner_accuracy = 0.0;
  bool fallback = false;
  std::vector<std::size_t> test;  ///< sample indices
  std::vector<int> predicted;
  std::vector<std::vector<double>> scores;
};

struct Metrics {
  std::vector<std::string> classes;
  double accuracy = 0.0;
  double f_measure = 0.0;  ///< macro-averaged F1
  std::vector<std::vector<long>> confusion;  ///< [truth][predicted]
  std::vector<FoldRecord> folds;
  std::vector<std::string> failed_ids;  ///< sequences excluded after extraction errors
};

/// Confusion matrix, accuracy and macro-F1 (0/0 counted as 0).
Metrics score_predictions(const std::vector<std::string>& classes, std::span<const int> truth,
                          std::span<const int> predicted);

/// Trains on every sample outside the fold's test set and predicts the
/// test set. The training subset is copied out before searching, so the
/// held-out samples are never visible to model selection.
FoldRecord run_fold(const LabeledSamples& samples, const IndexFold& fold,
                    std::span<const KernelParams> grid);

/// Leave-one-subject-out over precomputed descriptors. Folds run on up to
/// `jobs` threads; reductions happen in fold order.
Metrics evaluate_samples(const LabeledSamples& samples, const GridSpec& grid, int jobs);

struct EvalOptions {
  MorfParams morf;
  TemporalFilterConfig filter;
  GridSpec grid = default_grid();
  int jobs = 1;
};

struct LosoReport {
  LabeledSamples samples;
  Metrics metrics;
};

/// Descriptor extraction (per-sequence fps from the manifest) followed by
/// evaluate_samples. Sequences that fail to extract are excluded and listed.
/// The per-fold log is written after all folds finish, in fold order.
LosoReport evaluate_loso(const DatasetManifest& manifest, const EvalOptions& options,
                         std::ostream* log = nullptr);

/// Extracts every sequence's descriptor; failures leave an empty vector and
/// an error message at the same index.
struct ExtractionResult {
  std::vector<std::vector<double>> descriptors;
  std::vector<std::string> errors;
};
ExtractionResult extract_all(const DatasetManifest& manifest, const MorfParams& morf,
                             const TemporalFilterConfig& filter, int jobs);

nlohmann::json metrics_to_json(const Metrics& metrics, const LabeledSamples& samples);
std::string predictions_csv(const Metrics& metrics, const LabeledSamples& samples);

}  // namespace morf
