#include "morf/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "morf/descriptor_io.hpp"
#include "morf/errors.hpp"
#include "morf/parallel.hpp"

namespace morf {

using nlohmann::json;

std::vector<KernelParams> GridSpec::expand(std::size_t descriptor_length) const {
  std::vector<KernelParams> out;
  const double d = static_cast<double>(std::max<std::size_t>(descriptor_length, 1));
  for (double c : C) {
    for (const GammaSpec& g : gamma) {
      for (double offset : c0) {
        out.push_back({g.per_dimension ? g.value / d : g.value, offset, c});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const KernelParams& a, const KernelParams& b) {
    return std::tie(a.C, a.gamma, a.c0) < std::tie(b.C, b.gamma, b.c0);
  });
  return out;
}

GridSpec default_grid() {
  return {{0.1, 1.0, 10.0, 100.0}, {{1.0, true}, {10.0, true}}, {0.0, 1.0}};
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double grid_number(const std::string& text, const std::string& key) {
  try {
    return parse_double(text);
  } catch (const IoError&) {
    throw ConfigError("grid entry '" + key + "' has malformed value '" + text + "'");
  }
}

}  // namespace

GridSpec parse_grid_spec(std::string_view text) {
  GridSpec grid;
  std::set<std::string> seen;
  for (const std::string& part : split(text, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("grid entry '" + part + "' lacks '='");
    const std::string key = trim(std::string_view(part).substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError("grid key '" + key + "' repeated");
    for (const std::string& item : split(std::string_view(part).substr(eq + 1), ',')) {
      if (item.empty()) throw ConfigError("grid entry '" + key + "' has an empty value");
      if (key == "C") {
        const double v = grid_number(item, key);
        if (!(v > 0.0)) throw ConfigError("grid C values must be > 0");
        grid.C.push_back(v);
      } else if (key == "gamma") {
        GammaSpec g;
        std::string number = item;
        if (item.size() > 2 && item.ends_with("/d")) {
          g.per_dimension = true;
          number = item.substr(0, item.size() - 2);
        }
        g.value = grid_number(number, key);
        if (!(g.value > 0.0)) throw ConfigError("grid gamma values must be > 0");
        grid.gamma.push_back(g);
      } else if (key == "c0") {
        grid.c0.push_back(grid_number(item, key));
      } else {
        throw ConfigError("unknown grid key '" + key + "' (expected C, gamma, c0)");
      }
    }
  }
  const GridSpec defaults = default_grid();
  if (!seen.contains("C")) grid.C = defaults.C;
  if (!seen.contains("gamma")) grid.gamma = defaults.gamma;
  if (!seen.contains("c0")) grid.c0 = defaults.c0;
  return grid;
}

std::string format_grid_spec(const GridSpec& grid) {
  std::string out = "C=";
  for (std::size_t i = 0; i < grid.C.size(); ++i) {
    out += (i ? "," : "") + format_double(grid.C[i]);
  }
  out += ";gamma=";
  for (std::size_t i = 0; i < grid.gamma.size(); ++i) {
    out += (i ? "," : "") + format_double(grid.gamma[i].value) +
           (grid.gamma[i].per_dimension ? "/d" : "");
  }
  out += ";c0=";
  for (std::size_t i = 0; i < grid.c0.size(); ++i) {
    out += (i ? "," : "") + format_double(grid.c0[i]);
  }
  return out;
}

namespace {

struct InnerSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Round-robin assignment within each class, in sample order.
std::vector<InnerSplit> stratified_folds(std::span<const int> labels, int k) {
  std::map<int, int> seen;
  std::vector<int> fold_of(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) fold_of[i] = seen[labels[i]]++ % k;
  std::vector<InnerSplit> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int f = 0; f < k; ++f) (fold_of[i] == f ? out[f].test : out[f].train).push_back(i);
  }
  std::erase_if(out, [](const InnerSplit& s) { return s.test.empty() || s.train.empty(); });
  return out;
}

// Predictions for `test` from a model fitted on `train`; a training set with
// a single class predicts that class.
std::vector<int> fit_and_predict(const LinearGram& gram, std::span<const std::size_t> train,
                                 std::span<const std::size_t> test, std::span<const int> labels,
                                 int num_classes, const KernelParams& params) {
  std::set<int> present;
  for (std::size_t i : train) present.insert(labels[i]);
  if (present.size() < 2) return std::vector<int>(test.size(), *present.begin());
  const GramMachines fit = fit_on_gram(gram, train, labels, num_classes, params);
  std::vector<int> out;
  out.reserve(test.size());
  for (std::size_t q : test) out.push_back(argmax_first(decision_on_gram(fit, gram, q)));
  return out;
}

}  // namespace

GridSearchResult grid_search(std::span<const std::vector<double>> features,
                             std::span<const int> labels,
                             std::span<const std::string> subject_ids, int num_classes,
                             std::span<const KernelParams> grid) {
  if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
  if (features.size() != labels.size() || features.size() != subject_ids.size()) {
    throw FeatureError("grid search inputs differ in length");
  }
  GridSearchResult result;
  result.best = grid.front();
  if (grid.size() == 1) {
    result.accuracies.assign(1, std::numeric_limits<double>::quiet_NaN());
    return result;
  }

  std::vector<InnerSplit> splits;
  const std::set<std::string> distinct(subject_ids.begin(), subject_ids.end());
  if (distinct.size() >= 2) {
    for (IndexFold& f : loso_folds(subject_ids)) {
      splits.push_back({std::move(f.train), std::move(f.test)});
    }
  } else {
    result.used_fallback = true;
    splits = stratified_folds(labels, 3);
  }
  if (splits.empty()) throw SplitError("no usable inner validation split");

  const LinearGram gram(features);
  result.best_accuracy = -1.0;
  for (const KernelParams& params : grid) {
    double sum = 0.0;
    for (const InnerSplit& s : splits) {
      const std::vector<int> pred =
          fit_and_predict(gram, s.train, s.test, labels, num_classes, params);
      long correct = 0;
      for (std::size_t k = 0; k < s.test.size(); ++k) correct += pred[k] == labels[s.test[k]];
      sum += static_cast<double>(correct) / static_cast<double>(s.test.size());
    }
    const double acc = sum / static_cast<double>(splits.size());
    result.accuracies.push_back(acc);
    if (acc > result.best_accuracy) {
      result.best_accuracy = acc;
      result.best = params;
    }
  }
  return result;
}

Metrics score_predictions(const std::vector<std::string>& classes, std::span<const int> truth,
                          std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw FeatureError("prediction count mismatch");
  const std::size_t k = classes.size();
  Metrics m;
  m.classes = classes;
  m.confusion.assign(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++m.confusion[truth[i]][predicted[i]];
  long total = 0, diag = 0;
  for (std::size_t a = 0; a < k; ++a) {
    diag += m.confusion[a][a];
    for (std::size_t b = 0; b < k; ++b) total += m.confusion[a][b];
  }
  m.accuracy = total > 0 ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
  double f_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    long tp = m.confusion[c][c], col = 0, row = 0;
    for (std::size_t o = 0; o < k; ++o) {
      col += m.confusion[o][c];
      row += m.confusion[c][o];
    }
    const double precision = col > 0 ? static_cast<double>(tp) / col : 0.0;
    const double recall = row > 0 ? static_cast<double>(tp) / row : 0.0;
    f_sum += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  m.f_measure = k > 0 ? f_sum / static_cast<double>(k) : 0.0;
  return m;
}

FoldRecord run_fold(const LabeledSamples& samples, const IndexFold& fold,
                    std::span<const KernelParams> grid) {
  std::vector<std::vector<double>> train_x;
  std::vector<int> train_y;
  std::vector<std::string> train_s;
  for (std::size_t i : fold.train) {
    train_x.push_back(samples.features[i]);
    train_y.push_back(samples.labels[i]);
    train_s.push_back(samples.subjects[i]);
  }
  const int num_classes = static_cast<int>(samples.classes.size());
  const GridSearchResult search = grid_search(train_x, train_y, train_s, num_classes, grid);
  const SvmModel model = train_svm(train_x, train_y, samples.classes, search.best);

  FoldRecord rec;
  rec.subject = fold.subject;
  rec.params = search.best;
  rec.inner_accuracy = search.best_accuracy;
  rec.fallback = search.used_fallback;
  rec.test = fold.test;
  for (std::size_t i : fold.test) {
    Prediction p = predict(model, samples.features[i]);
    rec.predicted.push_back(p.class_index);
    rec.scores.push_back(std::move(p.scores));
  }
  return rec;
}

Metrics evaluate_samples(const LabeledSamples& samples, const GridSpec& grid, int jobs) {
  if (samples.features.empty()) throw SplitError("no samples to evaluate");
  const std::vector<IndexFold> folds = loso_folds(samples.subjects);
  const std::vector<KernelParams> params = grid.expand(samples.features.front().size());
  if (params.empty()) throw ConfigError("hyperparameter grid is empty");

  std::vector<FoldRecord> records(folds.size());
  parallel_for(folds.size(), jobs,
               [&](std::size_t f) { records[f] = run_fold(samples, folds[f], params); });

  std::vector<int> truth, predicted;
  for (const FoldRecord& rec : records) {
    for (std::size_t k = 0; k < rec.test.size(); ++k) {
      truth.push_back(samples.labels[rec.test[k]]);
      predicted.push_back(rec.predicted[k]);
    }
  }
  Metrics m = score_predictions(samples.classes, truth, predicted);
  m.folds = std::move(records);
  return m;
}

ExtractionResult extract_all(const DatasetManifest& manifest, const MorfParams& morf,
                             const TemporalFilterConfig& filter, int jobs) {
  const std::size_t n = manifest.sequences.size();
  ExtractionResult out;
  out.descriptors.resize(n);
  out.errors.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const SequenceAnnotation& seq = manifest.sequences[i];
    try {
      const std::vector<GrayFrame> frames = load_sequence(seq, manifest.base_dir);
      TemporalFilterConfig cfg = filter;
      cfg.fps = seq.fps;
      out.descriptors[i] = extract_morf(frames, {seq.onset, seq.apex}, morf, cfg).values;
    } catch (const std::exception& e) {
      out.errors[i] = e.what();
      if (out.errors[i].empty()) out.errors[i] = "unknown error";
    }
  });
  return out;
}

LosoReport evaluate_loso(const DatasetManifest& manifest, const EvalOptions& options,
                         std::ostream* log) {
  manifest.validate();
  options.morf.validate();
  const ExtractionResult extracted = extract_all(manifest, options.morf, options.filter,
                                                 options.jobs);
  LosoReport report;
  LabeledSamples& samples = report.samples;
  samples.classes = manifest.classes;
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < manifest.sequences.size(); ++i) {
    const SequenceAnnotation& seq = manifest.sequences[i];
    if (!extracted.errors[i].empty()) {
      failed.push_back(seq.id);
      if (log) *log << "warning: sequence '" << seq.id << "' excluded: " << extracted.errors[i] << "\n";
      continue;
    }
    samples.ids.push_back(seq.id);
    samples.subjects.push_back(seq.subject_id);
    samples.labels.push_back(manifest.class_index(seq.label));
    samples.features.push_back(extracted.descriptors[i]);
  }
  report.metrics = evaluate_samples(samples, options.grid, options.jobs);
  report.metrics.failed_ids = std::move(failed);
  if (log) {
    for (const FoldRecord& rec : report.metrics.folds) {
      long correct = 0;
      for (std::size_t k = 0; k < rec.test.size(); ++k) {
        correct += rec.predicted[k] == samples.labels[rec.test[k]];
      }
      *log << "fold " << rec.subject << ": " << correct << "/" << rec.test.size()
           << " correct, C=" << format_double(rec.params.C)
           << " gamma=" << format_double(rec.params.gamma)
           << " c0=" << format_double(rec.params.c0)
           << (rec.fallback ? " (stratified 3-fold search)" : "") << "\n";
    }
  }
  return report;
}

json metrics_to_json(const Metrics& metrics, const LabeledSamples& samples) {
  json doc;
  doc["classes"] = metrics.classes;
  doc["accuracy"] = metrics.accuracy;
  doc["f_measure"] = metrics.f_measure;
  doc["confusion"] = metrics.confusion;
  doc["failed_sequences"] = metrics.failed_ids;
  doc["warnings"] = metrics.failed_ids.size();
  json folds = json::array();
  for (const FoldRecord& rec : metrics.folds) {
    json f;
    f["subject"] = rec.subject;
    f["C"] = rec.params.C;
    f["gamma"] = rec.params.gamma;
    f["c0"] = rec.params.c0;
    f["degree"] = KernelParams::degree;
    if (std::isfinite(rec.inner_accuracy)) {
      f["inner_accuracy"] = rec.inner_accuracy;
    } else {
      f["inner_accuracy"] = nullptr;
    }
    f["inner_split"] = rec.fallback ? "stratified-3-fold" : "leave-one-subject-out";
    long correct = 0;
    json tests = json::array();
    for (std::size_t k = 0; k < rec.test.size(); ++k) {
      const std::size_t i = rec.test[k];
      correct += rec.predicted[k] == samples.labels[i];
      tests.push_back({{"id", samples.ids[i]},
                       {"label", samples.classes[samples.labels[i]]},
                       {"predicted", samples.classes[rec.predicted[k]]}});
    }
    f["correct"] = correct;
    f["total"] = rec.test.size();
    f["sequences"] = std::move(tests);
    folds.push_back(std::move(f));
  }
  doc["folds"] = std::move(folds);
  return doc;
}

std::string predictions_csv(const Metrics& metrics, const LabeledSamples& samples) {
  std::string out = "id,subject,label,predicted";
  for (const std::string& c : metrics.classes) out += ",score_" + c;
  out += "\n";
  for (const FoldRecord& rec : metrics.folds) {
    for (std::size_t k = 0; k < rec.test.size(); ++k) {
      const std::size_t i = rec.test[k];
      out += samples.ids[i] + "," + samples.subjects[i] + "," +
             samples.classes[samples.labels[i]] + "," + samples.classes[rec.predicted[k]];
      for (double s : rec.scores[k]) out += "," + format_double(s);
      out += "\n";
    }
  }
  return out;
}

}  // namespace morf
