#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace morf {

/// K(u, v) = (gamma <u, v> + c0)^3.
struct KernelParams {
  static constexpr int degree = 3;
  double gamma = 1.0;
  double c0 = 0.0;
  double C = 1.0;

  void validate() const;
  double operator()(double inner_product) const noexcept;
};

/// Target class vs rest; decision(x) = sum_i coefficients[i] K(sv_i, x) + bias.
struct BinaryMachine {
  std::vector<double> coefficients;  ///< alpha_i y_i, aligned with SvmModel::support_vectors
  double bias = 0.0;
};

struct SvmModel {
  std::vector<std::string> classes;
  KernelParams kernel;
  std::size_t feature_length = 0;
  /// Union of the support vectors of all machines.
  std::vector<std::vector<double>> support_vectors;
  std::vector<BinaryMachine> machines;  ///< one per class, class-list order
};

struct Prediction {
  int class_index = 0;
  std::string label;
  std::vector<double> scores;  ///< decision value per class, class-list order
};

inline constexpr double kSmoTolerance = 1e-3;

/// One-vs-all polynomial SVM. labels index into classes. Throws
/// TrainingError when fewer than two classes occur, FeatureError when
/// feature lengths differ.
SvmModel train_svm(std::span<const std::vector<double>> features, std::span<const int> labels,
                   const std::vector<std::string>& classes, const KernelParams& params);

/// Highest decision value wins; ties go to the earlier class.
Prediction predict(const SvmModel& model, std::span<const double> feature);

/// Inner products of a fixed feature set, computed once and shared by every
/// kernel setting.
class LinearGram {
 public:
  explicit LinearGram(std::span<const std::vector<double>> features);
  double operator()(std::size_t i, std::size_t j) const noexcept { return g_[i * n_ + j]; }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> g_;
};

/// One-vs-all machines expressed over indices of a LinearGram.
struct GramMachines {
  KernelParams kernel;
  std::vector<std::size_t> train;
  std::vector<std::vector<double>> coefficients;  ///< per class, aligned with train
  std::vector<double> bias;
};

GramMachines fit_on_gram(const LinearGram& gram, std::span<const std::size_t> train,
                         std::span<const int> labels, int num_classes,
                         const KernelParams& params);

/// Decision values of the sample at gram index `query`.
std::vector<double> decision_on_gram(const GramMachines& machines, const LinearGram& gram,
                                     std::size_t query);

int argmax_first(std::span<const double> scores) noexcept;

namespace detail {

struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Soft-margin dual on a precomputed n x n kernel matrix (row-major) with
/// labels y in {-1, +1}; stops when the maximal KKT violation is below tol.
SmoResult solve_smo(std::span<const double> kernel, std::span<const int> y, double C,
                    double tol = kSmoTolerance);

}  // namespace detail

}  // namespace morf
