#include "morf/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "morf/errors.hpp"

namespace morf {

void KernelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("kernel gamma must be > 0");
  if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("penalty C must be > 0");
  if (!std::isfinite(c0)) throw ConfigError("kernel offset must be finite");
}

double KernelParams::operator()(double inner_product) const noexcept {
  const double base = gamma * inner_product + c0;
  return base * base * base;
}

namespace detail {

namespace {
constexpr double kTau = 1e-12;
}

SmoResult solve_smo(std::span<const double> kernel, std::span<const int> y, double C,
                    double tol) {
  const std::size_t n = y.size();
  SmoResult res;
  res.alpha.assign(n, 0.0);
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!has_pos || !has_neg) {
    res.bias = has_pos ? 1.0 : -1.0;
    res.converged = true;
    return res;
  }

  const auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };
  std::vector<double>& alpha = res.alpha;
  std::vector<double> grad(n, -1.0);
  const auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  const auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  const std::size_t max_iter = std::max<std::size_t>(10'000'000, 100 * n);

  while (res.iterations < max_iter) {
    // Maximal violating i, then j by second-order gain. Strict comparisons
    // keep the first index among ties.
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const bool in_up = y[t] == 1 ? !upper(t) : !lower(t);
      if (in_up && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0) {
      res.converged = true;
      break;
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const bool in_low = y[t] == 1 ? !lower(t) : !upper(t);
      if (!in_low) continue;
      const double v = y[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      const double grad_diff = gmax + v;
      if (grad_diff > 0.0) {
        double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (gmax + gmax2 < tol || j < 0) {
      res.converged = true;
      break;
    }
    ++res.iterations;

    const double old_i = alpha[i], old_j = alpha[j];
    const double yi = y[i], yj = y[j];
    if (yi != yj) {
      double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (yi * K(i, t) * di + yj * K(j, t) * dj);
    }
  }

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / free_count : (ub + lb) / 2.0;
  res.bias = -rho;
  return res;
}

}  // namespace detail

LinearGram::LinearGram(std::span<const std::vector<double>> features) : n_(features.size()) {
  g_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      double acc = 0.0;
      const auto& a = features[i];
      const auto& b = features[j];
      for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
      g_[i * n_ + j] = acc;
      g_[j * n_ + i] = acc;
    }
  }
}

int argmax_first(std::span<const double> scores) noexcept {
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = static_cast<int>(c);
  }
  return best;
}

GramMachines fit_on_gram(const LinearGram& gram, std::span<const std::size_t> train,
                         std::span<const int> labels, int num_classes,
                         const KernelParams& params) {
  params.validate();
  const std::size_t n = train.size();
  std::vector<bool> present(num_classes, false);
  for (std::size_t idx : train) {
    const int label = labels[idx];
    if (label < 0 || label >= num_classes) throw TrainingError("label out of class range");
    present[label] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw TrainingError("training needs samples of at least two classes");
  }
  std::vector<double> kernel(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) kernel[a * n + b] = params(gram(train[a], train[b]));
  }
  GramMachines out{params, {train.begin(), train.end()}, {}, {}};
  std::vector<int> y(n);
  for (int c = 0; c < num_classes; ++c) {
    for (std::size_t a = 0; a < n; ++a) y[a] = labels[train[a]] == c ? 1 : -1;
    const detail::SmoResult sol = detail::solve_smo(kernel, y, params.C);
    std::vector<double> coef(n);
    for (std::size_t a = 0; a < n; ++a) coef[a] = sol.alpha[a] * y[a];
    out.coefficients.push_back(std::move(coef));
    out.bias.push_back(sol.bias);
  }
  return out;
}

std::vector<double> decision_on_gram(const GramMachines& machines, const LinearGram& gram,
                                     std::size_t query) {
  std::vector<double> k(machines.train.size());
  for (std::size_t a = 0; a < k.size(); ++a) k[a] = machines.kernel(gram(machines.train[a], query));
  std::vector<double> scores(machines.coefficients.size());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    double acc = machines.bias[c];
    for (std::size_t a = 0; a < k.size(); ++a) acc += machines.coefficients[c][a] * k[a];
    scores[c] = acc;
  }
  return scores;
}

SvmModel train_svm(std::span<const std::vector<double>> features, std::span<const int> labels,
                   const std::vector<std::string>& classes, const KernelParams& params) {
  if (features.size() != labels.size()) {
    throw FeatureError("feature and label counts differ");
  }
  if (features.empty()) throw TrainingError("no training samples");
  const std::size_t d = features.front().size();
  for (const auto& f : features) {
    if (f.size() != d) throw FeatureError("training features differ in length");
  }
  const LinearGram gram(features);
  std::vector<std::size_t> all(features.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const GramMachines fit =
      fit_on_gram(gram, all, labels, static_cast<int>(classes.size()), params);

  SvmModel model;
  model.classes = classes;
  model.kernel = params;
  model.feature_length = d;
  std::vector<std::size_t> sv_index;
  for (std::size_t a = 0; a < all.size(); ++a) {
    const bool used = std::any_of(fit.coefficients.begin(), fit.coefficients.end(),
                                  [&](const auto& coef) { return coef[a] != 0.0; });
    if (used) {
      sv_index.push_back(a);
      model.support_vectors.push_back(features[a]);
    }
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    BinaryMachine m;
    m.bias = fit.bias[c];
    for (std::size_t a : sv_index) m.coefficients.push_back(fit.coefficients[c][a]);
    model.machines.push_back(std::move(m));
  }
  return model;
}

Prediction predict(const SvmModel& model, std::span<const double> feature) {
  if (feature.size() != model.feature_length) {
    throw FeatureError("feature length " + std::to_string(feature.size()) +
                       " does not match model length " +
                       std::to_string(model.feature_length));
  }
  std::vector<double> k(model.support_vectors.size());
  for (std::size_t s = 0; s < k.size(); ++s) {
    double acc = 0.0;
    const auto& sv = model.support_vectors[s];
    for (std::size_t j = 0; j < feature.size(); ++j) acc += sv[j] * feature[j];
    k[s] = model.kernel(acc);
  }
  Prediction out;
  out.scores.resize(model.machines.size());
  for (std::size_t c = 0; c < model.machines.size(); ++c) {
    double acc = model.machines[c].bias;
    for (std::size_t s = 0; s < k.size(); ++s) acc += model.machines[c].coefficients[s] * k[s];
    out.scores[c] = acc;
  }
  out.class_index = argmax_first(out.scores);
  out.label = model.classes[out.class_index];
  return out;
}

}  // namespace morf
