#include <doctest.h>

#include <cmath>
#include <random>

#include "morf/errors.hpp"
#include "morf/evaluation.hpp"

using namespace morf;

namespace {

// Three Gaussian clusters, `subjects` subjects with `per` samples per class.
LabeledSamples clusters(int subjects, int per, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  LabeledSamples s;
  s.classes = {"a", "b", "c"};
  const double centers[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int subj = 0; subj < subjects; ++subj) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < per; ++k) {
        s.ids.push_back("s" + std::to_string(subj) + "_" + std::to_string(c) + "_" +
                        std::to_string(k));
        s.subjects.push_back("s" + std::to_string(subj));
        s.labels.push_back(c);
        s.features.push_back({centers[c][0] + n(rng), centers[c][1] + n(rng),
                              centers[c][2] + n(rng)});
      }
    }
  }
  return s;
}

}  // namespace

TEST_CASE("metrics from predictions") {
  const std::vector<std::string> classes{"a", "b", "c"};
  SUBCASE("perfect") {
    const std::vector<int> t{0, 1, 2, 2};
    const Metrics m = score_predictions(classes, t, t);
    CHECK(m.accuracy == 1.0);
    CHECK(m.f_measure == 1.0);
  }
  SUBCASE("by hand") {
    const std::vector<int> truth{0, 0, 1, 1, 2, 2};
    const std::vector<int> pred{0, 1, 1, 1, 0, 2};
    const Metrics m = score_predictions(classes, truth, pred);
    CHECK(m.confusion[0] == std::vector<long>{1, 1, 0});
    CHECK(m.confusion[2] == std::vector<long>{1, 0, 1});
    CHECK(m.accuracy == doctest::Approx(4.0 / 6));
    // F1: a = 0.5, b = 0.8, c = 2/3.
    CHECK(m.f_measure == doctest::Approx((0.5 + 0.8 + 2.0 / 3) / 3));
  }
  SUBCASE("a class never predicted nor present scores 0") {
    const std::vector<int> truth{0, 1};
    const Metrics m = score_predictions(classes, truth, truth);
    CHECK(m.f_measure == doctest::Approx(2.0 / 3));
  }
  SUBCASE("chance level") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> u(0, 2);
    std::vector<int> truth, pred;
    for (int k = 0; k < 3000; ++k) {
      truth.push_back(u(rng));
      pred.push_back(u(rng));
    }
    const Metrics m = score_predictions(classes, truth, pred);
    const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / 3000);
    CHECK(std::abs(m.accuracy - 1.0 / 3) <= 3 * sigma);
    CHECK(m.f_measure >= 0.0);
    CHECK(m.f_measure <= 1.0);
  }
}

TEST_CASE("grid specs") {
  const GridSpec g = parse_grid_spec("C=0.1,1,10;gamma=1/d,0.5;c0=0,1");
  CHECK(g.C == std::vector<double>{0.1, 1, 10});
  REQUIRE(g.gamma.size() == 2);
  CHECK(g.gamma[0].per_dimension);
  CHECK(g.gamma[1].value == 0.5);
  CHECK(format_grid_spec(g) == "C=0.1,1,10;gamma=1/d,0.5;c0=0,1");
  CHECK(format_grid_spec(parse_grid_spec("C=5")) == "C=5;gamma=1/d,10/d;c0=0,1");

  const std::vector<KernelParams> pts = default_grid().expand(384);
  REQUIRE(pts.size() == 16);
  CHECK(pts.front().C == 0.1);
  CHECK(pts.front().gamma == doctest::Approx(1.0 / 384));
  CHECK(pts.front().c0 == 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const auto& a = pts[k - 1];
    const auto& b = pts[k];
    CHECK(std::tie(a.C, a.gamma, a.c0) < std::tie(b.C, b.gamma, b.c0));
  }
  for (const char* bad : {"C=abc", "foo=1", "C=", "C=-1", "gamma=0", "gamma=x/d", "C 1",
                          "C=1;C=2", "C=1,,2"}) {
    CHECK_THROWS_AS(parse_grid_spec(bad), ConfigError);
  }
}

TEST_CASE("grid search") {
  const LabeledSamples s = clusters(4, 3, 0.1, 3);
  SUBCASE("single point") {
    const std::vector<KernelParams> grid{{0.3, 1.0, 2.0}};
    const GridSearchResult r = grid_search(s.features, s.labels, s.subjects, 3, grid);
    CHECK(r.best.gamma == 0.3);
    CHECK(r.best.C == 2.0);
  }
  SUBCASE("separable data picks the first perfect point") {
    const std::vector<KernelParams> grid{{1.0, 1.0, 1.0}, {1.0, 1.0, 10.0}};
    const GridSearchResult r = grid_search(s.features, s.labels, s.subjects, 3, grid);
    CHECK(r.best_accuracy == 1.0);
    CHECK(r.accuracies == std::vector<double>{1.0, 1.0});
    CHECK(r.best.C == 1.0);
    CHECK_FALSE(r.used_fallback);
  }
  SUBCASE("one subject falls back to stratified folds") {
    const std::vector<std::string> one(s.subjects.size(), "only");
    const std::vector<KernelParams> grid{{1.0, 1.0, 1.0}, {1.0, 1.0, 10.0}};
    const GridSearchResult r = grid_search(s.features, s.labels, one, 3, grid);
    CHECK(r.used_fallback);
    CHECK(r.best_accuracy == 1.0);
  }
  SUBCASE("empty grid") {
    CHECK_THROWS_AS(grid_search(s.features, s.labels, s.subjects, 3, {}), ConfigError);
  }
}

TEST_CASE("fold training never sees the held-out subject") {
  const LabeledSamples s = clusters(5, 2, 0.4, 11);
  const std::vector<IndexFold> folds = loso_folds(s.subjects);
  const std::vector<KernelParams> grid = default_grid().expand(3);
  for (const IndexFold& fold : folds) {
    LabeledSamples canary = s;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0.0, 50.0);
    for (std::size_t i : fold.test) {
      for (double& v : canary.features[i]) v += n(rng);
      canary.labels[i] = (canary.labels[i] + 1) % 3;
    }
    const FoldRecord a = run_fold(s, fold, grid);
    const FoldRecord b = run_fold(canary, fold, grid);
    CHECK(a.params.C == b.params.C);
    CHECK(a.params.gamma == b.params.gamma);
    CHECK(a.params.c0 == b.params.c0);
    CHECK(a.inner_accuracy == b.inner_accuracy);
  }
}

TEST_CASE("loso evaluation is schedule independent") {
  const LabeledSamples s = clusters(4, 2, 0.3, 5);
  const Metrics serial = evaluate_samples(s, default_grid(), 1);
  const Metrics threaded = evaluate_samples(s, default_grid(), 4);
  CHECK(metrics_to_json(serial, s).dump() == metrics_to_json(threaded, s).dump());
  CHECK(predictions_csv(serial, s) == predictions_csv(threaded, s));
  CHECK(serial.folds.size() == 4);
  long total = 0;
  for (const auto& row : serial.confusion) {
    for (long v : row) total += v;
  }
  CHECK(total == static_cast<long>(s.labels.size()));
  CHECK(serial.accuracy >= 0.9);

  const std::string csv = predictions_csv(serial, s);
  CHECK(csv.rfind("id,subject,label,predicted,score_a,score_b,score_c\n", 0) == 0);
}
