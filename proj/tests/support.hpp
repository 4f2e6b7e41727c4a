#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "morf/image.hpp"

namespace morf::testing {

inline GrayFrame random_frame(int w, int h, std::mt19937_64& rng, double lo = 0.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  GrayFrame f(w, h);
  for (double& v : f.values()) v = u(rng);
  return f;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("morf_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline double max_abs(const GrayFrame& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace morf::testing
