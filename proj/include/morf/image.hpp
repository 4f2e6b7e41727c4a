#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace morf {

/// Single-channel, row-major, double-precision image.
///
/// Nominal intensities lie in [0, 1] but nothing enforces it: subbands and
/// phase planes reuse the same container and are signed.
class GrayFrame {
 public:
  GrayFrame() = default;
  GrayFrame(int width, int height, double fill = 0.0);
  GrayFrame(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  /// Pixel lookup with half-sample symmetric reflection outside the frame.
  double reflected(int x, int y) const noexcept;

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const GrayFrame& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool all_finite() const noexcept;

  GrayFrame& operator+=(const GrayFrame& rhs);
  GrayFrame& operator-=(const GrayFrame& rhs);
  GrayFrame& operator*=(double k) noexcept;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

GrayFrame operator+(GrayFrame lhs, const GrayFrame& rhs);
GrayFrame operator-(GrayFrame lhs, const GrayFrame& rhs);
GrayFrame operator*(GrayFrame lhs, double k);
GrayFrame operator*(double k, GrayFrame rhs);

/// Maps an out-of-range index back into [0, n) by half-sample symmetric
/// reflection: -1 -> 0, n -> n-1.
int reflect_index(int i, int n) noexcept;

/// Correlates every row with an odd-length centered kernel.
GrayFrame filter_rows(const GrayFrame& frame, std::span<const double> kernel);
/// Correlates every column with an odd-length centered kernel.
GrayFrame filter_cols(const GrayFrame& frame, std::span<const double> kernel);
GrayFrame filter_separable(const GrayFrame& frame,
                           std::span<const double> kernel_x,
                           std::span<const double> kernel_y);

/// Normalized Gaussian taps truncated at 3 sigma.
std::vector<double> gaussian_kernel(double sigma);

double max_abs_difference(const GrayFrame& a, const GrayFrame& b);

}  // namespace morf
