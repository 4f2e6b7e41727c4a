#include "morf/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "morf/errors.hpp"

namespace morf {

GrayFrame::GrayFrame(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw DimensionError("negative frame dimensions");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayFrame::GrayFrame(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) {
    throw DimensionError("negative frame dimensions");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw StructureError("frame data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
}

double GrayFrame::reflected(int x, int y) const noexcept {
  return (*this)(reflect_index(x, width_), reflect_index(y, height_));
}

bool GrayFrame::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

GrayFrame& GrayFrame::operator+=(const GrayFrame& rhs) {
  if (!same_shape(rhs)) throw StructureError("frame shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

GrayFrame& GrayFrame::operator-=(const GrayFrame& rhs) {
  if (!same_shape(rhs)) throw StructureError("frame shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

GrayFrame& GrayFrame::operator*=(double k) noexcept {
  for (double& v : data_) v *= k;
  return *this;
}

GrayFrame operator+(GrayFrame lhs, const GrayFrame& rhs) { return lhs += rhs; }
GrayFrame operator-(GrayFrame lhs, const GrayFrame& rhs) { return lhs -= rhs; }
GrayFrame operator*(GrayFrame lhs, double k) { return lhs *= k; }
GrayFrame operator*(double k, GrayFrame rhs) { return rhs *= k; }

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

namespace {

void check_kernel(std::span<const double> kernel) {
  if (kernel.empty() || kernel.size() % 2 == 0) {
    throw ConfigError("filter kernel must have odd, non-zero length");
  }
}

}  // namespace

GrayFrame filter_rows(const GrayFrame& frame, std::span<const double> kernel) {
  check_kernel(kernel);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = frame.width();
  GrayFrame out(w, frame.height());
  std::vector<int> taps(kernel.size());
  for (int x = 0; x < w; ++x) {
    for (int j = 0; j < static_cast<int>(kernel.size()); ++j) {
      taps[j] = reflect_index(x + j - radius, w);
    }
    for (int y = 0; y < frame.height(); ++y) {
      double acc = 0.0;
      for (std::size_t j = 0; j < kernel.size(); ++j) {
        acc += kernel[j] * frame(taps[j], y);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

GrayFrame filter_cols(const GrayFrame& frame, std::span<const double> kernel) {
  check_kernel(kernel);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int h = frame.height();
  GrayFrame out(frame.width(), h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      double acc = 0.0;
      for (int j = 0; j < static_cast<int>(kernel.size()); ++j) {
        acc += kernel[j] * frame(x, reflect_index(y + j - radius, h));
      }
      out(x, y) = acc;
    }
  }
  return out;
}

GrayFrame filter_separable(const GrayFrame& frame,
                           std::span<const double> kernel_x,
                           std::span<const double> kernel_y) {
  return filter_cols(filter_rows(frame, kernel_x), kernel_y);
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    taps[i + radius] = v;
    sum += v;
  }
  for (double& t : taps) t /= sum;
  return taps;
}

double max_abs_difference(const GrayFrame& a, const GrayFrame& b) {
  if (!a.same_shape(b)) throw StructureError("frame shape mismatch");
  double worst = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    worst = std::max(worst, std::abs(av[i] - bv[i]));
  }
  return worst;
}

}  // namespace morf
