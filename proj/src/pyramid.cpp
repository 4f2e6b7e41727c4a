#include "morf/pyramid.hpp"

#include <algorithm>
#include <string>

#include "morf/errors.hpp"

namespace morf {

namespace {

int half_ceil(int n) { return (n + 1) / 2; }

// One axis of the upsampler: out[n] = sum_m 2 k[n - 2m] coarse[m], with the
// coarse index reflected into range.
template <typename Get, typename Put>
void upsample_line(int coarse_len, int fine_len, Get get, Put put) {
  for (int n = 0; n < fine_len; ++n) {
    double acc = 0.0;
    // Taps with |n - 2m| <= 2; n >= 0 so the lower bound is floor((n-2)/2).
    const int m_lo = n >= 2 ? (n - 2) / 2 : -1;
    for (int m = m_lo; 2 * m <= n + 2; ++m) {
      const int d = n - 2 * m;
      if (d > 2) continue;
      acc += 2.0 * kBinomialKernel[d + 2] * get(reflect_index(m, coarse_len));
    }
    put(n, acc);
  }
}

}  // namespace

const GrayFrame& ImagePyramid::level(int level) const {
  if (level < 1 || level > num_levels()) {
    throw RangeError("pyramid level " + std::to_string(level) +
                     " outside 1.." + std::to_string(num_levels()));
  }
  return bands[level - 1];
}

GrayFrame downsample(const GrayFrame& frame) {
  const GrayFrame blurred =
      filter_separable(frame, kBinomialKernel, kBinomialKernel);
  GrayFrame out(half_ceil(frame.width()), half_ceil(frame.height()));
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out(x, y) = blurred(2 * x, 2 * y);
    }
  }
  return out;
}

GrayFrame upsample(const GrayFrame& coarse, int width, int height) {
  if (half_ceil(width) != coarse.width() || half_ceil(height) != coarse.height()) {
    throw StructureError("upsample target " + std::to_string(width) + "x" +
                         std::to_string(height) + " incompatible with " +
                         std::to_string(coarse.width()) + "x" +
                         std::to_string(coarse.height()));
  }
  GrayFrame wide(width, coarse.height());
  for (int y = 0; y < coarse.height(); ++y) {
    upsample_line(
        coarse.width(), width, [&](int m) { return coarse(m, y); },
        [&](int n, double v) { wide(n, y) = v; });
  }
  GrayFrame out(width, height);
  for (int x = 0; x < width; ++x) {
    upsample_line(
        coarse.height(), height, [&](int m) { return wide(x, m); },
        [&](int n, double v) { out(x, n) = v; });
  }
  return out;
}

ImagePyramid build_pyramid(const GrayFrame& frame, int num_levels) {
  if (num_levels < 1) {
    throw DimensionError("pyramid needs at least one level");
  }
  const int min_dim = std::min(frame.width(), frame.height());
  if (num_levels >= 31 || min_dim < (1 << num_levels)) {
    throw DimensionError("frame " + std::to_string(frame.width()) + "x" +
                         std::to_string(frame.height()) + " too small for " +
                         std::to_string(num_levels) + " pyramid levels");
  }
  ImagePyramid pyramid;
  pyramid.bands.reserve(num_levels);
  GrayFrame current = frame;
  for (int level = 0; level < num_levels; ++level) {
    GrayFrame coarse = downsample(current);
    current -= upsample(coarse, current.width(), current.height());
    pyramid.bands.push_back(std::move(current));
    current = std::move(coarse);
  }
  pyramid.residual = std::move(current);
  return pyramid;
}

GrayFrame collapse_pyramid(const ImagePyramid& pyramid) {
  if (pyramid.bands.empty()) {
    throw StructureError("cannot collapse a pyramid without bands");
  }
  for (int k = pyramid.num_levels() - 1; k >= 0; --k) {
    const GrayFrame& band = pyramid.bands[k];
    const GrayFrame& below =
        k + 1 < pyramid.num_levels() ? pyramid.bands[k + 1] : pyramid.residual;
    if (half_ceil(band.width()) != below.width() ||
        half_ceil(band.height()) != below.height()) {
      throw StructureError("pyramid level " + std::to_string(k + 1) +
                           " has inconsistent dimensions");
    }
  }
  GrayFrame current = pyramid.residual;
  for (int k = pyramid.num_levels() - 1; k >= 0; --k) {
    const GrayFrame& band = pyramid.bands[k];
    current = upsample(current, band.width(), band.height()) + band;
  }
  return current;
}

}  // namespace morf
