#pragma once

#include <array>
#include <vector>

#include "morf/image.hpp"

namespace morf {

/// Laplacian decomposition. bands[0] is level 1, the full-resolution
/// highest-frequency subband; band k has ceil(dim / 2^k) pixels per axis
/// (0-based k). The residual is the lowpass remainder after the last band.
struct ImagePyramid {
  std::vector<GrayFrame> bands;
  GrayFrame residual;

  int num_levels() const noexcept { return static_cast<int>(bands.size()); }
  /// 1-based level lookup.
  const GrayFrame& level(int level) const;
};

inline constexpr std::array<double, 5> kBinomialKernel{
    1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

/// Binomial blur followed by keeping even-indexed rows and columns.
GrayFrame downsample(const GrayFrame& frame);

/// Zero insertion followed by the doubled binomial kernel, producing a
/// width x height frame. The coarse grid is reflected before insertion so
/// constant inputs stay constant up to the border.
GrayFrame upsample(const GrayFrame& coarse, int width, int height);

/// Throws DimensionError unless min(width, height) >= 2^num_levels.
ImagePyramid build_pyramid(const GrayFrame& frame, int num_levels);

/// Throws StructureError when level sizes are not the halving chain that
/// build_pyramid produces.
GrayFrame collapse_pyramid(const ImagePyramid& pyramid);

}  // namespace morf
