#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "morf/dataset.hpp"
#include "morf/image.hpp"
#include "morf/riesz.hpp"

namespace morf {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// A soft-edged disc (1 inside, 0 outside) following `path`, one position
/// per frame, in pixel coordinates.
struct SyntheticSpec {
  int width = 64;
  int height = 64;
  double radius = 16.0;
  std::vector<Point2> path;
  double edge_softness = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws SpecError for an empty path, bad sizes, or when the circle's
  /// radius plus its largest offset from the image center reaches half the
  /// smaller dimension.
  void validate() const;
  Point2 image_center() const noexcept { return {(width - 1) / 2.0, (height - 1) / 2.0}; }
};

std::vector<GrayFrame> render_circle_sequence(const SyntheticSpec& spec);

/// Riesz pair by DFT with the multiplier i w_l / |w| (zero at DC). The
/// input is treated as periodic. The result's i is the input frame.
MonogenicLevel spectral_riesz_oracle(const GrayFrame& frame, int level = 0);

struct MotionClass {
  std::string name;
  double angle_deg = 0.0;  ///< 0 = +x (right), 90 = up (toward row 0)
};

std::vector<MotionClass> default_motion_classes();

struct MotionDatasetSpec {
  std::vector<MotionClass> classes = default_motion_classes();
  int subjects = 10;
  int reps = 3;
  double noise_sigma = 0.01;
  std::uint64_t seed = 7;
  int width = 80;
  int height = 80;
  int frames = 16;
  double fps = 100.0;

  void validate() const;
};

/// Writes `subject/sequence/frame_NNN.pgm` (16-bit) under out_dir plus
/// out_dir/manifest.json, and returns the manifest. Each subject draws a
/// radius, center offset and speed; each repetition jitters them further.
/// The class fixes the direction. Onset is frame 0, apex the last frame.
DatasetManifest make_motion_dataset(const MotionDatasetSpec& spec,
                                    const std::filesystem::path& out_dir);

}  // namespace morf
