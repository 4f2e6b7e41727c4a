#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "morf/image.hpp"
#include "morf/riesz.hpp"
#include "morf/temporal_filter.hpp"

namespace morf {

/// Temporal mean of the filtered quaternionic phase over onset..apex.
struct MorPair {
  GrayFrame mean_pc;
  GrayFrame mean_ps;
  int level = 0;
  int n_frames = 0;
};

struct MorfParams {
  int gx = 8;
  int gy = 8;
  int o = 6;
  std::vector<int> levels{2};
  double alpha = 1.0;
  bool normalize = false;
  AmplifyMode amplify_mode = AmplifyMode::sine;

  void validate() const;
  /// gx * gy * o * |levels|.
  std::size_t length() const noexcept;
  std::size_t level_length() const noexcept;
};

struct MorfDescriptor {
  std::vector<double> values;
  MorfParams params;
  /// Start offset of each level's segment; segment_offsets.size() == levels.size().
  std::vector<std::size_t> segment_offsets;
};

/// Inclusive frame window [onset, apex].
struct FrameWindow {
  int onset = 0;
  int apex = 0;
};

MorPair mean_oriented_riesz(std::span<const QuatPhaseField> phase_seq, int onset, int apex);

struct OrientedPhase {
  GrayFrame magnitude;    ///< sqrt(pc^2 + ps^2)
  GrayFrame orientation;  ///< atan2(ps, pc) in (-pi, pi], 0 where magnitude is 0
};

OrientedPhase magnitude_orientation(const MorPair& pair);

/// Orientation bin of angle theta; bin 0 starts at -pi and theta == pi
/// wraps back to bin 0.
int orientation_bin(double theta, int o) noexcept;

/// Phase-weighted orientation histograms on a gy x gx grid of cells,
/// cell-major (row, then column), bin-minor. Pixels where mask <= 0.5 do
/// not vote.
std::vector<double> grid_histogram(const GrayFrame& magnitude, const GrayFrame& orientation,
                                   int gx, int gy, int o,
                                   const GrayFrame* mask = nullptr);

/// Nearest-sample reduction of a full-resolution mask to a pyramid level.
GrayFrame mask_for_level(const GrayFrame& mask, int level, int width, int height);

/// Full pipeline for one sequence: per level, Riesz pyramid, filtered phase,
/// optional amplification, MOR pair and grid histograms; levels are
/// concatenated in ascending order. Frames outside the window are ignored
/// and phase accumulates from the onset frame.
MorfDescriptor extract_morf(std::span<const GrayFrame> sequence, FrameWindow window,
                            const MorfParams& params, const TemporalFilterConfig& filter_cfg,
                            const GrayFrame* mask = nullptr);

/// Intermediate MOR pairs of extract_morf, one per requested level.
std::vector<MorPair> compute_mor_pairs(std::span<const GrayFrame> sequence, FrameWindow window,
                                       const MorfParams& params,
                                       const TemporalFilterConfig& filter_cfg);

/// Histogram assembly from precomputed MOR pairs (one per params.levels entry).
MorfDescriptor assemble_descriptor(std::span<const MorPair> pairs, const MorfParams& params,
                                   const GrayFrame* mask = nullptr);

}  // namespace morf
