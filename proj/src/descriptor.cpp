#include "morf/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "morf/errors.hpp"
#include "morf/pyramid.hpp"

namespace morf {

void MorfParams::validate() const {
  if (gx < 1 || gy < 1 || o < 1) {
    throw ConfigError("grid and orientation counts must be >= 1");
  }
  if (levels.empty()) throw ConfigError("at least one pyramid level is required");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 1) throw ConfigError("pyramid levels start at 1");
    if (k > 0 && levels[k] <= levels[k - 1]) {
      throw ConfigError("pyramid levels must be strictly ascending");
    }
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("amplification factor must be positive");
  }
}

std::size_t MorfParams::level_length() const noexcept {
  return static_cast<std::size_t>(gx) * gy * o;
}

std::size_t MorfParams::length() const noexcept { return level_length() * levels.size(); }

MorPair mean_oriented_riesz(std::span<const QuatPhaseField> phase_seq, int onset, int apex) {
  const int n = static_cast<int>(phase_seq.size());
  if (onset < 0 || apex < onset || apex >= n) {
    throw AnnotationError("window [" + std::to_string(onset) + ", " + std::to_string(apex) +
                          "] invalid for a sequence of " + std::to_string(n) + " frames");
  }
  const QuatPhaseField& first = phase_seq[onset];
  MorPair pair{GrayFrame(first.pc.width(), first.pc.height()),
               GrayFrame(first.pc.width(), first.pc.height()), first.level,
               apex - onset + 1};
  for (int t = onset; t <= apex; ++t) {
    pair.mean_pc += phase_seq[t].pc;
    pair.mean_ps += phase_seq[t].ps;
  }
  const double inv = 1.0 / pair.n_frames;
  pair.mean_pc *= inv;
  pair.mean_ps *= inv;
  return pair;
}

OrientedPhase magnitude_orientation(const MorPair& pair) {
  if (!pair.mean_pc.same_shape(pair.mean_ps)) {
    throw StructureError("MOR pair channels differ in shape");
  }
  const int w = pair.mean_pc.width();
  const int h = pair.mean_pc.height();
  OrientedPhase out{GrayFrame(w, h), GrayFrame(w, h)};
  const auto pc = pair.mean_pc.values();
  const auto ps = pair.mean_ps.values();
  auto mag = out.magnitude.values();
  auto ori = out.orientation.values();
  for (std::size_t p = 0; p < pc.size(); ++p) {
    mag[p] = std::hypot(pc[p], ps[p]);
    // +0.0 folds a negative zero sine so (-x, -0) reports pi, not -pi.
    ori[p] = mag[p] == 0.0 ? 0.0 : std::atan2(ps[p] + 0.0, pc[p]);
  }
  return out;
}

int orientation_bin(double theta, int o) noexcept {
  const int bin = static_cast<int>(std::floor((theta + std::numbers::pi) * o /
                                              (2.0 * std::numbers::pi)));
  if (bin >= o) return 0;
  return std::max(bin, 0);
}

std::vector<double> grid_histogram(const GrayFrame& magnitude, const GrayFrame& orientation,
                                   int gx, int gy, int o, const GrayFrame* mask) {
  if (!magnitude.same_shape(orientation)) {
    throw StructureError("magnitude and orientation differ in shape");
  }
  if (mask != nullptr && !mask->same_shape(magnitude)) {
    throw StructureError("vote mask differs in shape from the phase field");
  }
  if (gx < 1 || gy < 1 || o < 1) throw ConfigError("grid and bin counts must be >= 1");
  const int w = magnitude.width();
  const int h = magnitude.height();
  if (gx > w || gy > h) {
    throw DimensionError("grid " + std::to_string(gx) + "x" + std::to_string(gy) +
                         " larger than field " + std::to_string(w) + "x" +
                         std::to_string(h));
  }
  std::vector<double> hist(static_cast<std::size_t>(gx) * gy * o, 0.0);
  // Cell (r, c) spans rows floor(r H / gy) .. floor((r + 1) H / gy) - 1.
  std::vector<int> row_cell(h), col_cell(w);
  for (int r = 0; r < gy; ++r) {
    const int y0 = r * h / gy, y1 = (r + 1) * h / gy;
    for (int y = y0; y < y1; ++y) row_cell[y] = r;
  }
  for (int c = 0; c < gx; ++c) {
    const int x0 = c * w / gx, x1 = (c + 1) * w / gx;
    for (int x = x0; x < x1; ++x) col_cell[x] = c;
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask != nullptr && (*mask)(x, y) <= 0.5) continue;
      const double vote = magnitude(x, y);
      if (vote == 0.0) continue;
      const std::size_t cell = static_cast<std::size_t>(row_cell[y]) * gx + col_cell[x];
      hist[cell * o + orientation_bin(orientation(x, y), o)] += vote;
    }
  }
  return hist;
}

GrayFrame mask_for_level(const GrayFrame& mask, int level, int width, int height) {
  const int stride = 1 << (level - 1);
  GrayFrame out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out(x, y) = mask(std::min(x * stride, mask.width() - 1),
                       std::min(y * stride, mask.height() - 1));
    }
  }
  return out;
}

std::vector<MorPair> compute_mor_pairs(std::span<const GrayFrame> sequence, FrameWindow window,
                                       const MorfParams& params,
                                       const TemporalFilterConfig& filter_cfg) {
  params.validate();
  filter_cfg.validate();
  const int n = static_cast<int>(sequence.size());
  if (n < 2) throw SequenceError("descriptor extraction needs at least 2 frames");
  if (window.onset < 0 || window.apex <= window.onset || window.apex >= n) {
    throw AnnotationError("onset/apex [" + std::to_string(window.onset) + ", " +
                          std::to_string(window.apex) + "] invalid for " +
                          std::to_string(n) + " frames (need onset < apex < length)");
  }
  const int max_level = params.levels.back();

  std::vector<ImagePyramid> pyramids;
  pyramids.reserve(window.apex - window.onset + 1);
  for (int t = window.onset; t <= window.apex; ++t) {
    if (!sequence[t].same_shape(sequence[window.onset])) {
      throw StructureError("frames of one sequence differ in size");
    }
    pyramids.push_back(build_pyramid(sequence[t], max_level));
  }

  std::vector<MorPair> pairs;
  pairs.reserve(params.levels.size());
  for (int level : params.levels) {
    std::vector<MonogenicLevel> monogenic;
    monogenic.reserve(pyramids.size());
    for (const ImagePyramid& pyr : pyramids) {
      monogenic.push_back(riesz_transform(pyr.level(level), level));
    }
    std::vector<QuatPhaseField> phase = filter_phase_sequence(monogenic, filter_cfg);
    if (params.alpha != 1.0) {
      for (QuatPhaseField& field : phase) {
        field = amplify_phase(field, params.alpha, params.amplify_mode);
      }
    }
    pairs.push_back(mean_oriented_riesz(phase, 0, static_cast<int>(phase.size()) - 1));
  }
  return pairs;
}

MorfDescriptor assemble_descriptor(std::span<const MorPair> pairs, const MorfParams& params,
                                   const GrayFrame* mask) {
  params.validate();
  if (pairs.size() != params.levels.size()) {
    throw StructureError("one MOR pair per descriptor level is required");
  }
  MorfDescriptor desc;
  desc.params = params;
  desc.values.reserve(params.length());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const MorPair& pair = pairs[k];
    const OrientedPhase field = magnitude_orientation(pair);
    GrayFrame level_mask;
    if (mask != nullptr) {
      level_mask = mask_for_level(*mask, params.levels[k], field.magnitude.width(),
                                  field.magnitude.height());
    }
    std::vector<double> hist =
        grid_histogram(field.magnitude, field.orientation, params.gx, params.gy, params.o,
                       mask != nullptr ? &level_mask : nullptr);
    if (params.normalize) {
      double norm = 0.0;
      for (double v : hist) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (double& v : hist) v /= norm;
      }
    }
    desc.segment_offsets.push_back(desc.values.size());
    desc.values.insert(desc.values.end(), hist.begin(), hist.end());
  }
  return desc;
}

MorfDescriptor extract_morf(std::span<const GrayFrame> sequence, FrameWindow window,
                            const MorfParams& params, const TemporalFilterConfig& filter_cfg,
                            const GrayFrame* mask) {
  if (mask != nullptr && !sequence.empty() && !mask->same_shape(sequence.front())) {
    throw StructureError("face mask differs in shape from the frames");
  }
  const std::vector<MorPair> pairs = compute_mor_pairs(sequence, window, params, filter_cfg);
  return assemble_descriptor(pairs, params, mask);
}

}  // namespace morf
