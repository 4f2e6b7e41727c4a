#include "morf/temporal_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "morf/errors.hpp"

namespace morf {

void TemporalFilterConfig::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw ConfigError("fps must be positive, got " + std::to_string(fps));
  }
  if (!(low_hz >= 0.0) || !(low_hz < high_hz) || !(high_hz <= fps / 2.0)) {
    throw ConfigError("temporal pass-band must satisfy 0 <= low < high <= fps/2, got [" +
                      std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                      "] at " + std::to_string(fps) + " fps");
  }
  if (!(spatial_sigma >= 0.0) || !std::isfinite(spatial_sigma)) {
    throw ConfigError("spatial sigma must be non-negative");
  }
}

IirCoefficients design_butterworth_bandpass(const TemporalFilterConfig& cfg) {
  cfg.validate();
  const double nyquist = cfg.fps / 2.0;
  const bool has_low_edge = cfg.low_hz > 0.0;
  const bool has_high_edge = cfg.high_hz < nyquist;
  const double k = 2.0 * cfg.fps;
  const auto warp = [&](double hz) {
    return k * std::tan(std::numbers::pi * hz / cfg.fps);
  };

  if (!has_low_edge && !has_high_edge) return {{1.0}, {1.0}};
  if (!has_low_edge) {
    const double wc = warp(cfg.high_hz);
    const double norm = k + wc;
    return {{wc / norm, wc / norm}, {1.0, (wc - k) / norm}};
  }
  if (!has_high_edge) {
    const double wc = warp(cfg.low_hz);
    const double norm = k + wc;
    return {{k / norm, -k / norm}, {1.0, (wc - k) / norm}};
  }
  // H(s) = B s / (s^2 + B s + w0^2) with s = k (1 - z^-1) / (1 + z^-1).
  const double wl = warp(cfg.low_hz);
  const double wh = warp(cfg.high_hz);
  const double bw = wh - wl;
  const double w0sq = wl * wh;
  const double a0 = k * k + bw * k + w0sq;
  return {{bw * k / a0, 0.0, -bw * k / a0},
          {1.0, (2.0 * w0sq - 2.0 * k * k) / a0, (k * k - bw * k + w0sq) / a0}};
}

std::vector<double> apply_iir(const IirCoefficients& coeffs, std::span<const double> signal) {
  const std::size_t order = std::max(coeffs.b.size(), coeffs.a.size());
  std::vector<double> b = coeffs.b, a = coeffs.a;
  b.resize(order, 0.0);
  a.resize(order, 0.0);
  std::vector<double> state(order, 0.0);  // transposed direct form II
  std::vector<double> out(signal.size());
  for (std::size_t t = 0; t < signal.size(); ++t) {
    const double x = signal[t];
    const double y = b[0] * x + state[0];
    for (std::size_t j = 1; j < order; ++j) {
      state[j - 1] = b[j] * x - a[j] * y + (j < order - 1 ? state[j] : 0.0);
    }
    out[t] = y;
  }
  return out;
}

GrayFrame weighted_gaussian_blur(const GrayFrame& values, const GrayFrame& weight,
                                 double sigma) {
  if (!values.same_shape(weight)) {
    throw StructureError("blur weight and values differ in shape");
  }
  const std::vector<double> taps = gaussian_kernel(sigma);
  GrayFrame weighted = values;
  auto wv = weighted.values();
  const auto weights = weight.values();
  for (std::size_t p = 0; p < wv.size(); ++p) wv[p] *= weights[p];
  const GrayFrame num = filter_separable(weighted, taps, taps);
  const GrayFrame den = filter_separable(weight, taps, taps);
  GrayFrame out(values.width(), values.height());
  auto ov = out.values();
  const auto nv = num.values();
  const auto dv = den.values();
  for (std::size_t p = 0; p < ov.size(); ++p) {
    ov[p] = dv[p] > 0.0 ? nv[p] / dv[p] : 0.0;
  }
  return out;
}

namespace {

// Per-pixel IIR over time, one frame at a time. Each pixel's recurrence
// runs in time order, so the result does not depend on pixel scheduling.
class FrameIir {
 public:
  FrameIir(const IirCoefficients& coeffs, std::size_t pixels)
      : b_(coeffs.b), a_(coeffs.a) {
    const std::size_t order = std::max(b_.size(), a_.size());
    b_.resize(order, 0.0);
    a_.resize(order, 0.0);
    state_.assign(order > 1 ? order - 1 : 0, std::vector<double>(pixels, 0.0));
  }

  void step(std::span<const double> input, std::span<double> output) {
    const std::size_t order = b_.size();
    for (std::size_t p = 0; p < input.size(); ++p) {
      const double x = input[p];
      const double y = b_[0] * x + (order > 1 ? state_[0][p] : 0.0);
      for (std::size_t j = 1; j < order; ++j) {
        state_[j - 1][p] = b_[j] * x - a_[j] * y + (j < order - 1 ? state_[j][p] : 0.0);
      }
      output[p] = y;
    }
  }

 private:
  std::vector<double> b_;
  std::vector<double> a_;
  std::vector<std::vector<double>> state_;
};

GrayFrame energy(const MonogenicLevel& m) {
  GrayFrame out(m.i.width(), m.i.height());
  auto ov = out.values();
  const auto iv = m.i.values(), r1v = m.r1.values(), r2v = m.r2.values();
  for (std::size_t p = 0; p < ov.size(); ++p) {
    ov[p] = iv[p] * iv[p] + r1v[p] * r1v[p] + r2v[p] * r2v[p];
  }
  return out;
}

}  // namespace

std::vector<QuatPhaseField> filter_phase_sequence(std::span<const MonogenicLevel> levels,
                                                  const TemporalFilterConfig& cfg) {
  cfg.validate();
  if (levels.size() < 2) {
    throw SequenceError("phase filtering needs at least 2 frames, got " +
                        std::to_string(levels.size()));
  }
  const int w = levels.front().i.width();
  const int h = levels.front().i.height();
  const int level = levels.front().level;
  for (const MonogenicLevel& m : levels) {
    if (m.i.width() != w || m.i.height() != h || m.level != level) {
      throw SequenceError("phase filtering needs frames of constant size and level");
    }
  }

  const IirCoefficients coeffs = design_butterworth_bandpass(cfg);
  const std::size_t pixels = static_cast<std::size_t>(w) * h;
  FrameIir filter_c(coeffs, pixels);
  FrameIir filter_s(coeffs, pixels);
  GrayFrame cum_c(w, h), cum_s(w, h);

  std::vector<QuatPhaseField> out;
  out.reserve(levels.size());
  for (std::size_t t = 0; t < levels.size(); ++t) {
    if (t > 0) {
      const QuatPhaseField diff = phase_difference(levels[t - 1], levels[t]);
      cum_c += diff.pc;
      cum_s += diff.ps;
    }
    QuatPhaseField field{GrayFrame(w, h), GrayFrame(w, h), level};
    filter_c.step(cum_c.values(), field.pc.values());
    filter_s.step(cum_s.values(), field.ps.values());
    if (cfg.spatial_sigma > 0.0) {
      const GrayFrame weight = energy(levels[t]);
      field.pc = weighted_gaussian_blur(field.pc, weight, cfg.spatial_sigma);
      field.ps = weighted_gaussian_blur(field.ps, weight, cfg.spatial_sigma);
    }
    out.push_back(std::move(field));
  }
  return out;
}

}  // namespace morf
