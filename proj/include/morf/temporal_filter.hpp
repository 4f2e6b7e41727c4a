#pragma once

#include <span>
#include <vector>

#include "morf/riesz.hpp"

namespace morf {

/// Temporal pass-band for the accumulated phase plus the width of the
/// amplitude-weighted spatial blur applied afterwards.
///
/// low_hz == 0 drops the high-pass edge and high_hz == fps / 2 drops the
/// low-pass edge; with both, the filter is the identity.
struct TemporalFilterConfig {
  double low_hz = 0.5;
  double high_hz = 10.0;
  double fps = 100.0;
  double spatial_sigma = 2.0;

  /// Throws ConfigError unless 0 <= low < high <= fps / 2 and sigma >= 0.
  void validate() const;
};

/// Direct-form IIR coefficients with a[0] == 1.
struct IirCoefficients {
  std::vector<double> b;
  std::vector<double> a;
};

/// First-order Butterworth prototype mapped to band-pass (second order) by
/// the prewarped bilinear transform.
IirCoefficients design_butterworth_bandpass(const TemporalFilterConfig& cfg);

/// Runs the filter over a 1-D signal from zero initial state.
std::vector<double> apply_iir(const IirCoefficients& coeffs, std::span<const double> signal);

/// out = blur(weight * values) / blur(weight), zero where blur(weight) == 0.
GrayFrame weighted_gaussian_blur(const GrayFrame& values, const GrayFrame& weight,
                                 double sigma);

/// Accumulates frame-to-frame phase differences from the first frame,
/// band-passes every pixel over time and applies the A^2-weighted blur.
/// The first returned field is all zero.
std::vector<QuatPhaseField> filter_phase_sequence(std::span<const MonogenicLevel> levels,
                                                  const TemporalFilterConfig& cfg);

}  // namespace morf
