#pragma once

#include <utility>

#include "morf/image.hpp"

namespace morf {

/// Subband I with its approximate Riesz pair (R1 horizontal, R2 vertical).
struct MonogenicLevel {
  GrayFrame i;
  GrayFrame r1;
  GrayFrame r2;
  int level = 0;
};

/// Sign-unambiguous quaternionic phase: pc = phi cos(theta), ps = phi sin(theta).
struct QuatPhaseField {
  GrayFrame pc;
  GrayFrame ps;
  int level = 0;
};

struct AmplitudeField {
  GrayFrame a;
  int level = 0;
};

struct QuatPhase {
  double pc = 0.0;
  double ps = 0.0;
};

/// Pixels whose amplitude or Riesz magnitude fall at or below this get zero phase.
inline constexpr double kDegenerateEpsilon = 1e-10;

/// Three-tap centered differences [0.5, 0, -0.5] along x (r1) and y (r2).
/// Throws DimensionError for bands smaller than 3x3.
MonogenicLevel riesz_transform(const GrayFrame& band, int level);

/// Local amplitude sqrt(i^2 + r1^2 + r2^2) of one coefficient triple.
double local_amplitude(double i, double r1, double r2) noexcept;

/// Vector part of log(q / |q|) for q = i + i r1 + j r2.
QuatPhase quaternionic_phase(double i, double r1, double r2) noexcept;

std::pair<AmplitudeField, QuatPhaseField> extract_quat_phase(const MonogenicLevel& m);

/// Quaternionic phase of q_curr * conj(q_prev), normalized. The k component
/// of the product is discarded before taking the logarithm.
QuatPhase phase_difference(double prev_i, double prev_r1, double prev_r2,
                           double curr_i, double curr_r1, double curr_r2) noexcept;

QuatPhaseField phase_difference(const MonogenicLevel& prev, const MonogenicLevel& curr);

enum class AmplifyMode {
  /// (sin(alpha phi) cos theta, sin(alpha phi) sin theta).
  sine,
  /// Logarithm of the exponentiated phase, i.e. alpha phi wrapped into [0, pi].
  logarithm,
};

QuatPhaseField amplify_phase(const QuatPhaseField& phase, double alpha,
                             AmplifyMode mode = AmplifyMode::sine);

}  // namespace morf
