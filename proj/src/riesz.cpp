#include "morf/riesz.hpp"

#include <cmath>
#include <string>

#include "morf/errors.hpp"
#include "morf/quaternion.hpp"

namespace morf {

MonogenicLevel riesz_transform(const GrayFrame& band, int level) {
  if (band.width() < 3 || band.height() < 3) {
    throw DimensionError("riesz transform needs a band of at least 3x3, got " +
                         std::to_string(band.width()) + "x" +
                         std::to_string(band.height()));
  }
  MonogenicLevel out{band, GrayFrame(band.width(), band.height()),
                     GrayFrame(band.width(), band.height()), level};
  for (int y = 0; y < band.height(); ++y) {
    for (int x = 0; x < band.width(); ++x) {
      out.r1(x, y) = 0.5 * band.reflected(x + 1, y) - 0.5 * band.reflected(x - 1, y);
      out.r2(x, y) = 0.5 * band.reflected(x, y + 1) - 0.5 * band.reflected(x, y - 1);
    }
  }
  return out;
}

double local_amplitude(double i, double r1, double r2) noexcept {
  return std::sqrt(i * i + r1 * r1 + r2 * r2);
}

QuatPhase quaternionic_phase(double i, double r1, double r2) noexcept {
  const double riesz = std::hypot(r1, r2);
  if (local_amplitude(i, r1, r2) <= kDegenerateEpsilon || riesz <= kDegenerateEpsilon) {
    return {};
  }
  const double phi = std::atan2(riesz, i);
  return {phi * r1 / riesz, phi * r2 / riesz};
}

std::pair<AmplitudeField, QuatPhaseField> extract_quat_phase(const MonogenicLevel& m) {
  if (!m.i.same_shape(m.r1) || !m.i.same_shape(m.r2)) {
    throw StructureError("monogenic components differ in shape");
  }
  const int w = m.i.width();
  const int h = m.i.height();
  AmplitudeField amplitude{GrayFrame(w, h), m.level};
  QuatPhaseField phase{GrayFrame(w, h), GrayFrame(w, h), m.level};
  const auto iv = m.i.values();
  const auto r1v = m.r1.values();
  const auto r2v = m.r2.values();
  auto av = amplitude.a.values();
  auto pcv = phase.pc.values();
  auto psv = phase.ps.values();
  for (std::size_t p = 0; p < iv.size(); ++p) {
    av[p] = local_amplitude(iv[p], r1v[p], r2v[p]);
    const QuatPhase q = quaternionic_phase(iv[p], r1v[p], r2v[p]);
    pcv[p] = q.pc;
    psv[p] = q.ps;
  }
  return {std::move(amplitude), std::move(phase)};
}

QuatPhase phase_difference(double prev_i, double prev_r1, double prev_r2,
                           double curr_i, double curr_r1, double curr_r2) noexcept {
  const Quaternion prev = riesz_quaternion(prev_i, prev_r1, prev_r2);
  const Quaternion curr = riesz_quaternion(curr_i, curr_r1, curr_r2);
  const double scale = prev.norm() * curr.norm();
  if (scale <= kDegenerateEpsilon) return {};
  const Quaternion rel = (curr * prev.conj()) * (1.0 / scale);
  return quaternionic_phase(rel.w, rel.x, rel.y);
}

QuatPhaseField phase_difference(const MonogenicLevel& prev, const MonogenicLevel& curr) {
  if (!prev.i.same_shape(curr.i) || !prev.i.same_shape(prev.r1) ||
      !prev.i.same_shape(prev.r2) || !curr.i.same_shape(curr.r1) ||
      !curr.i.same_shape(curr.r2)) {
    throw StructureError("phase difference between differently shaped levels");
  }
  if (prev.level != curr.level) {
    throw StructureError("phase difference between pyramid levels " +
                         std::to_string(prev.level) + " and " +
                         std::to_string(curr.level));
  }
  const int w = curr.i.width();
  const int h = curr.i.height();
  QuatPhaseField out{GrayFrame(w, h), GrayFrame(w, h), curr.level};
  const auto pi = prev.i.values(), pr1 = prev.r1.values(), pr2 = prev.r2.values();
  const auto ci = curr.i.values(), cr1 = curr.r1.values(), cr2 = curr.r2.values();
  auto pcv = out.pc.values();
  auto psv = out.ps.values();
  for (std::size_t p = 0; p < ci.size(); ++p) {
    const QuatPhase d = phase_difference(pi[p], pr1[p], pr2[p], ci[p], cr1[p], cr2[p]);
    pcv[p] = d.pc;
    psv[p] = d.ps;
  }
  return out;
}

QuatPhaseField amplify_phase(const QuatPhaseField& phase, double alpha, AmplifyMode mode) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("amplification factor must be positive, got " +
                      std::to_string(alpha));
  }
  if (!phase.pc.same_shape(phase.ps)) {
    throw StructureError("phase channels differ in shape");
  }
  QuatPhaseField out{GrayFrame(phase.pc.width(), phase.pc.height()),
                     GrayFrame(phase.pc.width(), phase.pc.height()), phase.level};
  const auto pcv = phase.pc.values();
  const auto psv = phase.ps.values();
  auto opc = out.pc.values();
  auto ops = out.ps.values();
  for (std::size_t p = 0; p < pcv.size(); ++p) {
    const double phi = std::hypot(pcv[p], psv[p]);
    if (phi == 0.0) continue;
    const double s = std::sin(alpha * phi);
    double gain = 0.0;
    switch (mode) {
      case AmplifyMode::sine:
        gain = s / phi;
        break;
      case AmplifyMode::logarithm: {
        const double angle = std::atan2(std::abs(s), std::cos(alpha * phi));
        gain = (s < 0.0 ? -angle : angle) / phi;
        break;
      }
    }
    opc[p] = gain * pcv[p];
    ops[p] = gain * psv[p];
  }
  return out;
}

}  // namespace morf
