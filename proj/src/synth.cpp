#include "morf/synth.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <set>

#include "morf/errors.hpp"
#include "morf/image_io.hpp"

namespace morf {

void SyntheticSpec::validate() const {
  if (width < 1 || height < 1) throw SpecError("synthetic frame must be at least 1x1");
  if (path.empty()) throw SpecError("synthetic path needs at least one position");
  if (!(radius > 0.0)) throw SpecError("circle radius must be > 0");
  if (!(edge_softness >= 0.0)) throw SpecError("edge softness must be >= 0");
  if (!(noise_sigma >= 0.0)) throw SpecError("noise sigma must be >= 0");
  const Point2 c = image_center();
  double max_disp = 0.0;
  for (const Point2& p : path) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw SpecError("non-finite path position");
    max_disp = std::max(max_disp, std::hypot(p.x - c.x, p.y - c.y));
  }
  if (radius + max_disp >= std::min(width, height) / 2.0) {
    throw SpecError("circle of radius " + std::to_string(radius) + " displaced by " +
                    std::to_string(max_disp) + " leaves the " + std::to_string(width) + "x" +
                    std::to_string(height) + " frame");
  }
}

namespace {

double disc_value(double dist, double radius, double softness) {
  if (softness <= 0.0) return dist <= radius ? 1.0 : 0.0;
  const double t = std::clamp((radius + softness / 2.0 - dist) / softness, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

std::vector<GrayFrame> render_circle_sequence(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  std::vector<GrayFrame> frames;
  frames.reserve(spec.path.size());
  for (const Point2& p : spec.path) {
    GrayFrame f(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        f(x, y) = disc_value(std::hypot(x - p.x, y - p.y), spec.radius, spec.edge_softness);
        if (spec.noise_sigma > 0.0) f(x, y) += noise(rng);
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

namespace {

// FFTW's planner is not thread safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Dft2 {
 public:
  Dft2(int w, int h) : w_(w), h_(h), n_(static_cast<std::size_t>(w) * h) {
    buf_ = fftw_alloc_complex(n_);
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(h, w, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(h, w, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Dft2() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }
  Dft2(const Dft2&) = delete;
  Dft2& operator=(const Dft2&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  void inverse() { fftw_execute(inv_); }
  std::size_t size() const { return n_; }

 private:
  int w_, h_;
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

// Angular frequency of DFT bin k on an axis of length n, in (-pi, pi].
double bin_frequency(int k, int n) {
  const int s = k <= n / 2 ? k : k - n;
  return 2.0 * std::numbers::pi * s / n;
}

}  // namespace

MonogenicLevel spectral_riesz_oracle(const GrayFrame& frame, int level) {
  const int w = frame.width(), h = frame.height();
  Dft2 dft(w, h);
  std::complex<double>* d = dft.data();
  for (std::size_t k = 0; k < dft.size(); ++k) d[k] = frame.values()[k];
  dft.forward();
  std::vector<std::complex<double>> spectrum(d, d + dft.size());

  auto apply = [&](bool horizontal) {
    GrayFrame out(w, h);
    for (int ky = 0; ky < h; ++ky) {
      const double wy = bin_frequency(ky, h);
      for (int kx = 0; kx < w; ++kx) {
        const double wx = bin_frequency(kx, w);
        const double norm = std::hypot(wx, wy);
        const std::size_t idx = static_cast<std::size_t>(ky) * w + kx;
        d[idx] = norm > 0.0
                     ? std::complex<double>(0.0, (horizontal ? wx : wy) / norm) * spectrum[idx]
                     : 0.0;
      }
    }
    dft.inverse();
    const double scale = 1.0 / static_cast<double>(dft.size());
    for (std::size_t k = 0; k < dft.size(); ++k) out.values()[k] = d[k].real() * scale;
    return out;
  };

  MonogenicLevel m;
  m.i = frame;
  m.r1 = apply(true);
  m.r2 = apply(false);
  m.level = level;
  return m;
}

std::vector<MotionClass> default_motion_classes() {
  return {{"right", 0.0}, {"up", 90.0}, {"left", 180.0}};
}

void MotionDatasetSpec::validate() const {
  if (classes.size() < 2) throw SpecError("motion dataset needs at least 2 classes");
  std::set<std::string> names;
  for (const MotionClass& c : classes) {
    if (c.name.empty() || !names.insert(c.name).second) {
      throw SpecError("motion class names must be non-empty and distinct");
    }
  }
  if (subjects < 2) throw SpecError("motion dataset needs at least 2 subjects for LOSO");
  if (reps < 1) throw SpecError("motion dataset needs at least 1 repetition");
  if (frames < 2) throw SpecError("motion dataset needs at least 2 frames per sequence");
  if (!(noise_sigma >= 0.0)) throw SpecError("noise sigma must be >= 0");
  if (!(fps > 0.0)) throw SpecError("fps must be > 0");
  if (width < 48 || height < 48) throw SpecError("motion dataset frames must be at least 48x48");
}

DatasetManifest make_motion_dataset(const MotionDatasetSpec& spec,
                                    const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  DatasetManifest manifest;
  manifest.name = "synthetic-motion";
  manifest.base_dir = out_dir;
  for (const MotionClass& c : spec.classes) manifest.classes.push_back(c.name);

  const double half = std::min(spec.width, spec.height) / 2.0;
  const double base_radius = half * 0.4;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  char buf[64];
  for (int s = 0; s < spec.subjects; ++s) {
    std::snprintf(buf, sizeof buf, "s%02d", s + 1);
    const std::string subject = buf;
    const double subj_radius = base_radius * between(0.85, 1.15);
    const double subj_speed = between(0.10, 0.20);
    const Point2 subj_offset{between(-2.0, 2.0), between(-2.0, 2.0)};
    for (const MotionClass& cls : spec.classes) {
      const double a = cls.angle_deg * std::numbers::pi / 180.0;
      for (int r = 0; r < spec.reps; ++r) {
        SyntheticSpec syn;
        syn.width = spec.width;
        syn.height = spec.height;
        syn.radius = subj_radius * between(0.95, 1.05);
        syn.noise_sigma = spec.noise_sigma;
        syn.seed = rng();
        const double speed = subj_speed * between(0.9, 1.1);
        const Point2 c = syn.image_center();
        const Point2 start{c.x + subj_offset.x + between(-0.5, 0.5),
                           c.y + subj_offset.y + between(-0.5, 0.5)};
        for (int f = 0; f < spec.frames; ++f) {
          syn.path.push_back({start.x + f * speed * std::cos(a), start.y - f * speed * std::sin(a)});
        }
        const std::vector<GrayFrame> frames = render_circle_sequence(syn);

        std::snprintf(buf, sizeof buf, "%s_%s_r%d", subject.c_str(), cls.name.c_str(), r + 1);
        SequenceAnnotation ann;
        ann.id = buf;
        ann.subject_id = subject;
        ann.label = cls.name;
        ann.frames_dir = fs::path(subject) / ann.id;
        ann.onset = 0;
        ann.apex = spec.frames - 1;
        ann.offset = spec.frames - 1;
        ann.fps = spec.fps;
        const fs::path dir = out_dir / ann.frames_dir;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
        for (std::size_t f = 0; f < frames.size(); ++f) {
          std::snprintf(buf, sizeof buf, "frame_%03zu.pgm", f);
          // Mid-gray range keeps the noise away from the 16-bit clamp.
          GrayFrame stored = frames[f];
          for (double& v : stored.values()) v = 0.2 + 0.6 * v;
          write_frame16(dir / buf, stored);
        }
        manifest.sequences.push_back(std::move(ann));
      }
    }
  }
  manifest.validate();
  const fs::path manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest_to_json(manifest);
  if (!out) throw IoError("cannot write '" + manifest_path.string() + "'");
  return manifest;
}

}  // namespace morf
