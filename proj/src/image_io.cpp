#include "morf/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "morf/errors.hpp"

namespace morf {

namespace fs = std::filesystem;

GrayFrame read_frame(const fs::path& path) {
  const cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw IoError("cannot read image " + path.string());

  double scale = 0.0;
  switch (raw.depth()) {
    case CV_8U:
      scale = 1.0 / 255.0;
      break;
    case CV_16U:
      scale = 1.0 / 65535.0;
      break;
    default:
      throw IoError("unsupported pixel depth in " + path.string() +
                    " (expected 8- or 16-bit)");
  }
  cv::Mat values;
  raw.convertTo(values, CV_64F, scale);

  const int channels = values.channels();
  GrayFrame frame(values.cols, values.rows);
  for (int y = 0; y < values.rows; ++y) {
    const double* row = values.ptr<double>(y);
    for (int x = 0; x < values.cols; ++x) {
      const double* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      if (channels == 1 || channels == 2) {
        frame(x, y) = px[0];
      } else {
        // OpenCV stores color as BGR(A).
        frame(x, y) = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
      }
    }
  }
  return frame;
}

namespace {

template <typename T>
void write_quantized(const fs::path& path, const GrayFrame& frame, int cv_type,
                     double max_code) {
  cv::Mat out(frame.height(), frame.width(), cv_type);
  for (int y = 0; y < frame.height(); ++y) {
    T* row = out.ptr<T>(y);
    for (int x = 0; x < frame.width(); ++x) {
      const double v = std::clamp(frame(x, y), 0.0, 1.0);
      row[x] = static_cast<T>(std::lround(v * max_code));
    }
  }
  if (!cv::imwrite(path.string(), out)) {
    throw IoError("cannot write image " + path.string());
  }
}

}  // namespace

void write_frame16(const fs::path& path, const GrayFrame& frame) {
  write_quantized<std::uint16_t>(path, frame, CV_16UC1, 65535.0);
}

void write_frame8(const fs::path& path, const GrayFrame& frame) {
  write_quantized<std::uint8_t>(path, frame, CV_8UC1, 255.0);
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("frames directory " + dir.string() + " does not exist");
  }
  std::vector<fs::path> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

}  // namespace morf
