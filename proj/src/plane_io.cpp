#include "morf/plane_io.hpp"

#include <fstream>
#include <iterator>

#include "morf/binary.hpp"
#include "morf/errors.hpp"

namespace morf {

namespace binary {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace binary

std::string encode_float_plane(const GrayFrame& frame, std::uint32_t level,
                               std::uint32_t channel) {
  std::string out;
  out.reserve(16 + frame.size() * 4);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(frame.width()));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(frame.height()));
  binary::put<std::uint32_t>(out, level);
  binary::put<std::uint32_t>(out, channel);
  for (double v : frame.values()) binary::put<float>(out, static_cast<float>(v));
  return out;
}

FloatPlane decode_float_plane(const std::string& bytes) {
  binary::Reader in(bytes);
  const auto width = in.get<std::uint32_t>();
  const auto height = in.get<std::uint32_t>();
  FloatPlane plane;
  plane.level = in.get<std::uint32_t>();
  plane.channel = in.get<std::uint32_t>();
  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (double& v : data) v = in.get<float>();
  if (!in.done()) throw IoError("trailing bytes after float plane");
  plane.frame = GrayFrame(static_cast<int>(width), static_cast<int>(height), std::move(data));
  return plane;
}

void write_float_plane(const std::filesystem::path& path, const GrayFrame& frame,
                       std::uint32_t level, std::uint32_t channel) {
  binary::write_file(path.string(), encode_float_plane(frame, level, channel));
}

FloatPlane read_float_plane(const std::filesystem::path& path) {
  return decode_float_plane(binary::read_file(path.string()));
}

}  // namespace morf
