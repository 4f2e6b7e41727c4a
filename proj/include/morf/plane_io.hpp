#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "morf/image.hpp"

namespace morf {

/// Debug dump of one float plane: 16-byte little-endian header (width,
/// height, level, channel as uint32) followed by row-major float32 values.
struct FloatPlane {
  GrayFrame frame;
  std::uint32_t level = 0;
  std::uint32_t channel = 0;
};

std::string encode_float_plane(const GrayFrame& frame, std::uint32_t level,
                               std::uint32_t channel);
FloatPlane decode_float_plane(const std::string& bytes);

void write_float_plane(const std::filesystem::path& path, const GrayFrame& frame,
                       std::uint32_t level, std::uint32_t channel);
FloatPlane read_float_plane(const std::filesystem::path& path);

}  // namespace morf
