#pragma once

#include <filesystem>
#include <vector>

#include "morf/image.hpp"

namespace morf {

/// Reads an 8- or 16-bit PNG/PGM as grayscale normalized by its bit depth.
/// Color inputs are converted with Rec.601 luma weights.
GrayFrame read_frame(const std::filesystem::path& path);

/// Writes a frame as 16-bit grayscale, clamping to [0, 1].
void write_frame16(const std::filesystem::path& path, const GrayFrame& frame);
/// Writes a frame as 8-bit grayscale, clamping to [0, 1].
void write_frame8(const std::filesystem::path& path, const GrayFrame& frame);

/// Lexicographically sorted .png/.pgm files of a directory.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

}  // namespace morf
