#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "morf/descriptor.hpp"

namespace morf {

struct DescriptorRecord {
  std::string id;
  std::string label;
  std::vector<double> values;
};

struct DescriptorSet {
  MorfParams params;
  std::vector<DescriptorRecord> records;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// One row per record: id, label, values. No header row.
std::string encode_descriptor_csv(const DescriptorSet& set);
std::vector<DescriptorRecord> decode_descriptor_csv(const std::string& text);

/// "MORF", uint32 version, params block, uint32 record count, then per
/// record id, label (uint32 length + bytes) and uint32 count + float64
/// values. Little-endian throughout.
std::string encode_descriptor_binary(const DescriptorSet& set);
DescriptorSet decode_descriptor_binary(const std::string& bytes);

inline constexpr std::uint32_t kDescriptorFormatVersion = 1;

/// Picks CSV for a ".csv" extension and the binary form otherwise.
void write_descriptors(const std::filesystem::path& path, const DescriptorSet& set);

}  // namespace morf
