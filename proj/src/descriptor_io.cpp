#include "morf/descriptor_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "morf/binary.hpp"
#include "morf/errors.hpp"

namespace morf {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw IoError("cannot format number");
  return {buf, res.ptr};
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void put_string(std::string& out, const std::string& s) {
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

std::string get_string(binary::Reader& in) {
  const auto n = in.get<std::uint32_t>();
  return std::string(in.take(n));
}

}  // namespace

std::string encode_descriptor_csv(const DescriptorSet& set) {
  std::string out;
  for (const DescriptorRecord& rec : set.records) {
    out += csv_field(rec.id);
    out += ',';
    out += csv_field(rec.label);
    for (double v : rec.values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<DescriptorRecord> decode_descriptor_csv(const std::string& text) {
  std::vector<DescriptorRecord> records;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 2) throw IoError("descriptor row without id and label");
    DescriptorRecord rec{std::move(fields[0]), std::move(fields[1]), {}};
    for (std::size_t k = 2; k < fields.size(); ++k) rec.values.push_back(parse_double(fields[k]));
    records.push_back(std::move(rec));
  }
  return records;
}

std::string encode_descriptor_binary(const DescriptorSet& set) {
  const MorfParams& p = set.params;
  std::string out = "MORF";
  binary::put<std::uint32_t>(out, kDescriptorFormatVersion);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.gx));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.gy));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.o));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(p.levels.size()));
  for (int level : p.levels) binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(level));
  binary::put<double>(out, p.alpha);
  binary::put<std::uint8_t>(out, p.normalize ? 1 : 0);
  binary::put<std::uint8_t>(out, p.amplify_mode == AmplifyMode::logarithm ? 1 : 0);
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(set.records.size()));
  for (const DescriptorRecord& rec : set.records) {
    put_string(out, rec.id);
    put_string(out, rec.label);
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.values.size()));
    for (double v : rec.values) binary::put<double>(out, v);
  }
  return out;
}

DescriptorSet decode_descriptor_binary(const std::string& bytes) {
  binary::Reader in(bytes);
  if (in.take(4) != "MORF") throw IoError("not a MORF descriptor file");
  const auto version = in.get<std::uint32_t>();
  if (version != kDescriptorFormatVersion) {
    throw IoError("unsupported descriptor format version " + std::to_string(version));
  }
  DescriptorSet set;
  MorfParams& p = set.params;
  p.gx = static_cast<int>(in.get<std::uint32_t>());
  p.gy = static_cast<int>(in.get<std::uint32_t>());
  p.o = static_cast<int>(in.get<std::uint32_t>());
  p.levels.assign(in.get<std::uint32_t>(), 0);
  for (int& level : p.levels) level = static_cast<int>(in.get<std::uint32_t>());
  p.alpha = in.get<double>();
  p.normalize = in.get<std::uint8_t>() != 0;
  p.amplify_mode = in.get<std::uint8_t>() != 0 ? AmplifyMode::logarithm : AmplifyMode::sine;
  const auto count = in.get<std::uint32_t>();
  set.records.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    DescriptorRecord rec;
    rec.id = get_string(in);
    rec.label = get_string(in);
    rec.values.resize(in.get<std::uint32_t>());
    for (double& v : rec.values) v = in.get<double>();
    set.records.push_back(std::move(rec));
  }
  if (!in.done()) throw IoError("trailing bytes after descriptor records");
  return set;
}

void write_descriptors(const std::filesystem::path& path, const DescriptorSet& set) {
  if (path.extension() == ".csv") {
    binary::write_file(path.string(), encode_descriptor_csv(set));
  } else {
    binary::write_file(path.string(), encode_descriptor_binary(set));
  }
}

}  // namespace morf
