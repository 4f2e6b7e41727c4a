#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morf/image.hpp"

namespace morf {

struct SequenceAnnotation {
  std::string id;
  std::string subject_id;
  std::string label;
  /// Absolute, or relative to the manifest's directory.
  std::filesystem::path frames_dir;
  int onset = 0;
  int apex = 0;
  std::optional<int> offset;
  double fps = 0.0;
};

struct DatasetManifest {
  std::string name;
  std::vector<std::string> classes;
  std::vector<SequenceAnnotation> sequences;
  /// Directory relative frame paths resolve against.
  std::filesystem::path base_dir;

  /// Throws ValidationError naming the offending sequence.
  void validate() const;
  std::filesystem::path frames_path(const SequenceAnnotation& seq) const;
  int class_index(const std::string& label) const;
  std::vector<std::string> subjects() const;
};

/// Parses manifest JSON text. A sequence without "apex" takes the midpoint
/// of onset and offset.
DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const DatasetManifest& manifest);

/// Loads every frame of a sequence directory, lexicographic order.
/// Throws RangeError when fewer than apex + 1 frames exist and
/// StructureError on mixed dimensions.
std::vector<GrayFrame> load_sequence(const SequenceAnnotation& ann,
                                     const std::filesystem::path& base_dir = {});

/// One leave-one-subject-out fold, as indices into the input order.
struct IndexFold {
  std::string subject;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Folds ordered by subject id. Throws SplitError with fewer than 2 subjects.
std::vector<IndexFold> loso_folds(std::span<const std::string> subject_ids);

struct Split {
  std::string subject;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

std::vector<Split> loso_splits(const DatasetManifest& manifest);

}  // namespace morf
