#include "morf/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "morf/errors.hpp"
#include "morf/image_io.hpp"

namespace morf {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetManifest::validate() const {
  if (classes.empty()) throw ValidationError("manifest declares no classes");
  if (sequences.empty()) throw ValidationError("manifest lists no sequences");
  std::set<std::string> class_set(classes.begin(), classes.end());
  if (class_set.size() != classes.size()) {
    throw ValidationError("manifest class list contains duplicates");
  }
  std::set<std::string> ids;
  for (const SequenceAnnotation& seq : sequences) {
    const std::string where = "sequence '" + seq.id + "': ";
    if (seq.id.empty()) throw ValidationError("sequence with empty id");
    if (!ids.insert(seq.id).second) throw ValidationError(where + "duplicate id");
    if (seq.subject_id.empty()) throw ValidationError(where + "missing subject");
    if (!class_set.contains(seq.label)) {
      throw ValidationError(where + "label '" + seq.label + "' not among classes");
    }
    if (seq.onset < 0) throw ValidationError(where + "negative onset");
    if (seq.onset > seq.apex) throw ValidationError(where + "onset after apex");
    if (seq.offset && *seq.offset < seq.apex) {
      throw ValidationError(where + "offset before apex");
    }
    if (!(seq.fps > 0.0)) throw ValidationError(where + "fps must be positive");
  }
}

fs::path DatasetManifest::frames_path(const SequenceAnnotation& seq) const {
  return seq.frames_dir.is_absolute() ? seq.frames_dir : base_dir / seq.frames_dir;
}

int DatasetManifest::class_index(const std::string& label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw ValidationError("unknown class '" + label + "'");
  return static_cast<int>(it - classes.begin());
}

std::vector<std::string> DatasetManifest::subjects() const {
  std::set<std::string> s;
  for (const auto& seq : sequences) s.insert(seq.subject_id);
  return {s.begin(), s.end()};
}

DatasetManifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest parse error: ") + e.what());
  }
  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.name = doc.value("name", std::string{});
    m.classes = doc.at("classes").get<std::vector<std::string>>();
    for (const json& s : doc.at("sequences")) {
      SequenceAnnotation seq;
      seq.id = s.at("id").get<std::string>();
      seq.subject_id = s.at("subject").get<std::string>();
      seq.label = s.at("label").get<std::string>();
      seq.frames_dir = s.at("frames_dir").get<std::string>();
      seq.onset = s.at("onset").get<int>();
      if (s.contains("offset")) seq.offset = s.at("offset").get<int>();
      if (s.contains("apex")) {
        seq.apex = s.at("apex").get<int>();
      } else if (seq.offset) {
        seq.apex = (seq.onset + *seq.offset) / 2;
      } else {
        throw ValidationError("sequence '" + seq.id + "': needs apex or offset");
      }
      seq.fps = s.at("fps").get<double>();
      m.sequences.push_back(std::move(seq));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest schema error: ") + e.what());
  }
  m.validate();
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), path.parent_path());
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json doc;
  doc["name"] = manifest.name;
  doc["classes"] = manifest.classes;
  doc["sequences"] = json::array();
  for (const SequenceAnnotation& seq : manifest.sequences) {
    json s;
    s["id"] = seq.id;
    s["subject"] = seq.subject_id;
    s["label"] = seq.label;
    s["frames_dir"] = seq.frames_dir.generic_string();
    s["onset"] = seq.onset;
    s["apex"] = seq.apex;
    if (seq.offset) s["offset"] = *seq.offset;
    s["fps"] = seq.fps;
    doc["sequences"].push_back(std::move(s));
  }
  return doc.dump(2) + "\n";
}

std::vector<GrayFrame> load_sequence(const SequenceAnnotation& ann, const fs::path& base_dir) {
  const fs::path dir = ann.frames_dir.is_absolute() || base_dir.empty()
                           ? ann.frames_dir
                           : base_dir / ann.frames_dir;
  std::vector<fs::path> files;
  try {
    files = list_frame_files(dir);
  } catch (const IoError& e) {
    throw IoError("sequence '" + ann.id + "': " + e.what());
  }
  if (static_cast<int>(files.size()) < ann.apex + 1) {
    throw RangeError("sequence '" + ann.id + "': apex " + std::to_string(ann.apex) +
                     " beyond " + std::to_string(files.size()) + " frames in " +
                     dir.string());
  }
  std::vector<GrayFrame> frames;
  frames.reserve(files.size());
  for (const fs::path& f : files) {
    frames.push_back(read_frame(f));
    if (!frames.back().same_shape(frames.front())) {
      throw StructureError("sequence '" + ann.id + "': frame " + f.filename().string() +
                           " differs in size from the first frame");
    }
  }
  return frames;
}

std::vector<IndexFold> loso_folds(std::span<const std::string> subject_ids) {
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < subject_ids.size(); ++i) by_subject[subject_ids[i]].push_back(i);
  if (by_subject.size() < 2) {
    throw SplitError("leave-one-subject-out needs at least 2 subjects, got " +
                     std::to_string(by_subject.size()));
  }
  std::vector<IndexFold> folds;
  for (const auto& [subject, members] : by_subject) {
    IndexFold fold{subject, {}, members};
    for (std::size_t i = 0; i < subject_ids.size(); ++i) {
      if (subject_ids[i] != subject) fold.train.push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::vector<Split> loso_splits(const DatasetManifest& manifest) {
  std::vector<std::string> subjects;
  for (const auto& seq : manifest.sequences) subjects.push_back(seq.subject_id);
  std::vector<Split> splits;
  for (const IndexFold& fold : loso_folds(subjects)) {
    Split split{fold.subject, {}, {}};
    for (std::size_t i : fold.train) split.train_ids.push_back(manifest.sequences[i].id);
    for (std::size_t i : fold.test) split.test_ids.push_back(manifest.sequences[i].id);
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace morf
