#include "srefi/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "srefi/csv.hpp"
#include "srefi/error.hpp"
#include "srefi/png_io.hpp"

namespace srefi {

Gender parse_gender(const std::string& token) {
  if (token == "male") return Gender::Male;
  if (token == "female") return Gender::Female;
  fail(ErrorKind::Validation, "unknown gender token '" + token + "'");
}

const char* gender_name(Gender g) {
  return g == Gender::Male ? "male" : "female";
}

std::string GroupKey::to_string() const {
  return std::string(gender_name(gender)) + "/" + ethnicity;
}

const FaceRecordRef& DatasetManifest::record(const std::string& image_id) const {
  auto it = record_by_image_id.find(image_id);
  if (it == record_by_image_id.end()) {
    fail(ErrorKind::Validation, "unknown image_id '" + image_id + "'");
  }
  return records[it->second];
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp;
  return base / fp;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const CsvTable table =
      read_csv(path, {"image_id", "subject_id", "gender", "ethnicity",
                      "image_path", "landmarks_path", "embedding_path"});
  const std::filesystem::path base = path.parent_path();

  DatasetManifest manifest;
  manifest.source_path = path;

  std::map<std::string, size_t> first_line_of_image;
  std::map<std::string, std::pair<GroupKey, size_t>> group_of_subject;

  auto col = [&table](const char* name) { return table.column.at(name); };
  const size_t c_img = col("image_id"), c_subj = col("subject_id");
  const size_t c_gen = col("gender"), c_eth = col("ethnicity");
  const size_t c_ipath = col("image_path"), c_lpath = col("landmarks_path");
  const size_t c_epath = col("embedding_path");

  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const size_t line = table.line_numbers[i];

    FaceRecordRef rec;
    rec.image_id = row[c_img];
    rec.subject_id = row[c_subj];
    if (rec.image_id.empty() || rec.subject_id.empty()) {
      fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line) +
                                 ": empty image_id or subject_id");
    }
    try {
      rec.gender = parse_gender(row[c_gen]);
    } catch (const Error& e) {
      fail(ErrorKind::Validation,
           path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
    rec.ethnicity = row[c_eth];
    if (rec.ethnicity.empty()) {
      fail(ErrorKind::Validation, path.string() + ":" + std::to_string(line) +
                                      ": empty ethnicity");
    }
    rec.image_path = resolve(base, row[c_ipath]);
    rec.landmarks_path = resolve(base, row[c_lpath]);
    rec.embedding_path = resolve(base, row[c_epath]);

    auto [it, inserted] = first_line_of_image.emplace(rec.image_id, line);
    if (!inserted) {
      std::ostringstream msg;
      msg << path.string() << ": duplicate image_id '" << rec.image_id
          << "' on lines " << it->second << " and " << line;
      fail(ErrorKind::Validation, msg.str());
    }

    const GroupKey group{rec.gender, rec.ethnicity};
    auto [git, ginserted] =
        group_of_subject.emplace(rec.subject_id, std::make_pair(group, line));
    if (!ginserted && !(git->second.first == group)) {
      std::ostringstream msg;
      msg << path.string() << ": subject '" << rec.subject_id
          << "' listed in group " << group.to_string() << " on line " << line
          << " but in group " << git->second.first.to_string() << " on line "
          << git->second.second;
      fail(ErrorKind::Validation, msg.str());
    }

    manifest.record_by_image_id[rec.image_id] = manifest.records.size();
    manifest.images_of_subject[rec.subject_id].push_back(rec.image_id);
    manifest.records.push_back(std::move(rec));
  }

  for (auto& [subject, group_line] : group_of_subject) {
    manifest.groups[group_line.first].push_back(subject);
  }
  for (auto& [group, subjects] : manifest.groups) {
    std::sort(subjects.begin(), subjects.end());
  }
  for (auto& [subject, images] : manifest.images_of_subject) {
    std::sort(images.begin(), images.end());
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<FaceRecordRef>& records) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write: " + path.string());
  out << "image_id,subject_id,gender,ethnicity,image_path,landmarks_path,"
         "embedding_path\n";
  for (const FaceRecordRef& rec : records) {
    out << join_csv_line({rec.image_id, rec.subject_id, gender_name(rec.gender),
                          rec.ethnicity, rec.image_path.string(),
                          rec.landmarks_path.string(),
                          rec.embedding_path.string()})
        << "\n";
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

Landmarks load_landmarks(const std::filesystem::path& path, int image_width,
                         int image_height) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open landmark file: " + path.string());

  Landmarks lm;
  int count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) {
      fail(ErrorKind::Parse, path.string() + ": malformed landmark line " +
                                 std::to_string(count + 1));
    }
    if (count >= kLandmarkCount) {
      ++count;  // keep counting for the error message
      continue;
    }
    lm[count] = Vec2{x, y};
    ++count;
  }
  if (count != kLandmarkCount) {
    fail(ErrorKind::Validation, path.string() + ": expected " +
                                    std::to_string(kLandmarkCount) +
                                    " landmarks, got " + std::to_string(count));
  }
  for (int i = 0; i < kLandmarkCount; ++i) {
    const Vec2& p = lm[i];
    if (!(p.x >= 0.0 && p.x <= image_width - 1 && p.y >= 0.0 &&
          p.y <= image_height - 1)) {
      std::ostringstream msg;
      msg << path.string() << ": landmark " << (i + 1) << " (" << p.x << ", "
          << p.y << ") outside image bounds " << image_width << "x"
          << image_height;
      fail(ErrorKind::Validation, msg.str());
    }
  }
  return lm;
}

void write_landmarks(const std::filesystem::path& path, const Landmarks& lm) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write: " + path.string());
  out.precision(10);
  for (const Vec2& p : lm) out << p.x << " " << p.y << "\n";
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<double> load_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open embedding file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    fail(ErrorKind::Parse, path.string() + ": empty embedding file");
  }
  std::vector<double> values;
  std::istringstream ls(line);
  std::string token;
  while (std::getline(ls, token, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(token, &pos));
      while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse,
           path.string() + ": bad embedding value '" + token + "'");
    }
  }
  if (values.empty()) {
    fail(ErrorKind::Parse, path.string() + ": no embedding values");
  }
  return values;
}

FaceRecord load_face(const FaceRecordRef& ref, int required_divisor) {
  FaceRecord face;
  face.ref = ref;
  face.image = read_png(ref.image_path);
  if (face.image.width != face.image.height) {
    std::ostringstream msg;
    msg << ref.image_id << ": image is " << face.image.width << "x"
        << face.image.height << ", expected square";
    fail(ErrorKind::Validation, msg.str());
  }
  if (required_divisor > 0 && face.image.width % required_divisor != 0) {
    std::ostringstream msg;
    msg << ref.image_id << ": image side " << face.image.width
        << " not divisible by " << required_divisor;
    fail(ErrorKind::Validation, msg.str());
  }
  face.landmarks =
      load_landmarks(ref.landmarks_path, face.image.width, face.image.height);
  return face;
}

GroupKey group_of(const DatasetManifest& manifest,
                  const std::string& subject_id) {
  for (const auto& [group, subjects] : manifest.groups) {
    if (std::binary_search(subjects.begin(), subjects.end(), subject_id)) {
      return group;
    }
  }
  fail(ErrorKind::Validation, "unknown subject_id '" + subject_id + "'");
}

}  // namespace srefi
