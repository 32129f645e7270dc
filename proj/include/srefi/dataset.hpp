#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srefi/geometry.hpp"
#include "srefi/image.hpp"

namespace srefi {

inline constexpr int kLandmarkCount = 68;
inline constexpr int kDefaultPyramidLevels = 4;

enum class Gender { Male, Female };

Gender parse_gender(const std::string& token);
const char* gender_name(Gender g);

struct GroupKey {
  Gender gender;
  std::string ethnicity;

  bool operator<(const GroupKey& o) const {
    if (gender != o.gender) return gender < o.gender;
    return ethnicity < o.ethnicity;
  }
  bool operator==(const GroupKey& o) const {
    return gender == o.gender && ethnicity == o.ethnicity;
  }
  std::string to_string() const;
};

using Landmarks = std::array<Vec2, kLandmarkCount>;

// One manifest row: everything about a face except its pixels.
struct FaceRecordRef {
  std::string image_id;
  std::string subject_id;
  Gender gender = Gender::Male;
  std::string ethnicity;
  std::filesystem::path image_path;      // resolved against the manifest dir
  std::filesystem::path landmarks_path;  // resolved against the manifest dir
  std::filesystem::path embedding_path;  // empty when absent
};

// A fully loaded face: pixels plus landmarks, invariants checked.
struct FaceRecord {
  FaceRecordRef ref;
  ImageRGB8 image;
  Landmarks landmarks;
};

struct DatasetManifest {
  std::vector<FaceRecordRef> records;
  std::map<GroupKey, std::vector<std::string>> groups;  // sorted subject ids
  std::map<std::string, size_t> record_by_image_id;
  std::map<std::string, std::vector<std::string>> images_of_subject;  // sorted
  std::filesystem::path source_path;

  const FaceRecordRef& record(const std::string& image_id) const;
};

// Parses the manifest CSV (header: image_id,subject_id,gender,ethnicity,
// image_path,landmarks_path,embedding_path; extra columns are ignored).
// Relative paths resolve against the manifest's directory. Images are not
// loaded here.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Writes records in the same format; inverse of load_manifest on the record
// list. Paths are written as given.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<FaceRecordRef>& records);

// Loads pixels and landmarks for one record and verifies the FaceRecord
// invariants. `required_divisor` is the pyramid-divisibility requirement on
// the (square) image side, 2^(L-1) for L levels.
FaceRecord load_face(const FaceRecordRef& ref, int required_divisor = 8);

GroupKey group_of(const DatasetManifest& manifest, const std::string& subject_id);

// Landmark sidecar: 68 lines of "x y".
Landmarks load_landmarks(const std::filesystem::path& path, int image_width,
                         int image_height);
void write_landmarks(const std::filesystem::path& path, const Landmarks& lm);

// Embedding sidecar: one line of comma-separated reals.
std::vector<double> load_embedding_file(const std::filesystem::path& path);

}  // namespace srefi
