#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vipr {

enum class Split { kTrain, kVal };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

/// One dataset frame. `label`, `source_frame` and `seed` are only present on
/// records produced by the synthesis and augmentation stages.
struct FrameRecord {
  std::string image_path;
  std::optional<std::string> label_path;
  std::string source_id;
  Split split = Split::kTrain;
  std::optional<std::string> group;
  std::optional<int> label;
  std::optional<std::string> source_frame;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct Manifest {
  std::vector<FrameRecord> records;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Throws kValidation naming the first source_id that appears in both splits,
/// or kValidation for an empty source_id.
void validate_manifest(const Manifest& m);

/// JSON Lines, one record per line. Blank lines are skipped.
Manifest read_manifest(std::string_view text);
std::string write_manifest(const Manifest& m);

Manifest read_manifest_file(const std::filesystem::path& path);
void write_manifest_file(const std::filesystem::path& path, const Manifest& m);

}  // namespace vipr
