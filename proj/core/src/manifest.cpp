#include "vipr/manifest.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vipr/error.hpp"

namespace vipr {
namespace {

using json = nlohmann::json;

FrameRecord record_from_json(const json& j) {
  FrameRecord r;
  r.image_path = j.at("image_path").get<std::string>();
  if (j.contains("label_path") && !j.at("label_path").is_null()) r.label_path = j.at("label_path").get<std::string>();
  r.source_id = j.at("source_id").get<std::string>();
  r.split = parse_split(j.at("split").get<std::string>());
  if (j.contains("group") && !j.at("group").is_null()) r.group = j.at("group").get<std::string>();
  if (j.contains("label") && !j.at("label").is_null()) r.label = j.at("label").get<int>();
  if (j.contains("source_frame") && !j.at("source_frame").is_null()) {
    r.source_frame = j.at("source_frame").get<std::string>();
  }
  if (j.contains("seed") && !j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
  if (r.source_id.empty()) throw std::invalid_argument("empty source_id");
  if (r.label && *r.label != 0 && *r.label != 1) throw std::invalid_argument("label must be 0 or 1");
  return r;
}

json record_to_json(const FrameRecord& r) {
  json j;
  j["image_path"] = r.image_path;
  j["label_path"] = r.label_path ? json(*r.label_path) : json(nullptr);
  j["source_id"] = r.source_id;
  j["split"] = std::string(to_string(r.split));
  j["group"] = r.group ? json(*r.group) : json(nullptr);
  if (r.label) j["label"] = *r.label;
  if (r.source_frame) j["source_frame"] = *r.source_frame;
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

}  // namespace

std::string_view to_string(Split split) { return split == Split::kTrain ? "train" : "val"; }

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  throw std::invalid_argument("split must be 'train' or 'val', got '" + std::string(text) + "'");
}

void validate_manifest(const Manifest& m) {
  std::map<std::string, Split, std::less<>> seen;
  for (const FrameRecord& r : m.records) {
    if (r.source_id.empty()) fail(ErrorKind::kValidation, "record " + r.image_path + " has an empty source_id");
    auto [it, inserted] = seen.emplace(r.source_id, r.split);
    if (!inserted && it->second != r.split) {
      fail(ErrorKind::kValidation, "source_id '" + r.source_id + "' appears in both train and val splits");
    }
  }
}

Manifest read_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      m.records.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      fail(ErrorKind::kParse, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_manifest(m);
  return m;
}

std::string write_manifest(const Manifest& m) {
  validate_manifest(m);
  std::string out;
  for (const FrameRecord& r : m.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

Manifest read_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return read_manifest(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

void write_manifest_file(const std::filesystem::path& path, const Manifest& m) {
  const std::string text = write_manifest(m);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write manifest " + path.string());
  out << text;
}

}  // namespace vipr
