#include "sapo/run_dir.hpp"

#include <fstream>

#include "sapo/error.hpp"
#include "sapo/json_io.hpp"

namespace sapo {

using nlohmann::json;

std::string config_hash(const json& effective_config) {
  const std::string dump = effective_config.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunDirectory::RunDirectory(std::filesystem::path root, std::string hash)
    : root_(std::move(root)), hash_(std::move(hash)) {}

RunDirectory RunDirectory::create(const std::filesystem::path& root,
                                  const json& effective_config, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(root) && !fs::is_directory(root)) {
    throw Error(Err::IoError, root.string() + " exists and is not a directory");
  }
  if (fs::exists(root) && !fs::is_empty(root) && !force) {
    throw Error(Err::IoError,
                root.string() + " already holds a run; pass --force to overwrite");
  }
  fs::create_directories(root);

  RunDirectory dir(root, config_hash(effective_config));
  json config = effective_config;
  config["config_hash"] = dir.hash_;
  dir.write_json("config.json", std::move(config));  // always written first
  return dir;
}

void RunDirectory::write_json(const std::string& name, json value) const {
  if (value.is_object() && !value.contains("config_hash")) value["config_hash"] = hash_;
  write_text_file(root_ / name, value.dump(2) + "\n");
}

void RunDirectory::write_jsonl(const std::string& name, const std::vector<json>& records) const {
  std::ofstream out(root_ / name, std::ios::binary);
  if (!out) throw Error(Err::IoError, "cannot write " + (root_ / name).string());
  out << json{{"config_hash", hash_}}.dump() << '\n';
  for (const json& rec : records) out << rec.dump() << '\n';
}

void RunDirectory::write_text(const std::string& name, const std::string& content) const {
  write_text_file(root_ / name, content);
}

std::vector<json> read_jsonl_artifact(const std::filesystem::path& path) {
  std::vector<json> records = read_jsonl(path);
  if (!records.empty() && records.front().is_object() && records.front().size() == 1 &&
      records.front().contains("config_hash")) {
    records.erase(records.begin());
  }
  return records;
}

}  // namespace sapo
