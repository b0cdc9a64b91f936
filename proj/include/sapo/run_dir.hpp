#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sapo {

// FNV-1a over the canonical (sorted-key) JSON dump of the effective config.
std::string config_hash(const nlohmann::json& effective_config);

// Artifact layout for one run: config.json first, then data files, each
// stamped with the config hash it was produced under.
class RunDirectory {
 public:
  RunDirectory(std::filesystem::path root, std::string hash);

  // Fails unless the directory is empty/absent, or force is set.
  static RunDirectory create(const std::filesystem::path& root,
                             const nlohmann::json& effective_config, bool force);

  const std::filesystem::path& root() const { return root_; }
  const std::string& hash() const { return hash_; }

  void write_json(const std::string& name, nlohmann::json value) const;
  // First line is a {"config_hash": ...} header record.
  void write_jsonl(const std::string& name, const std::vector<nlohmann::json>& records) const;
  void write_text(const std::string& name, const std::string& content) const;

 private:
  std::filesystem::path root_;
  std::string hash_;
};

// Reads a JSONL artifact, skipping the config-hash header if present.
std::vector<nlohmann::json> read_jsonl_artifact(const std::filesystem::path& path);

}  // namespace sapo
