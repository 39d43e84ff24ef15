#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace freelab::manifest {

inline constexpr std::string_view tool_version = "0.1.0";

std::string sha256_hex(std::string_view bytes);

struct FileDigest {
  std::string path;
  std::string sha256;
};

// Everything that determines a run's outputs. No timestamps or host data, so
// identical runs produce identical manifests.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;
  std::string config_sha256;  // of the resolved configuration
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

std::string render(const RunManifest& m);

// Output files are staged in memory and written together once a run has
// succeeded, each through a temporary file and rename.
class OutputSet {
 public:
  void add(std::filesystem::path path, std::string content);
  /// Writes all files and returns their digests in insertion order.
  std::vector<FileDigest> commit() const;

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

}  // namespace freelab::manifest
