#include "freelab/manifest.hpp"

#include <array>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "freelab/error.hpp"

namespace freelab::manifest {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::invalid_argument, "SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string render(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "freelab";
  j["version"] = tool_version;
  j["subcommand"] = m.subcommand;
  j["arguments"] = m.arguments;
  j["config_sha256"] = m.config_sha256;
  auto files = [](const std::vector<FileDigest>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : v) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
  };
  j["inputs"] = files(m.inputs);
  j["outputs"] = files(m.outputs);
  return j.dump(2) + "\n";
}

void OutputSet::add(std::filesystem::path path, std::string content) {
  files_.emplace_back(std::move(path), std::move(content));
}

std::vector<FileDigest> OutputSet::commit() const {
  std::vector<FileDigest> digests;
  for (const auto& [path, content] : files_) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw Error(ErrorKind::config, fmt::format("cannot write {}", path.string()));
      }
      out << content;
      if (!out) throw Error(ErrorKind::config, fmt::format("write failed for {}", path.string()));
    }
    std::filesystem::rename(tmp, path);
    digests.push_back({path.filename().string(), sha256_hex(content)});
  }
  return digests;
}

}  // namespace freelab::manifest
