#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace alphaloop::io {

struct FileDigest {
  std::string path;
  std::uint32_t crc32 = 0;
  std::uintmax_t bytes = 0;
};

FileDigest digest_file(const std::filesystem::path& path);

/// Record of one command run: enough to regenerate its outputs.
struct Manifest {
  std::string tool = "alphaloop";
  std::string version;
  std::string command;
  /// Command options (everything except the output directory).
  std::map<std::string, std::string> options;
  /// Fully resolved session configuration as JSON text; empty if unused.
  std::string config_json;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Library version string.
const char* version();

}  // namespace alphaloop::io
