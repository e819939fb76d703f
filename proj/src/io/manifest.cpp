#include "alphaloop/io/manifest.hpp"

#include <boost/crc.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace alphaloop::io {

using nlohmann::json;

const char* version() { return ALPHALOOP_VERSION; }

FileDigest digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for hashing");
  boost::crc_32_type crc;
  std::vector<char> buf(1 << 16);
  FileDigest d;
  d.path = path.string();
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    crc.process_bytes(buf.data(), static_cast<std::size_t>(got));
    d.bytes += static_cast<std::uintmax_t>(got);
  }
  d.crc32 = crc.checksum();
  return d;
}

namespace {

json digests_to_json(const std::vector<FileDigest>& ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back({{"path", d.path}, {"crc32", d.crc32}, {"bytes", d.bytes}});
  return a;
}

std::vector<FileDigest> digests_from_json(const json& a) {
  std::vector<FileDigest> out;
  for (const auto& d : a) out.push_back({d.at("path").get<std::string>(), d.at("crc32").get<std::uint32_t>(), d.at("bytes").get<std::uintmax_t>()});
  return out;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["options"] = m.options;
  j["config"] = m.config_json.empty() ? json(nullptr) : json::parse(m.config_json);
  j["inputs"] = digests_to_json(m.inputs);
  j["outputs"] = digests_to_json(m.outputs);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path.string() + "'");
  try {
    const json j = json::parse(in);
    Manifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.options = j.at("options").get<std::map<std::string, std::string>>();
    if (!j.at("config").is_null()) m.config_json = j.at("config").dump();
    m.inputs = digests_from_json(j.at("inputs"));
    m.outputs = digests_from_json(j.at("outputs"));
    return m;
  } catch (const json::exception& e) {
    throw std::invalid_argument("manifest '" + path.string() + "' is malformed: " + e.what());
  }
}

}  // namespace alphaloop::io
