#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace alphaloop::io {

/// Entry point of the `alphaloop` tool. Returns the process exit status:
/// 0 success, 1 runtime or validation failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs one command with already-parsed options, writing artifacts and a
/// manifest into `out_dir`. `config_json` is a session configuration (empty
/// for commands that take none). Throws on failure.
void run_command(const std::string& command, const std::map<std::string, std::string>& options,
                 const std::string& config_json, const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace alphaloop::io
