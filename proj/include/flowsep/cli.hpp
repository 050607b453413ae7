#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowsep {

// Entry point of the `flowsep` tool. args excludes the program name.
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64-bit digest of a file, as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace flowsep
