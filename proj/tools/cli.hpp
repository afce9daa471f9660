#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace musical::cli {

/// Entry point of the `musical` executable. Returns the process exit code;
/// diagnostics go to `err`, summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a flat `key = value` file and returns the flags it implies, skipping
/// any flag already present in `args`. `psf.kind` maps to `--psf-kind`, etc.
std::vector<std::string> config_flags(const std::string& path, const std::vector<std::string>& args);

}  // namespace musical::cli
