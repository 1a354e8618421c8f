#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pencilspec {

// Reproducibility record emitted next to every CLI output. Deliberately
// timestamp-free: identical inputs and parameters must produce a
// byte-identical manifest, so the manifest itself can be diffed to prove a
// rerun happened under the same conditions.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::map<std::string, double> params;  // tolerances, truncation, seed
  std::vector<std::string> outputs;

  void add_input(const std::string& path, const std::string& content);
  std::string to_json() const;
  // writes <primary_output>.manifest.json
  void write(const std::string& primary_output) const;
};

// FNV-1a 64-bit digest, 16 hex digits.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace pencilspec
