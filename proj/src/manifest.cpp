#include "pencilspec/manifest.hpp"

#include <cstdint>

#include "json.hpp"
#include "pencilspec/jsonio.hpp"

namespace pencilspec {

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

void RunManifest::add_input(const std::string& path,
                            const std::string& content) {
  inputs.emplace_back(path, fnv1a64_hex(content));
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  nlohmann::json in = nlohmann::json::array();
  for (const auto& [path, digest] : inputs)
    in.push_back(nlohmann::json{{"path", path}, {"digest", digest}});
  j["inputs"] = in;
  nlohmann::json pj;
  for (const auto& [k, v] : params) pj[k] = v;
  j["params"] = pj;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& primary_output) const {
  write_file(primary_output + ".manifest.json", to_json());
}

}  // namespace pencilspec
