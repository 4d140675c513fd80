#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace kgod::prop {

inline std::filesystem::path fixture_path(const std::string& rel) { return std::filesystem::path(KGOD_FIXTURES) / rel; }

inline std::string read_fixture(const std::string& rel) {
  std::ifstream in(fixture_path(rel), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kgod::prop
