#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "refmon/isystem.hpp"

namespace support {

inline std::string fixture_path(const std::string& name) { return std::string(REFMON_FIXTURE_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline refmon::SystemPtr load_fixture(const std::string& name) {
  return std::make_shared<const refmon::ISystem>(refmon::parse_system(read_text(fixture_path(name))));
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "sys_a.json",        "sys_b.json",          "sys_c.json",        "sys_d.json",       "diamond.json",
      "v_poset.json",      "three_free.json",     "dobbertin_chain.json", "mixed_chain.json", "sys_a_doubled.json"};
  return names;
}

}  // namespace support
