#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tar/error.hpp"

namespace tar {

inline std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename Range, typename ToJson>
void write_jsonl(const std::string& path, const Range& records, ToJson&& to_json_fn) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot write file");
  for (const auto& r : records) out << to_json_fn(r).dump() << '\n';
}

}  // namespace tar
