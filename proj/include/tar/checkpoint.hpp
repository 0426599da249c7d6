#pragma once

// Parameter checkpoints: versioned JSON map from name to shape and row-major
// values. Doubles are written in shortest round-trip form, so save/load is bit-exact.

#include <fstream>
#include <string>

#include <json.hpp>

#include "tar/autodiff.hpp"
#include "tar/error.hpp"

namespace tar::nn {

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json to_json(const ParameterSet& params) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : params) {
    arr.push_back({{"name", p.name}, {"shape", {p.value.rows, p.value.cols}}, {"values", p.value.data}});
  }
  return {{"format", "tar-params"}, {"version", kCheckpointVersion}, {"params", arr}};
}

inline ParameterSet parameters_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "tar-params") throw DataError("checkpoint: unknown format");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) throw DataError("checkpoint: unsupported version " + std::to_string(version));
    ParameterSet params;
    for (const auto& p : j.at("params")) {
      const auto shape = p.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2) throw DataError("checkpoint: parameter shape must have rank 2");
      params.add(p.at("name").get<std::string>(), Matrix(shape[0], shape[1], p.at("values").get<std::vector<double>>()));
    }
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

inline void save_parameters(const ParameterSet& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot write file");
  out << to_json(params).dump() << '\n';
}

inline ParameterSet load_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  try {
    return parameters_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace tar::nn
