#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "tar/table.hpp"

namespace tar::testing {

// The car sales table (Brand x Year, measure Sales).
inline Table car_sales() {
  Table t;
  t.id = "car";
  t.dim_names = {"Brand", "Year"};
  t.meta = {{"measure", "Sales"}};
  const char* brands[] = {"A", "B", "C"};
  const double values[3][3] = {{13, 14, 20}, {51, 49, 60}, {13, 20, 23}};
  for (int b = 0; b < 3; ++b) {
    for (int y = 0; y < 3; ++y) t.cells.push_back({{brands[b], std::to_string(2015 + y)}, values[b][y]});
  }
  return t;
}

// Parses "num/den".
inline double fraction(const std::string& s) {
  const auto slash = s.find('/');
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "tar") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace tar::testing
