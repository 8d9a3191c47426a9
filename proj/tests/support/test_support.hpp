#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "excir/infotheory.hpp"
#include "excir/types.hpp"

namespace excir::testkit {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "excir") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> random_values(std::mt19937_64& gen, std::size_t n, double lo,
                                         double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

inline std::vector<double> random_codes(std::mt19937_64& gen, std::size_t n,
                                        std::size_t categories) {
  std::uniform_int_distribution<std::size_t> d(0, categories - 1);
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(d(gen));
  return v;
}

inline info::DiscretizedColumn discrete_column(const std::vector<double>& codes) {
  return info::discretize(codes, FeatureKind::discrete, 1);
}

inline Dataset make_dataset(const std::vector<std::vector<double>>& cols,
                            FeatureKind kind = FeatureKind::continuous) {
  std::vector<FeatureColumn> features;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    features.emplace_back("f" + std::to_string(i + 1), kind, cols[i]);
  }
  return Dataset(std::move(features));
}

}  // namespace excir::testkit
