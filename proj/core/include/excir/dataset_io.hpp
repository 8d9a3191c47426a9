#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "excir/types.hpp"

namespace excir {

struct LoadOptions {
  // Column to load as the OutputVector; excluded from the features.
  std::optional<std::string> output_col;
  // Per-column kind overrides. Every named column must exist.
  std::map<std::string, FeatureKind> kind_hints;
  // Columns kept as AuxiliaryColumn instead of features.
  std::vector<std::string> auxiliary_cols;
  // Auto-typing threshold for unhinted columns.
  std::size_t max_categories = 32;
};

// Reads a header-first, comma-separated numeric CSV ('.' decimal separator).
Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& options = {});
Dataset read_dataset(std::istream& in, const LoadOptions& options = {});

// Writes features, then the output column (named `output_name`), then any
// auxiliary columns. Values use the shortest representation that parses
// back to the same double.
void write_dataset(const std::filesystem::path& path, const Dataset& dataset,
                   const std::string& output_name = "y");
void write_dataset(std::ostream& out, const Dataset& dataset,
                   const std::string& output_name = "y");

// Raw numeric table: a header and rows of equal width. Used for point clouds.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

NumericTable read_numeric_csv(std::istream& in);
NumericTable load_numeric_csv(const std::filesystem::path& path);

// Shortest round-trip decimal form of a finite double.
std::string format_double(double value);

}  // namespace excir
