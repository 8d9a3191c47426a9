#include "excir/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "excir/error.hpp"

namespace excir {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no,
                  std::string_view column) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw InputError("non-numeric cell '" + std::string(cell) + "' at line " +
                     std::to_string(line_no) + ", column '" +
                     std::string(column) + "'");
  }
  return value;
}

}  // namespace

NumericTable read_numeric_csv(std::istream& in) {
  NumericTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    // Tolerate a UTF-8 byte order mark on the header.
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      for (auto c : cells) {
        if (c.empty()) {
          throw InputError("empty column name in header");
        }
        table.header.emplace_back(c);
      }
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw InputError("ragged row at line " + std::to_string(line_no) +
                       ": expected " + std::to_string(table.header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      table.columns[c].push_back(parse_cell(cells[c], line_no, table.header[c]));
    }
  }
  if (!have_header) throw InputError("empty file: no header row");
  if (table.rows() == 0) throw InputError("file has a header but no data rows");
  return table;
}

NumericTable load_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_numeric_csv(in);
}

Dataset read_dataset(std::istream& in, const LoadOptions& options) {
  NumericTable table = read_numeric_csv(in);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (!index.emplace(table.header[c], c).second) {
      throw InputError("duplicate column '" + table.header[c] + "'");
    }
  }
  auto require = [&](const std::string& name) {
    if (!index.contains(name)) {
      throw InputError("missing column '" + name + "'");
    }
    return index.at(name);
  };

  std::vector<bool> claimed(table.header.size(), false);
  std::optional<OutputVector> output;
  if (options.output_col) {
    const auto c = require(*options.output_col);
    claimed[c] = true;
    FeatureKind kind = infer_kind(table.columns[c], options.max_categories);
    if (auto it = options.kind_hints.find(*options.output_col);
        it != options.kind_hints.end()) {
      kind = it->second;
    }
    output = OutputVector(table.columns[c], kind);
  }
  std::vector<AuxiliaryColumn> aux;
  for (const auto& name : options.auxiliary_cols) {
    const auto c = require(name);
    if (claimed[c]) continue;
    claimed[c] = true;
    aux.push_back({name, table.columns[c]});
  }
  for (const auto& [name, kind] : options.kind_hints) require(name);

  std::vector<FeatureColumn> features;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (claimed[c]) continue;
    const auto& name = table.header[c];
    FeatureKind kind = infer_kind(table.columns[c], options.max_categories);
    if (auto it = options.kind_hints.find(name); it != options.kind_hints.end()) {
      kind = it->second;
    }
    features.emplace_back(name, kind, std::move(table.columns[c]));
  }
  if (features.empty()) throw InputError("no feature columns left after selecting the output");
  return Dataset(std::move(features), std::move(output), std::move(aux));
}

Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_dataset(in, options);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_dataset(std::ostream& out, const Dataset& dataset,
                   const std::string& output_name) {
  std::vector<std::span<const double>> cols;
  bool first = true;
  auto header = [&](const std::string& name) {
    out << (first ? "" : ",") << name;
    first = false;
  };
  for (const auto& f : dataset.features()) {
    header(f.name());
    cols.push_back(f.values());
  }
  if (dataset.output()) {
    header(output_name);
    cols.push_back(dataset.output()->values());
  }
  for (const auto& a : dataset.auxiliary()) {
    header(a.name);
    cols.push_back(a.values);
  }
  out << '\n';
  for (std::size_t r = 0; r < dataset.n(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out << (c ? "," : "") << format_double(cols[c][r]);
    }
    out << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset,
                   const std::string& output_name) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_dataset(out, dataset, output_name);
}

}  // namespace excir
