#include "excir/model.hpp"

#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sys/wait.h>

#include "excir/dataset_io.hpp"
#include "excir/error.hpp"

namespace excir {

RatioModel::RatioModel(std::vector<double> weights, std::size_t numerator_count)
    : weights_(std::move(weights)), m_(numerator_count) {
  if (weights_.size() < 2) {
    throw InputError("ratio model needs at least two features");
  }
  if (m_ < 1 || m_ >= weights_.size()) {
    throw InputError("ratio model split must satisfy 1 <= m < k");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InputError("ratio model weight is not finite");
  }
}

RatioModel::Parts RatioModel::parts(std::span<const double> row) const {
  if (row.size() != weights_.size()) {
    throw DimensionError("row has " + std::to_string(row.size()) +
                         " values, model expects " +
                         std::to_string(weights_.size()));
  }
  Parts p{0.0, 0.0};
  for (std::size_t i = 0; i < m_; ++i) p.numerator += weights_[i] * row[i];
  for (std::size_t i = m_; i < row.size(); ++i) {
    p.denominator += weights_[i] * row[i];
  }
  return p;
}

double RatioModel::predict(std::span<const double> row) const {
  const auto p = parts(row);
  if (p.denominator == 0.0) {
    throw SingularRowError("denominator features sum to zero");
  }
  return p.numerator / p.denominator;
}

ModelHandle parse_model_handle(const std::string& text,
                               const RatioModel* synthetic) {
  if (text == "synthetic") {
    if (!synthetic) {
      throw InputError("--model synthetic needs a ground-truth file with weights");
    }
    return SyntheticModel{*synthetic};
  }
  if (text.rfind("precomputed:", 0) == 0) {
    auto col = text.substr(std::strlen("precomputed:"));
    if (col.empty()) throw InputError("precomputed model needs a column name");
    return PrecomputedModel{std::move(col)};
  }
  if (text.rfind("exec:", 0) == 0) {
    auto cmd = text.substr(std::strlen("exec:"));
    if (cmd.empty()) throw InputError("exec model needs a command");
    return ExternalModel{std::move(cmd)};
  }
  throw InputError("unknown model '" + text +
                   "' (expected synthetic, precomputed:<col> or exec:<cmd>)");
}

namespace {

void check_rows(const Dataset& dataset, std::span<const std::size_t> rows) {
  for (auto r : rows) {
    if (r >= dataset.n()) {
      throw EvaluationError("row index out of range", r);
    }
  }
}

// Temporary file removed on scope exit.
class TempFile {
 public:
  TempFile() {
    auto tmpl = (std::filesystem::temp_directory_path() / "excir-rows-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    const int fd = ::mkstemp(buf.data());
    if (fd < 0) throw Error(std::string("mkstemp failed: ") + std::strerror(errno));
    ::close(fd);
    path_ = buf.data();
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

OutputVector evaluate_external(const ExternalModel& model,
                               const Dataset& dataset,
                               std::span<const std::size_t> rows) {
  TempFile input;
  {
    std::ofstream out(input.path());
    for (auto r : rows) {
      for (std::size_t c = 0; c < dataset.k(); ++c) {
        out << (c ? "," : "") << format_double(dataset.feature(c)[r]);
      }
      out << '\n';
    }
    if (!out) throw Error("cannot write model input file");
  }
  const std::string cmd = "(" + model.command + ") < " + shell_quote(input.path());
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    throw EvaluationError("cannot start model command", rows.empty() ? 0 : rows[0]);
  }
  std::vector<double> predictions;
  std::string line;
  char buf[4096];
  std::string pending;
  auto flush_line = [&](std::string_view text) {
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) {
      text.remove_suffix(1);
    }
    const std::size_t index = predictions.size();
    const std::size_t row = index < rows.size() ? rows[index] : index;
    if (index >= rows.size()) {
      ::pclose(pipe);
      throw EvaluationError("model produced more predictions than input rows", row);
    }
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
      ::pclose(pipe);
      throw EvaluationError("model produced a non-numeric prediction '" +
                                std::string(text) + "'",
                            row);
    }
    predictions.push_back(v);
  };
  while (std::fgets(buf, sizeof buf, pipe)) {
    pending += buf;
    if (!pending.empty() && pending.back() == '\n') {
      pending.pop_back();
      flush_line(pending);
      pending.clear();
    }
  }
  if (!pending.empty()) flush_line(pending);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::size_t row = predictions.size() < rows.size()
                                ? rows[predictions.size()]
                                : (rows.empty() ? 0 : rows.back());
    throw EvaluationError("model command failed", row);
  }
  if (predictions.size() != rows.size()) {
    throw EvaluationError("model produced " + std::to_string(predictions.size()) +
                              " predictions for " + std::to_string(rows.size()) +
                              " rows",
                          rows[predictions.size()]);
  }
  const auto kind = infer_kind(predictions);
  return OutputVector(std::move(predictions), kind);
}

}  // namespace

OutputVector evaluate_model(const ModelHandle& model, const Dataset& dataset,
                            std::span<const std::size_t> rows) {
  check_rows(dataset, rows);
  return std::visit(
      [&](const auto& m) -> OutputVector {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SyntheticModel>) {
          std::vector<double> out;
          out.reserve(rows.size());
          for (auto r : rows) {
            try {
              out.push_back(m.model.predict(dataset.row(r)));
            } catch (const SingularRowError& e) {
              throw EvaluationError(e.what(), r);
            } catch (const DimensionError& e) {
              throw EvaluationError(e.what(), r);
            }
          }
          return OutputVector(std::move(out));
        } else if constexpr (std::is_same_v<T, PrecomputedModel>) {
          std::span<const double> values;
          if (const auto* aux = dataset.find_auxiliary(m.column)) {
            values = aux->values;
          } else {
            throw InputError("precomputed prediction column '" + m.column +
                             "' not found");
          }
          std::vector<double> out;
          out.reserve(rows.size());
          for (auto r : rows) out.push_back(values[r]);
          // Typed on the whole column so subsets agree with the full run.
          const auto kind = infer_kind(values);
          return OutputVector(std::move(out), kind);
        } else {
          return evaluate_external(m, dataset, rows);
        }
      },
      model);
}

OutputVector evaluate_model(const ModelHandle& model, const Dataset& dataset) {
  std::vector<std::size_t> rows(dataset.n());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return evaluate_model(model, dataset, rows);
}

}  // namespace excir
