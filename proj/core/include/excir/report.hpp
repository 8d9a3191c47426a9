#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "excir/dimdist.hpp"
#include "excir/pcir.hpp"
#include "excir/types.hpp"

namespace excir {

// Minimal streaming JSON writer with two-space indentation. Doubles are
// written with 17 significant digits; non-finite doubles become null.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);

  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(unsigned v) { return value(static_cast<std::uint64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();

  // The document so far, followed by a newline once it is complete.
  std::string str() const;

 private:
  void before_value();
  void newline();
  JsonWriter& close(char bracket);

  std::string out_;
  std::vector<bool> first_;  // per open container: no element written yet
  bool after_key_ = false;
};

std::string json_escape(std::string_view s);
std::string format_double17(double v);

enum class DependenceMode { independent, pairwise, full };

std::string_view to_string(DependenceMode mode);
DependenceMode parse_mode(std::string_view text);

struct ExplainConfig {
  std::string data;  // echoed only
  std::string output_col;
  std::string model;  // model handle text; empty means the output column
  DependenceMode mode = DependenceMode::pairwise;
  std::size_t bins = 8;
  std::optional<std::size_t> n_prime;  // default min(n, 1000)
  double lambda = 1.0;
  std::size_t candidates = 8;
  std::size_t refine_iters = 200;
  dimdist::Divergence divergence = dimdist::Divergence::js;
  double epsilon = 0.0;
  bool miller_madow = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // not echoed: results do not depend on it
};

struct FeatureReport {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  pcir::Direction direction = pcir::Direction::numerator;
  double pcir = 0.0;
  std::optional<double> mcir;
  double entropy_bits = 0.0;
  std::optional<double> cmmi_bits;
};

struct ReportGlobals {
  std::size_t n = 0;
  std::size_t n_prime = 0;
  double env_gap = 0.0;
  // Infinite for KL without smoothing when the sample leaves the full
  // output support; serialized as null.
  double output_divergence_bits = 0.0;
  std::optional<double> jmi_bits;
  std::optional<double> joint_mutual_impact;
  std::uint64_t seed = 0;
};

struct ExplanationReport {
  std::string version = "1";
  ExplainConfig config;
  ReportGlobals globals;
  std::vector<FeatureReport> features;

  // Dependent-mode reports carry MCIR next to eta; the two live on
  // different scales and are not commensurable.
  bool mixed_weight_scales() const noexcept;
};

// {version, config, globals, features}; byte-identical for identical reports.
std::string to_json(const ExplanationReport& report);

// Plot-ready table: one row per feature with name, kind, direction, pcir,
// mcir, entropy_bits, cmmi_bits (empty cells for absent values).
std::string to_plot_csv(const ExplanationReport& report);

}  // namespace excir
