#include "excir/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "excir/dataset_io.hpp"
#include "excir/error.hpp"

namespace excir {

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * first_.size(), ' ');
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
    newline();
  }
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::close(char bracket) {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += bracket;
  return *this;
}

JsonWriter& JsonWriter::end_object() { return close('}'); }

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() { return close(']'); }

JsonWriter& JsonWriter::key(std::string_view k) {
  before_value();
  out_ += '"';
  out_ += json_escape(k);
  out_ += "\": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  if (!std::isfinite(v)) return null();
  before_value();
  out_ += format_double17(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  before_value();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
  before_value();
  out_ += '"';
  out_ += json_escape(v);
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

std::string JsonWriter::str() const {
  return first_.empty() && !out_.empty() ? out_ + '\n' : out_;
}

std::string_view to_string(DependenceMode mode) {
  switch (mode) {
    case DependenceMode::independent: return "independent";
    case DependenceMode::pairwise: return "pairwise";
    case DependenceMode::full: return "full";
  }
  return "pairwise";
}

DependenceMode parse_mode(std::string_view text) {
  if (text == "independent") return DependenceMode::independent;
  if (text == "pairwise") return DependenceMode::pairwise;
  if (text == "full") return DependenceMode::full;
  throw InputError("unknown mode '" + std::string(text) +
                   "' (independent, pairwise or full)");
}

bool ExplanationReport::mixed_weight_scales() const noexcept {
  return config.mode != DependenceMode::independent;
}

namespace {

void write_optional(JsonWriter& w, std::string_view k, const std::optional<double>& v) {
  if (v) w.key(k).value(*v);
}

}  // namespace

std::string to_json(const ExplanationReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(r.version);

  const auto& c = r.config;
  w.key("config").begin_object();
  w.key("data").value(c.data);
  w.key("output_col").value(c.output_col);
  w.key("model").value(c.model);
  w.key("mode").value(to_string(c.mode));
  w.key("bins").value(static_cast<std::uint64_t>(c.bins));
  w.key("n_prime").value(static_cast<std::uint64_t>(r.globals.n_prime));
  w.key("lambda").value(c.lambda);
  w.key("candidates").value(static_cast<std::uint64_t>(c.candidates));
  w.key("refine_iters").value(static_cast<std::uint64_t>(c.refine_iters));
  w.key("divergence").value(dimdist::to_string(c.divergence));
  w.key("epsilon").value(c.epsilon);
  w.key("miller_madow").value(c.miller_madow);
  w.key("seed").value(c.seed);
  w.key("mixed_weight_scales").value(r.mixed_weight_scales());
  w.end_object();

  const auto& g = r.globals;
  w.key("globals").begin_object();
  w.key("n").value(static_cast<std::uint64_t>(g.n));
  w.key("n_prime").value(static_cast<std::uint64_t>(g.n_prime));
  w.key("env_gap").value(g.env_gap);
  w.key("output_divergence_bits").value(g.output_divergence_bits);
  write_optional(w, "jmi_bits", g.jmi_bits);
  write_optional(w, "joint_mutual_impact", g.joint_mutual_impact);
  w.key("seed").value(g.seed);
  w.end_object();

  w.key("features").begin_array();
  for (const auto& f : r.features) {
    w.begin_object();
    w.key("name").value(f.name);
    w.key("kind").value(to_string(f.kind));
    w.key("direction").value(pcir::to_string(f.direction));
    w.key("pcir").value(f.pcir);
    write_optional(w, "mcir", f.mcir);
    w.key("entropy_bits").value(f.entropy_bits);
    write_optional(w, "cmmi_bits", f.cmmi_bits);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string to_plot_csv(const ExplanationReport& r) {
  std::ostringstream os;
  os << "name,kind,direction,pcir,mcir,entropy_bits,cmmi_bits\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& f : r.features) {
    os << f.name << ',' << to_string(f.kind) << ',' << pcir::to_string(f.direction)
       << ',' << format_double(f.pcir) << ',' << opt(f.mcir) << ','
       << format_double(f.entropy_bits) << ',' << opt(f.cmmi_bits) << '\n';
  }
  return os.str();
}

}  // namespace excir
