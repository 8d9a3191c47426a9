#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "excir/dataset_io.hpp"
#include "excir/dimdist.hpp"
#include "excir/envmatch.hpp"
#include "excir/error.hpp"
#include "excir/infotheory.hpp"
#include "excir/mcir.hpp"
#include "excir/pcir.hpp"
#include "excir/pipeline.hpp"
#include "excir/report.hpp"
#include "excir/synthgen.hpp"
#include "inputs.hpp"
#include "log.hpp"

namespace excir::cli {
namespace {

namespace fs = std::filesystem;

unsigned default_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

void add_config_flag(CLI::App& cmd) {
  // Consumed by main before parsing; declared here for --help.
  cmd.add_option("--config", "File of 'key = value' defaults (flags win)");
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

void write_divergence(JsonWriter& w, std::string_view key,
                      const dimdist::DivergenceValue& v) {
  w.key(key).value(v.score());
}

// ---------------------------------------------------------------------------

struct SearchArgs {
  std::optional<std::size_t> n_prime;
  double lambda = 1.0;
  std::size_t candidates = 8;
  std::size_t refine_iters = 200;
  std::string divergence = "js";
  std::size_t bins = 8;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
};

void add_search_options(CLI::App& cmd, SearchArgs& a) {
  cmd.add_option("--n-prime", a.n_prime, "Lightweight sample size (default min(n, 1000))");
  cmd.add_option("--lambda", a.lambda, "Weight of the environment gap in the risk")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--candidates", a.candidates, "Seeded search restarts")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--refine-iters", a.refine_iters, "Swap proposals per restart");
  cmd.add_option("--divergence", a.divergence, "kl or js")
      ->check(CLI::IsMember({"kl", "js"}));
  cmd.add_option("--bins", a.bins, "Histogram / discretization bins")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--epsilon", a.epsilon, "KL smoothing for empty cells")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--seed", a.seed, "Seed for every random choice");
  cmd.add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
}

envmatch::RiskSearchConfig risk_config(const SearchArgs& a, std::size_t n) {
  envmatch::RiskSearchConfig c;
  c.n_prime = a.n_prime.value_or(std::min<std::size_t>(n, 1000));
  c.lambda = a.lambda;
  c.candidates = a.candidates;
  c.refine_iters = a.refine_iters;
  c.divergence = dimdist::parse_divergence(a.divergence);
  c.bins = a.bins;
  c.epsilon = a.epsilon;
  c.seed = a.seed;
  c.threads = a.threads;
  return c;
}

// ---------------------------------------------------------------------------

struct ExplainArgs {
  InputArgs in;
  SearchArgs search;
  std::string mode = "pairwise";
  bool miller_madow = false;
  std::string out_dir = ".";
  bool plot = false;
};

void run_explain(const ExplainArgs& a) {
  const auto inputs = load_inputs(a.in);
  ExplainConfig cfg;
  cfg.data = a.in.data;
  cfg.output_col = a.in.output_col;
  cfg.model = a.in.model;
  cfg.mode = parse_mode(a.mode);
  cfg.bins = a.search.bins;
  cfg.n_prime = a.search.n_prime;
  cfg.lambda = a.search.lambda;
  cfg.candidates = a.search.candidates;
  cfg.refine_iters = a.search.refine_iters;
  cfg.divergence = dimdist::parse_divergence(a.search.divergence);
  cfg.epsilon = a.search.epsilon;
  cfg.miller_madow = a.miller_madow;
  cfg.seed = a.search.seed;
  cfg.threads = a.search.threads;

  const auto report = explain(inputs.dataset, inputs.output, cfg);
  const fs::path dir = a.out_dir;
  write_file(dir / "report.json", to_json(report));
  log::info("wrote " + (dir / "report.json").string());
  if (a.plot) {
    write_file(dir / "report.csv", to_plot_csv(report));
    log::info("wrote " + (dir / "report.csv").string());
  }
  if (report.mixed_weight_scales()) {
    log::debug("report mixes MCIR and eta weights; they are not on one scale");
  }
}

// ---------------------------------------------------------------------------

struct EnvmatchArgs {
  InputArgs in;
  SearchArgs search;
  std::string objective = "risk";
  std::string out;
  std::string sample_out;
};

void run_envmatch(const EnvmatchArgs& a) {
  const auto inputs = load_inputs(a.in);
  const auto cfg = risk_config(a.search, inputs.dataset.n());
  JsonWriter w;
  w.begin_object();
  envmatch::EnvGapResult gap;
  if (a.objective == "gap") {
    gap = envmatch::select_lightweight_sample(inputs.dataset, inputs.output, cfg);
  } else {
    const auto risk = envmatch::risk_minimize(inputs.dataset, inputs.output, cfg);
    gap = risk.sample;
    write_divergence(w, "loss_bits", risk.loss);
    w.key("objective").value(risk.objective);
    w.key("candidates_evaluated").value(static_cast<std::uint64_t>(risk.candidates_evaluated));
  }
  w.key("d2_final").value(gap.d2_final);
  w.key("d2_prime_final").value(gap.d2_prime_final);
  w.key("gap").value(gap.gap);
  w.key("selected_rows").begin_array();
  for (auto r : gap.selected_rows) w.value(static_cast<std::uint64_t>(r));
  w.end_array();
  w.end_object();
  emit(a.out, w.str());
  if (!a.sample_out.empty()) {
    const Dataset sample = inputs.dataset.subset(gap.selected_rows)
                               .with_output(inputs.output.subset(gap.selected_rows));
    std::ostringstream os;
    write_dataset(os, sample, a.in.output_col.empty() ? "y" : a.in.output_col);
    write_file(a.sample_out, os.str());
  }
}

// ---------------------------------------------------------------------------

struct DimdistArgs {
  std::string mu;
  std::string delta;
  std::string divergence = "js";
  std::size_t bins = 32;
  double epsilon = 0.0;
  std::size_t restarts = 64;
  std::size_t refine_iters = 200;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
  std::string out;
};

dimdist::EmpiricalMeasure load_cloud(const std::string& path) {
  const auto table = load_numeric_csv(path);
  if (table.rows() == 0) throw InputError("'" + path + "' has no points");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(table.rows()),
                      static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    for (std::size_t r = 0; r < table.rows(); ++r) {
      pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = table.columns[c][r];
    }
  }
  return dimdist::EmpiricalMeasure(std::move(pts));
}

void write_map(JsonWriter& w, const dimdist::OrthonormalMap& map) {
  w.begin_object();
  w.key("P").begin_array();
  for (Eigen::Index r = 0; r < map.P().rows(); ++r) {
    w.begin_array();
    for (Eigen::Index c = 0; c < map.P().cols(); ++c) w.value(map.P()(r, c));
    w.end_array();
  }
  w.end_array();
  w.key("b").begin_array();
  for (Eigen::Index i = 0; i < map.b().size(); ++i) w.value(map.b()(i));
  w.end_array();
  w.end_object();
}

void run_dimdist(const DimdistArgs& a) {
  const auto mu = load_cloud(a.mu);
  const auto delta = load_cloud(a.delta);
  dimdist::DistanceConfig cfg;
  cfg.kind = dimdist::parse_divergence(a.divergence);
  cfg.bins = a.bins;
  cfg.epsilon = a.epsilon;
  cfg.search = {a.restarts, a.refine_iters, a.seed, a.threads};
  const auto hat = dimdist::distance_hat(mu, delta, cfg);
  JsonWriter w;
  w.begin_object();
  w.key("divergence").value(a.divergence);
  w.key("bins").value(static_cast<std::uint64_t>(a.bins));
  w.key("mu_dim").value(static_cast<std::uint64_t>(mu.dim()));
  w.key("delta_dim").value(static_cast<std::uint64_t>(delta.dim()));
  write_divergence(w, "distance_bits", hat.value);
  write_divergence(w, "projection_bits", hat.projection.value);
  write_divergence(w, "embedding_bits", hat.embedding.value);
  w.key("disagreement_bits").value(hat.disagreement);
  w.key("projection_map");
  write_map(w, hat.projection.map);
  w.key("embedding_map");
  write_map(w, hat.embedding.map);
  w.end_object();
  emit(a.out, w.str());
}

// ---------------------------------------------------------------------------

struct PcirArgs {
  InputArgs in;
  std::string out;
};

void run_pcir(const PcirArgs& a) {
  const auto inputs = load_inputs(a.in);
  std::ostringstream os;
  os << "feature,eta,f_mean,y_mean,joint_mean,direction,direction_tie\n";
  std::string bad;
  for (const auto& f : inputs.dataset.features()) {
    try {
      const auto s = pcir::pcir(f, inputs.output);
      const auto dir = pcir::assign_direction(f.values(), inputs.output.values());
      os << f.name() << ',' << format_double(s.eta) << ',' << format_double(s.means.feature)
         << ',' << format_double(s.means.output) << ',' << format_double(s.means.joint)
         << ',' << pcir::to_string(dir.direction) << ',' << (dir.tie ? 1 : 0) << '\n';
      if (dir.tie) log::warn("feature " + f.name() + ": zero covariance, numerator by convention");
    } catch (const DegenerateInformationError&) {
      bad += (bad.empty() ? "" : ", ") + f.name();
    }
  }
  if (!bad.empty()) throw DegenerateInformationError("degenerate pcir (0/0) for features: " + bad);
  emit(a.out, os.str());
}

// ---------------------------------------------------------------------------

struct McirArgs {
  InputArgs in;
  std::string mode = "pairwise";
  std::size_t bins = 8;
  bool miller_madow = false;
  unsigned threads = default_threads();
  std::string out;
};

void run_mcir(const McirArgs& a) {
  const auto inputs = load_inputs(a.in);
  const auto& ds = inputs.dataset;
  info::EstimatorOptions est;
  est.miller_madow = a.miller_madow;
  const auto y = info::discretize(inputs.output, a.bins);
  std::vector<info::DiscretizedColumn> cols;
  for (const auto& f : ds.features()) cols.push_back(info::discretize(f, a.bins));
  info::ColumnSet all;
  for (const auto& c : cols) all.push_back(&c);
  const bool pairwise = a.mode == "pairwise";
  std::vector<std::size_t> partner;
  if (pairwise) partner = mcir::pair_partners(all, est, a.threads);

  std::ostringstream os;
  os << "feature,partner,cmmi_bits,jmi_bits,mcir,joint_mutual_impact\n";
  std::string bad;
  for (std::size_t i = 0; i < ds.k(); ++i) {
    try {
      const auto s = pairwise ? mcir::mcir_pair(y, cols[i], cols[partner[i]], est)
                              : mcir::mcir_full(y, i, all, est);
      os << ds.feature(i).name() << ',' << (pairwise ? ds.feature(partner[i]).name() : "")
         << ',' << format_double(s.cmmi_bits) << ',' << format_double(s.jmi_bits) << ','
         << format_double(s.mcir) << ',' << format_double(s.joint_mutual_impact) << '\n';
    } catch (const DegenerateInformationError&) {
      bad += (bad.empty() ? "" : ", ") + ds.feature(i).name();
    }
  }
  if (!bad.empty()) throw DegenerateInformationError("degenerate mcir (0/0) for features: " + bad);
  emit(a.out, os.str());
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string preset;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double noise = 0.1;
  std::string out;
};

void run_synth(const SynthArgs& a) {
  const auto data = synth::preset(a.preset, a.n, a.seed, a.noise);
  std::ostringstream os;
  write_dataset(os, data.dataset, "y");
  write_file(a.out, os.str());
  fs::path truth = a.out;
  truth.replace_extension(".truth.json");
  write_file(truth, synth::truth_to_json(data.truth));
  log::info("wrote " + a.out + " and " + truth.string());
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> n_primes;
  std::size_t n = 10000;
  std::size_t k = 8;
  std::size_t bins = 8;
  std::string mode = "pairwise";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

void run_bench(const BenchArgs& a) {
  if (a.k < 2) throw InputError("bench needs k >= 2");
  synth::SyntheticSpec spec;
  spec.k = a.k;
  spec.n = a.n;
  spec.m = a.k / 2;
  spec.seed = a.seed;
  for (std::size_t i = 0; i < a.k; ++i) spec.betas.push_back(static_cast<double>(i + 1));
  spec.presence_p.assign(a.k, 0.8);
  spec.distributions.assign(a.k, synth::Uniform{0.5, 1.5});
  const auto data = synth::generate(spec);

  std::ostringstream os;
  os << "n_prime,seconds\n";
  for (std::size_t np : a.n_primes) {
    ExplainConfig cfg;
    cfg.mode = parse_mode(a.mode);
    cfg.bins = a.bins;
    cfg.n_prime = np;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = explain(data.dataset, *data.dataset.output(), cfg);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    os << np << ',' << format_double(dt.count()) << '\n';
    log::info("n'=" + std::to_string(np) + " gap=" + format_double(report.globals.env_gap));
  }
  emit(a.out, os.str());
}

template <typename Args>
std::shared_ptr<Args> make_args() {
  return std::make_shared<Args>();
}

}  // namespace

void add_explain(CLI::App& app) {
  auto a = make_args<ExplainArgs>();
  auto* cmd = app.add_subcommand("explain", "Attribute every feature and write report.json");
  add_input_options(*cmd, a->in);
  add_search_options(*cmd, a->search);
  cmd->add_option("--mode", a->mode, "independent, pairwise or full")
      ->check(CLI::IsMember({"independent", "pairwise", "full"}));
  cmd->add_flag("--miller-madow", a->miller_madow, "Bias-correct entropies");
  cmd->add_option("--out-dir", a->out_dir, "Directory for report files");
  cmd->add_flag("--emit-plot-data", a->plot, "Also write report.csv");
  add_config_flag(*cmd);
  cmd->callback([a] { run_explain(*a); });
}

void add_envmatch(CLI::App& app) {
  auto a = make_args<EnvmatchArgs>();
  auto* cmd = app.add_subcommand("envmatch", "Choose a lightweight sample");
  add_input_options(*cmd, a->in);
  add_search_options(*cmd, a->search);
  cmd->add_option("--objective", a->objective,
                  "gap (environment gap only) or risk (loss + lambda * gap)")
      ->check(CLI::IsMember({"gap", "risk"}));
  cmd->add_option("--out", a->out, "JSON summary path (default stdout)");
  cmd->add_option("--sample-out", a->sample_out, "Write the selected rows as CSV");
  add_config_flag(*cmd);
  cmd->callback([a] { run_envmatch(*a); });
}

void add_dimdist(CLI::App& app) {
  auto a = make_args<DimdistArgs>();
  auto* cmd = app.add_subcommand("dimdist", "Distance between point clouds of different dimension");
  cmd->add_option("--mu", a->mu, "CSV of the lower-dimensional points")->required();
  cmd->add_option("--delta", a->delta, "CSV of the higher-dimensional points")->required();
  cmd->add_option("--divergence", a->divergence, "kl or js")
      ->check(CLI::IsMember({"kl", "js"}));
  cmd->add_option("--bins", a->bins, "Bins per dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", a->epsilon, "KL smoothing")->check(CLI::NonNegativeNumber);
  cmd->add_option("--restarts", a->restarts, "Random orthonormal starts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--refine-iters", a->refine_iters, "Rotation steps per start");
  cmd->add_option("--seed", a->seed, "Search seed");
  cmd->add_option("--threads", a->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a->out, "JSON output path (default stdout)");
  add_config_flag(*cmd);
  cmd->callback([a] { run_dimdist(*a); });
}

void add_pcir(CLI::App& app) {
  auto a = make_args<PcirArgs>();
  auto* cmd = app.add_subcommand("pcir", "Correlation-ratio score of every feature");
  add_input_options(*cmd, a->in);
  cmd->add_option("--out", a->out, "CSV output path (default stdout)");
  add_config_flag(*cmd);
  cmd->callback([a] { run_pcir(*a); });
}

void add_mcir(CLI::App& app) {
  auto a = make_args<McirArgs>();
  auto* cmd = app.add_subcommand("mcir", "Information-theoretic score of every feature");
  add_input_options(*cmd, a->in);
  cmd->add_option("--mode", a->mode, "pairwise or full")
      ->check(CLI::IsMember({"pairwise", "full"}));
  cmd->add_option("--bins", a->bins, "Discretization bins")->check(CLI::PositiveNumber);
  cmd->add_flag("--miller-madow", a->miller_madow, "Bias-correct entropies");
  cmd->add_option("--threads", a->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a->out, "CSV output path (default stdout)");
  add_config_flag(*cmd);
  cmd->callback([a] { run_mcir(*a); });
}

void add_synth(CLI::App& app) {
  auto a = make_args<SynthArgs>();
  auto* cmd = app.add_subcommand("synth", "Write a synthetic fixture and its ground truth");
  cmd->add_option("--preset", a->preset, "xor, independent_k4 or chain_dependent_k3")
      ->required();
  cmd->add_option("--n", a->n, "Rows")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a->seed, "Generator seed");
  cmd->add_option("--noise", a->noise, "Copy noise for chain_dependent_k3")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--out", a->out, "CSV path; the truth goes next to it")->required();
  add_config_flag(*cmd);
  cmd->callback([a] { run_synth(*a); });
}

void add_bench(CLI::App& app) {
  auto a = make_args<BenchArgs>();
  auto* cmd = app.add_subcommand("bench", "Wall time of explain against n'");
  cmd->add_option("--n-prime", a->n_primes, "Comma-separated sample sizes")
      ->required()
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmd->add_option("--n", a->n, "Rows of the generated dataset")->check(CLI::PositiveNumber);
  cmd->add_option("--k", a->k, "Features of the generated dataset");
  cmd->add_option("--bins", a->bins, "Discretization bins")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", a->mode, "independent, pairwise or full")
      ->check(CLI::IsMember({"independent", "pairwise", "full"}));
  cmd->add_option("--seed", a->seed, "Seed");
  cmd->add_option("--threads", a->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a->out, "CSV output path (default stdout)");
  add_config_flag(*cmd);
  cmd->callback([a] { run_bench(*a); });
}

}  // namespace excir::cli
