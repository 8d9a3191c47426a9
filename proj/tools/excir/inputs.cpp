#include "inputs.hpp"

#include <fstream>

#include "CLI11.hpp"
#include "excir/dataset_io.hpp"
#include "excir/error.hpp"
#include "json.hpp"
#include "log.hpp"

namespace excir::cli {

void add_input_options(CLI::App& cmd, InputArgs& args) {
  cmd.add_option("--data", args.data, "CSV file with a header row")->required();
  cmd.add_option("--output-col", args.output_col, "Column holding the output");
  cmd.add_option("--model", args.model,
                 "Model: synthetic, precomputed:<col> or exec:<cmd>");
  cmd.add_option("--truth", args.truth, "Ground-truth JSON for --model synthetic");
  cmd.add_option("--kind", args.kinds, "Kind hint, name=discrete|continuous")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmd.add_option("--max-categories", args.max_categories,
                 "Auto-typing threshold for integer columns");
}

RatioModel load_truth_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ground-truth file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    return RatioModel(j.at("betas").get<std::vector<double>>(),
                      j.at("m").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad ground-truth file '" + path + "': " + e.what());
  }
}

Inputs load_inputs(const InputArgs& args) {
  if (args.output_col.empty() && args.model.empty()) {
    throw InputError("no output: pass --output-col or --model");
  }
  LoadOptions opts;
  opts.max_categories = args.max_categories;
  if (!args.output_col.empty()) opts.output_col = args.output_col;
  for (const auto& hint : args.kinds) {
    const auto eq = hint.find('=');
    if (eq == std::string::npos) {
      throw InputError("kind hint '" + hint + "' is not name=discrete|continuous");
    }
    const auto kind = hint.substr(eq + 1);
    if (kind != "discrete" && kind != "continuous") {
      throw InputError("unknown kind '" + kind + "' in hint '" + hint + "'");
    }
    opts.kind_hints[hint.substr(0, eq)] =
        kind == "discrete" ? FeatureKind::discrete : FeatureKind::continuous;
  }
  if (args.model.rfind("precomputed:", 0) == 0) {
    opts.auxiliary_cols.push_back(args.model.substr(std::string("precomputed:").size()));
  }
  Dataset dataset = load_dataset(args.data, opts);
  log::info("loaded " + args.data + ": n=" + std::to_string(dataset.n()) +
            ", k=" + std::to_string(dataset.k()));

  if (args.model.empty()) {
    return {dataset, *dataset.output()};
  }
  std::optional<RatioModel> truth;
  if (args.model == "synthetic") {
    if (args.truth.empty()) throw InputError("--model synthetic needs --truth");
    truth = load_truth_model(args.truth);
  }
  const auto handle = parse_model_handle(args.model, truth ? &*truth : nullptr);
  OutputVector y = evaluate_model(handle, dataset);
  return {std::move(dataset), std::move(y)};
}

}  // namespace excir::cli
