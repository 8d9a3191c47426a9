#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "excir/model.hpp"
#include "excir/types.hpp"

namespace CLI {
class App;
}

namespace excir::cli {

// Flags shared by every subcommand that reads a dataset.
struct InputArgs {
  std::string data;
  std::string output_col;
  std::string model;  // synthetic | precomputed:<col> | exec:<cmd>
  std::string truth;  // ground-truth JSON, needed by --model synthetic
  std::vector<std::string> kinds;  // name=discrete|continuous
  std::size_t max_categories = 32;
};

void add_input_options(CLI::App& cmd, InputArgs& args);

struct Inputs {
  Dataset dataset;
  OutputVector output;
};

// Loads the dataset and materializes the output column: the model's
// predictions when --model is given, the --output-col column otherwise.
Inputs load_inputs(const InputArgs& args);

// Weights and split from a ground-truth sidecar written by `excir synth`.
RatioModel load_truth_model(const std::string& path);

}  // namespace excir::cli
