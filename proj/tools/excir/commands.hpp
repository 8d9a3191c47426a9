#pragma once

namespace CLI {
class App;
}

namespace excir::cli {

// Each adds one subcommand whose callback does the work. Library errors
// propagate out of CLI::App::parse for main to map onto exit codes.
void add_explain(CLI::App& app);
void add_envmatch(CLI::App& app);
void add_dimdist(CLI::App& app);
void add_pcir(CLI::App& app);
void add_mcir(CLI::App& app);
void add_synth(CLI::App& app);
void add_bench(CLI::App& app);

}  // namespace excir::cli
