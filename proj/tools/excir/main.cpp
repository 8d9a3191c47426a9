#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "excir/error.hpp"
#include "log.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitOther = 1;

// Pulls "--config PATH" / "--config=PATH" out of args and returns the file's
// entries as "--key=value" arguments. They go in front of the command line so
// the take-last policy lets explicit flags win.
std::vector<std::string> config_args(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return {};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError& e) {
    throw excir::InputError(std::string("config file: ") + e.what());
  }
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (!item.parents.empty()) {
      throw excir::InputError("config file '" + path + "' must be flat (no sections)");
    }
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      value += (i ? "," : "") + item.inputs[i];
    }
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  excir::cli::log::init_from_env();

  CLI::App app{"excir: feature attribution by correlation and information ratios", "excir"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", "excir 0.1.0");
  excir::cli::add_explain(app);
  excir::cli::add_envmatch(app);
  excir::cli::add_dimdist(app);
  excir::cli::add_pcir(app);
  excir::cli::add_mcir(app);
  excir::cli::add_synth(app);
  excir::cli::add_bench(app);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty()) {
      auto extra = config_args(args);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  } catch (const excir::InputError& e) {
    excir::cli::log::error(e.what());
    return kExitInput;
  } catch (const excir::DegenerateInformationError& e) {
    excir::cli::log::error(e.what());
    return kExitDegenerate;
  } catch (const std::exception& e) {
    excir::cli::log::error(e.what());
    return kExitOther;
  }
  return 0;
}
