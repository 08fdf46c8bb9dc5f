#include <iostream>
#include <map>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "sdcluster_cli/commands.hpp"
#include "sdcluster_cli/run_config.hpp"

namespace {

// The config file is read before CLI11 parses so that flags override it.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.starts_with("--config=")) return std::string(a.substr(9));
  }
  return {};
}

std::string flag_name(const std::string& key) {
  std::string out = key;
  for (char& c : out)
    if (c == '_') c = '-';
  return out.size() == 1 ? "-" + out + ",--" + out : "--" + out;
}

const std::map<std::string, std::string> kDescriptions = {
    {"synth", "Write a bundled synthetic price panel"},
    {"ingest", "Convert long-format prices into a balanced log-return panel"},
    {"matrix", "Compute the pairwise SD coefficient matrix"},
    {"cluster", "Cluster assets by SD hierarchical or SD K-means"},
    {"select-k", "Choose K by SD silhouette and report SD-DBI"},
    {"rank", "Directional dominance tests between cluster centers"},
    {"refine", "Keep optimal clusters plus non-dominated stocks"},
    {"portfolio", "GMVP draw experiment and alpha/beta table"},
    {"heatmap", "Render the coefficient matrix in cluster order"},
    {"pipeline", "Run the two-stage workflow end to end"},
};

}  // namespace

int main(int argc, char** argv) {
  using namespace sdclust::cli;
  RunConfig cfg;
  try {
    if (const auto path = find_config_path(argc, argv); !path.empty()) cfg = load_run_config(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  CLI::App app{"Stochastic-dominance clustering of return series"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "key = value settings file");

  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : setting_keys()) {
    options[key] = app.add_option(flag_name(key), overrides[key], "override '" + key + "'");
  }
  for (const auto& name : command_names()) app.add_subcommand(name, kDescriptions.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) apply_setting(cfg, key, overrides[key]);
    run_command(app.get_subcommands().front()->get_name(), cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
