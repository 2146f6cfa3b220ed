// dynamo_cli: map / tube / filament / frenet reports as CSV, JSON and SVG.
//
//   dynamo_cli --command map --map cat-shear --K 2 --out out/map
//   dynamo_cli --command tube --config tube.cfg --out out/tube
//   dynamo_cli --from-manifest out/tube/manifest.json --out out/tube-again
//
// Parameters are layered: defaults, then --config (key=value) or
// --from-manifest, then per-parameter flags.

#include "twistdyn/cli/runner.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace cli = twistdyn::cli;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw cli::UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stretch-twist dynamo toolkit: map, tube, filament and frenet reports"};

  std::string command;
  std::string out_dir;
  std::string formats = "csv,json,svg";
  std::string config_path;
  std::string manifest_path;
  app.add_option("--command", command, "map | tube | filament | frenet");
  app.add_option("--out", out_dir, "output directory")->required();
  auto* format_opt = app.add_option("--format", formats, "comma-separated subset of csv,json,svg");
  auto* config_opt = app.add_option("--config", config_path, "flat key=value parameter file");
  auto* manifest_opt = app.add_option("--from-manifest", manifest_path, "re-run from a manifest.json");
  config_opt->excludes(manifest_opt);

  std::set<std::string> keys;
  for (const auto& [cmd, defaults] : cli::parameter_defaults())
    for (const auto& [k, v] : defaults) keys.insert(k);
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& k : keys) flag_opts[k] = app.add_option("--" + k, flag_values[k], "parameter " + k);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInvalidInput;
  }

  try {
    std::map<std::string, std::string> overrides;
    std::set<std::string> fmt_set;
    if (!manifest_path.empty()) {
      const cli::ManifestInput m = cli::read_manifest(manifest_path);
      if (!command.empty() && command != m.command)
        throw cli::UsageError("--command conflicts with the manifest command " + m.command);
      command = m.command;
      overrides = m.parameters;
      fmt_set = m.formats;
    } else if (!config_path.empty()) {
      overrides = twistdyn::io::parse_key_value(read_text(config_path));
    }
    if (command.empty()) throw cli::UsageError("--command is required");
    if (format_opt->count() || manifest_path.empty()) fmt_set = cli::parse_formats(formats);

    for (const auto& [k, opt] : flag_opts)
      if (opt->count()) overrides[k] = flag_values[k];

    const cli::RunConfig cfg = cli::resolve_config(command, overrides, out_dir, fmt_set);
    return cli::run(cfg);
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInvalidInput;
  }
}
