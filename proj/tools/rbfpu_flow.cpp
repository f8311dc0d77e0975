// rbfpu-flow: steady flow past a cylinder, from a key = value config file
// and/or flags. Flags override the file; RBFPU_OUTPUT_DIR overrides the
// file but not --output-dir.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rbfpu/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady viscous flow past circular, rounded-square and square cylinders (RBF partition of unity)"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.set_version_flag("--version", "rbfpu-flow 0.1.0");

  std::string config_path;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "key = value settings file")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", quiet, "no progress output");

  const std::map<std::string, std::string> help = {
      {"shape", "circle | square | rounded:<alpha>"},
      {"h", "node spacing in the transformed domain"},
      {"ell", "stretching factor of the compression map"},
      {"epsilon", "IMQ shape parameter"},
      {"patch_radius", "patch radius"},
      {"cluster_lambda", "node clustering at square corners"},
      {"re_schedule", "comma-separated increasing Reynolds numbers"},
      {"jacobian_mode", "reduced-dense | sparse-alternative"},
      {"output_dir", "directory for output files"},
      {"export", "comma list of metrics,surface,field,residuals (or all, none)"},
  };
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const std::string& key : rbfpu::config_keys()) {
    std::string flag = "--" + key;
    for (char& ch : flag) {
      if (ch == '_') ch = '-';
    }
    if (key == "re_schedule") flag = "--re," + flag;
    const auto it = help.find(key);
    flag_options[key] = app.add_option(flag, flag_values[key], it != help.end() ? it->second : "trust-region setting");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  rbfpu::RunConfig cfg;
  try {
    rbfpu::Settings settings;
    if (!config_path.empty()) settings = rbfpu::read_settings_file(config_path);
    if (const char* env = std::getenv("RBFPU_OUTPUT_DIR"); env && *env) settings.emplace_back("output_dir", env);
    for (const std::string& key : rbfpu::config_keys()) {
      if (flag_options[key]->count() > 0) settings.emplace_back(key, flag_values[key]);
    }
    cfg = rbfpu::config_from_settings(settings);
  } catch (const rbfpu::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const rbfpu::RunOutcome out = rbfpu::run(cfg, quiet ? nullptr : &std::cout);
  if (out.exit_code == 1) std::cerr << "error: " << out.message << '\n';
  if (!quiet) {
    for (const auto& p : out.written) std::cout << "wrote " << p.string() << '\n';
  }
  return out.exit_code;
}
