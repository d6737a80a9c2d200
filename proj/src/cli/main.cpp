#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "presets.hpp"

using namespace shufflemix::cli;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixing-time experiments for biased random-to-top shuffles"};
  std::string preset, config_path, family, out_dir;
  std::size_t n = 0, k = 0, samples = 0;
  std::uint64_t seed = 0;
  app.add_option("preset", preset, "one of: " + join(preset_names()))->required();
  auto* o_config = app.add_option("--config", config_path, "flat key = value file");
  auto* o_n = app.add_option("--n", n, "deck size");
  auto* o_k = app.add_option("--k", k, "window size");
  auto* o_family = app.add_option("--family", family, "weight family a|b|c|d");
  auto* o_samples = app.add_option("--samples", samples, "Monte Carlo sample count");
  auto* o_seed = app.add_option("--seed", seed, "master seed (Monte Carlo presets)");
  auto* o_out = app.add_option("--out", out_dir, std::string("output directory (overrides ") + kOutDirEnv + ")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ExperimentConfig file_cfg;
    if (*o_config) file_cfg = parse_config_file(config_path);
    ExperimentConfig flags;
    flags.preset = preset;
    if (*o_n) flags.n = n;
    if (*o_k) flags.k = k;
    if (*o_family) {
      if (family.size() != 1) throw ConfigError("--family takes one of a, b, c, d");
      flags.family = family[0];
    }
    if (*o_samples) flags.samples = samples;
    if (*o_seed) flags.seed = seed;
    ExperimentConfig cfg = merge(file_cfg, flags);
    if (!file_cfg.preset.empty() && file_cfg.preset != preset)
      throw ConfigError("config file names preset '" + file_cfg.preset + "' but the command line asks for '" + preset +
                        "'");

    std::string dir = ".";
    if (cfg.out_dir) dir = *cfg.out_dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) dir = env;
    if (*o_out) dir = out_dir;
    cfg.out_dir = dir;

    const Report rep = run_preset(cfg);
    rep.write(dir);
    if (!rep.passed()) {
      for (const auto& f : rep.failures()) std::cerr << "FAIL " << f << '\n';
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "shufflemix: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "shufflemix: " << e.what() << '\n';
    return 1;
  }
}
