// Command-line front end. Links the public C interface only; every
// experiment lives behind the shared library.
#include <cstdio>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "fhn/fhn.h"

namespace {

using RunFn = int (*)(const fhn_config*, const char*);

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::string seed;    // kept textual; forwarded to the config layer
  std::string threads;
};

void add_common(CLI::App* cmd, CommonArgs& args,
                const std::string& default_out) {
  cmd->add_option("--config", args.config_path,
                  "Config file (key = value with [section] headers)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", args.preset,
                  std::string("Parameter preset: ") + fhn_preset_names());
  cmd->add_option("--seed", args.seed, "Base seed for all random streams")
      ->check(CLI::Number);
  cmd->add_option("--threads", args.threads,
                  "Worker cap (0 = all available cores)")
      ->check(CLI::Number);
  cmd->add_option("--out", args.out_dir, "Output directory")
      ->default_val(default_out);
}

int execute(const CommonArgs& args, RunFn run) {
  fhn_config* cfg = nullptr;
  int rc;
  if (!args.config_path.empty())
    rc = fhn_config_load(args.config_path.c_str(),
                         args.preset.empty() ? nullptr : args.preset.c_str(),
                         &cfg);
  else {
    rc = fhn_config_create(&cfg);
    if (rc == FHN_OK && !args.preset.empty())
      rc = fhn_config_set(cfg, "preset", args.preset.c_str());
  }
  if (rc == FHN_OK && !args.seed.empty())
    rc = fhn_config_set(cfg, "seed", args.seed.c_str());
  if (rc == FHN_OK && !args.threads.empty())
    rc = fhn_config_set(cfg, "threads", args.threads.c_str());
  if (rc == FHN_OK) rc = run(cfg, args.out_dir.c_str());
  if (rc != FHN_OK)
    std::fprintf(stderr, "error: %s\n", fhn_last_error());
  else
    std::printf("outputs written to %s (see manifest.json)\n",
                args.out_dir.c_str());
  fhn_config_free(cfg);
  return rc;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic neuron-network toolkit: interacting ensembles, "
               "their mean-field limit, stationary states, and spectra"};
  app.set_version_flag("--version", fhn_version());
  app.require_subcommand(1);

  const struct {
    const char* name;
    const char* help;
    RunFn run;
  } commands[] = {
      {"simulate-particles",
       "Integrate the interacting ensemble and record empirical moments",
       &fhn_run_simulate_particles},
      {"solve-pde",
       "Integrate the mean-field equation with self-consistent coupling",
       &fhn_run_solve_pde},
      {"find-stationary",
       "Locate self-consistent stationary densities from several seeds",
       &fhn_run_find_stationary},
      {"spectrum",
       "Rightmost eigenvalues of the linearization at a stationary density",
       &fhn_run_spectrum},
      {"chaos-rate",
       "Coupling distance between the ensemble and its limit vs ensemble size",
       &fhn_run_chaos_rate},
      {"regime-scan",
       "Classify long-run behavior across connectivity strengths",
       &fhn_run_regime_scan},
  };

  std::map<const CLI::App*, std::pair<CommonArgs, RunFn>> dispatch;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    auto& entry = dispatch[sub];
    entry.second = c.run;
    add_common(sub, entry.first, std::string("out/") + c.name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return FHN_ERR_CONFIG;
  }

  for (const CLI::App* sub : app.get_subcommands()) {
    const auto it = dispatch.find(sub);
    if (it != dispatch.end())
      return execute(it->second.first, it->second.second);
  }
  std::fprintf(stderr, "error: no command selected\n");
  return FHN_ERR_CONFIG;
}
