// tpflow: scenario runner. Exit codes: 0 ok, 1 numerical failure, 2 bad configuration.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tpflow/config.hpp"
#include "tpflow/scenarios.hpp"
#include "tpflow/timestepping.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::string scheme;
  std::optional<double> tau;
  std::optional<int> mesh;
  std::optional<int> degree;
};

void add_flags(CLI::App* cmd, Overrides& o, bool config_required) {
  auto* opt = cmd->add_option("--config", o.config, "key = value run file")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--scheme", o.scheme, "MP, BE, TL1 or TL2");
  cmd->add_option("--tau", o.tau, "time step");
  cmd->add_option("--mesh", o.mesh, "cells per side");
  cmd->add_option("--degree", o.degree, "polynomial degree")->check(CLI::IsMember({1, 2}));
}

tpflow::RunConfig resolve(const std::string& scenario, const Overrides& o) {
  using tpflow::ConfigError;
  tpflow::RunConfig c = o.config.empty() ? tpflow::default_config(scenario) : tpflow::load_config(o.config, scenario);
  if (scenario != "custom" && c.scenario != scenario)
    throw ConfigError("key 'scenario': file describes " + c.scenario + ", command is " + scenario);
  const bool sweep = c.scenario != "custom";
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.scheme.empty()) {
    if (sweep) c.schemes = {o.scheme};
    else c.scheme = o.scheme;
  }
  if (o.tau) {
    if (c.scenario == "converge") throw ConfigError("--tau: the convergence study uses tau = 1/mesh");
    if (sweep) c.taus = {*o.tau};
    else c.tau = *o.tau;
  }
  if (o.mesh) {
    if (c.scenario == "converge") {
      std::erase_if(c.meshes, [&](int n) { return n > *o.mesh; });
      if (c.meshes.empty()) c.meshes = {*o.mesh};
    } else {
      c.mesh = *o.mesh;
    }
  }
  if (o.degree) c.degree = *o.degree;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase porous media flow: refactorized theta-method and time-lagging baselines"};
  app.require_subcommand(1);
  Overrides o;
  auto* converge = app.add_subcommand("converge", "tau = h convergence study on the manufactured solution");
  auto* longtime = app.add_subcommand("longtime", "long-time errors and energy on the manufactured solution");
  auto* q5spot = app.add_subcommand("q5spot", "quarter-five-spot robustness study");
  auto* run = app.add_subcommand("run", "single run described by a config file");
  add_flags(converge, o, false);
  add_flags(longtime, o, false);
  add_flags(q5spot, o, false);
  add_flags(run, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string scenario = "custom";
  if (converge->parsed()) scenario = "converge";
  if (longtime->parsed()) scenario = "longtime";
  if (q5spot->parsed()) scenario = "q5spot";

  try {
    const tpflow::RunConfig config = resolve(scenario, o);
    return tpflow::dispatch(config, std::cout);
  } catch (const tpflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
