// Command-line front end: `run` trains and verifies one system, `bench`
// sweeps the builtin benchmark set.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

#include "lyapnet/config.hpp"
#include "lyapnet/error.hpp"
#include "lyapnet/run.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::string> system;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool allow_nonequilibrium = false;
  std::optional<std::string> preset;
  std::optional<std::string> layers;
  std::optional<int> max_steps;
  std::optional<double> lr;
  std::optional<int> batch_size;
  std::optional<double> radius;
  std::optional<double> delta;
  std::optional<double> inner_radius;
  std::optional<double> m1;
  std::optional<double> m2;
  std::optional<std::string> margin_mode;
  std::optional<std::string> scheme;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--allow-nonequilibrium", o.allow_nonequilibrium, "train even if f(0) != 0");
  cmd->add_option("--preset", o.preset, "network preset: tanh3 | poly");
  cmd->add_option("--layers", o.layers, "explicit layers, e.g. 5:tanh,5:tanh,1:linear");
  cmd->add_option("--max-steps", o.max_steps, "SGD step budget");
  cmd->add_option("--lr", o.lr, "learning rate");
  cmd->add_option("--batch-size", o.batch_size, "samples per SGD step");
  cmd->add_option("--radius", o.radius, "outer radius r of the domain");
  cmd->add_option("--delta", o.delta, "sampling resolution");
  cmd->add_option("--inner-radius", o.inner_radius, "inner radius of the sampled shell");
  cmd->add_option("--m1", o.m1, "positivity margin");
  cmd->add_option("--m2", o.m2, "decrease margin");
  cmd->add_option("--margin-mode", o.margin_mode, "constant | state_scaled");
  cmd->add_option("--scheme", o.scheme, "uniform | center_concentrated");
}

lyapnet::RunConfig build_config(const Overrides& o) {
  lyapnet::RunConfig cfg;
  if (o.config_file) lyapnet::apply_config_file(cfg, *o.config_file);
  auto set = [&](const char* key, const auto& value) {
    if (!value) return;
    std::ostringstream s;
    s.precision(17);
    s << *value;
    lyapnet::set_config_value(cfg, key, s.str());
  };
  set("system", o.system);
  set("seed", o.seed);
  set("output", o.out);
  if (o.allow_nonequilibrium) cfg.allow_nonequilibrium = true;
  set("network.preset", o.preset);
  set("network.layers", o.layers);
  set("train.max_steps", o.max_steps);
  set("train.learning_rate", o.lr);
  set("train.batch_size", o.batch_size);
  set("domain.radius", o.radius);
  set("domain.delta", o.delta);
  set("domain.inner_radius", o.inner_radius);
  set("loss.m1", o.m1);
  set("loss.m2", o.m2);
  set("loss.margin_mode", o.margin_mode);
  set("domain.scheme", o.scheme);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search for neural Lyapunov functions of polynomial and analytic ODEs"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "train and verify a candidate for one system");
  run_cmd->add_option("--system", run_opts.system, "builtin system name, or 'custom' (see --config)");
  add_common_options(run_cmd, run_opts);

  Overrides bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "run every builtin benchmark system");
  add_common_options(bench_cmd, bench_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return lyapnet::run(build_config(run_opts), std::cout);
    return lyapnet::bench(build_config(bench_opts), std::cout);
  } catch (const lyapnet::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lyapnet::kExitError;
  } catch (const lyapnet::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return lyapnet::kExitNumerical;
  }
}
