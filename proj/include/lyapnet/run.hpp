#pragma once

#include <iosfwd>

#include "lyapnet/config.hpp"
#include "lyapnet/net.hpp"
#include "lyapnet/trainer.hpp"

namespace lyapnet {

/// Process exit codes shared by `run` and `bench`.
enum ExitCode : int {
  kExitCertificate = 0,
  kExitError = 1,  // bad configuration or a rejected system
  kExitNumerical = 2,
  kExitNoCertificate = 3,
};

struct ConfiguredRun {
  DynamicalSystem system;
  LyapunovNetwork net;
  TrainReport report;
};

/// The in-memory part of `run`: resolves and validates `cfg`, applies the
/// equilibrium guard, initializes the network from the root seed, trains and
/// verifies. Writes nothing except warnings to `log`.
ConfiguredRun train_configured(const RunConfig& cfg, std::ostream& log);

/// Trains and verifies one system, writing into cfg.output:
///   run_config.txt   resolved configuration (loadable with --config)
///   trace.csv        evaluation trace
///   checkpoint.txt   final network
///   report.txt       key = value summary
///   grid.csv         V and V-dot on a grid (planar systems only)
/// A one-paragraph summary goes to `log`. Returns an ExitCode; configuration
/// problems throw ConfigError, non-finite training throws NumericalError.
int run(const RunConfig& cfg, std::ostream& log);

/// Runs every builtin benchmark system with `base` (system replaced) into
/// base.output/<system>/ and writes base.output/bench_summary.csv. Returns 0
/// when every obtained verdict matches the expected one, 3 otherwise.
int bench(const RunConfig& base, std::ostream& log);

}  // namespace lyapnet
