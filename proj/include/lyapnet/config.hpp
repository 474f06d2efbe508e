#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyapnet/loss.hpp"
#include "lyapnet/net.hpp"
#include "lyapnet/sampler.hpp"
#include "lyapnet/systems.hpp"
#include "lyapnet/trainer.hpp"

namespace lyapnet {

/// Everything a run needs. Every field has a default, so a RunConfig with
/// only `system` set is complete.
///
/// Text form (one `key = value` per line, `#` starts a comment):
///
///   system               builtin name, or "custom" with system.dim/system.rhsN
///   system.name          name of a custom system                 (custom)
///   system.dim           dimension of a custom system
///   system.rhs1..rhsN    right-hand-side expressions over x1..xN
///   seed                 root seed                               (0)
///   output               output directory                        (out)
///   allow_nonequilibrium train even if f(0) != 0                 (false)
///   domain.radius        r                                       (1)
///   domain.delta         sampling resolution                     (0.02)
///   domain.scheme        uniform | center_concentrated           (uniform)
///   domain.inner_radius  r_in                                    (0.1 * r)
///   network.preset       tanh3 | poly                            (tanh3)
///   network.layers       explicit spec, e.g. 5:tanh,5:tanh,1:linear (overrides preset)
///   network.zero_anchor  true | false                            (true)
///   loss.m1, loss.m2     margins                                 (0.05, 0.05)
///   loss.margin_mode     constant | state_scaled                 (state_scaled)
///   train.batch_size                                             (20)
///   train.learning_rate                                          (0.005)
///   train.max_steps                                              (20000)
///   train.eval_every                                             (100)
///   train.eval_sample_count                                      (2000)
///   train.loss_tol                                               (1e-6)
///   train.patience_windows                                       (5)
///   verify.pass_threshold                                        (0.999)
///   grid.resolution      points per axis of grid.csv             (51)
struct RunConfig {
  std::string system = "s2_pendulum";
  std::string custom_name = "custom";
  int custom_dim = 0;
  std::vector<std::string> custom_rhs;

  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  bool allow_nonequilibrium = false;

  double radius = 1.0;
  double delta = 0.02;
  SamplingScheme scheme = SamplingScheme::kUniform;
  std::optional<double> inner_radius;  // unset: 0.1 * radius

  std::string preset = "tanh3";
  std::optional<std::vector<LayerSpec>> layers;
  bool zero_anchor = true;

  LossConfig loss{0.05, 0.05, MarginMode::kStateScaled};
  TrainConfig train;
  int grid_resolution = 51;

  double resolved_inner_radius() const { return inner_radius.value_or(0.1 * radius); }
};

/// Applies `key = value` lines from `in` on top of `cfg`. Unknown keys and
/// malformed values throw ConfigError naming `source` and the line.
void apply_config_text(RunConfig& cfg, std::istream& in, std::string_view source);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Sets one key; the same keys as the file format.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Writes every key with its resolved value. Feeding the result back through
/// apply_config_text reproduces `cfg`.
void write_config(const RunConfig& cfg, std::ostream& out);

/// Builtin lookup or custom construction. Throws ConfigError.
DynamicalSystem resolve_system(const RunConfig& cfg);
SamplingDomain resolve_domain(const RunConfig& cfg, int dim);
Architecture resolve_architecture(const RunConfig& cfg, int dim);

}  // namespace lyapnet
