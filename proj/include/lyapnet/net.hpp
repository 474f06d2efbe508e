#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyapnet/systems.hpp"

namespace lyapnet {

enum class Activation { kPoly2, kPoly3, kTanh, kLinear };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view text);

struct ActivationValue {
  double value;
  double first;   // d sigma / dt
  double second;  // d^2 sigma / dt^2
};

ActivationValue activate(Activation a, double t);

struct LayerSpec {
  int width = 1;
  Activation activation = Activation::kLinear;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Layer widths and activations; the last layer must have width 1.
struct Architecture {
  int input_dim = 0;
  std::vector<LayerSpec> layers;
  void validate() const;
};

/// [n -> 5 poly3, 5 -> 5 poly2, 5 -> 1 linear]
Architecture poly_preset(int input_dim);
/// [n -> 5 tanh, 5 -> 5 tanh, 5 -> 1 linear]
Architecture tanh3_preset(int input_dim);
/// Preset by name ("poly" or "tanh3").
Architecture preset_architecture(std::string_view name, int input_dim);

/// Parses "5:tanh,5:tanh,1:linear".
std::vector<LayerSpec> parse_layer_spec(std::string_view text);
std::string format_layer_spec(const std::vector<LayerSpec>& layers);

struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out
  Activation activation = Activation::kLinear;
};

/// Flat parameter vector: layer by layer, the weights row-major followed by
/// the biases.
using ParamVector = std::vector<double>;

/// Candidate Lyapunov function V(x; theta), a dense feed-forward network.
///
/// With zero_anchor set, V(x) = raw(x) - raw(0), so V(0) = 0 for every theta.
/// The anchor is constant in x and therefore drops out of every input
/// derivative.
class LyapunovNetwork {
 public:
  LyapunovNetwork(int input_dim, std::vector<Layer> layers, bool zero_anchor);

  /// Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)); zero biases.
  static LyapunovNetwork init(const Architecture& arch, std::uint64_t seed, bool zero_anchor = true);

  int input_dim() const { return input_dim_; }
  bool zero_anchor() const { return zero_anchor_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Architecture architecture() const;

  std::size_t param_count() const;
  ParamVector params() const;
  void set_params(std::span<const double> theta);

  /// Network output before anchoring.
  double raw_value(std::span<const double> x) const;
  double value(std::span<const double> x) const;
  State input_gradient(std::span<const double> x) const;
  /// grad_x V(x) . f(x)
  double vdot(const DynamicalSystem& sys, std::span<const double> x) const;

  /// Directional derivative grad_x V(x) . direction, computed by a forward
  /// tangent pass. Agrees with input_gradient(x) . direction up to rounding.
  double directional_derivative(std::span<const double> x, std::span<const double> direction) const;

  /// Adds  value_weight * dV(x)/dtheta + slope_weight * d(grad_x V(x) . direction)/dtheta
  /// to `grad`. The second term runs a reverse sweep over the forward
  /// tangent pass, so it is exact (no finite differences).
  void accumulate_param_gradient(std::span<const double> x, std::span<const double> direction,
                                 double value_weight, double slope_weight,
                                 std::span<double> grad) const;

 private:
  void accumulate_raw(std::span<const double> x, std::span<const double> direction,
                      double value_weight, double slope_weight, std::span<double> grad) const;

  int input_dim_;
  std::vector<Layer> layers_;
  bool zero_anchor_;
};

/// Versioned text checkpoint. Parameters are written with 17 significant
/// digits, which round-trips doubles exactly.
void save_checkpoint(const LyapunovNetwork& net, std::uint64_t seed, const std::filesystem::path& path);
void write_checkpoint(const LyapunovNetwork& net, std::uint64_t seed, std::ostream& out);

struct Checkpoint {
  LyapunovNetwork net;
  std::uint64_t seed;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint read_checkpoint(std::istream& in);

}  // namespace lyapnet
