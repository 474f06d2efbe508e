#pragma once

#include <span>
#include <string_view>

#include "lyapnet/net.hpp"
#include "lyapnet/sampler.hpp"
#include "lyapnet/systems.hpp"

namespace lyapnet {

enum class MarginMode {
  kConstant,     // margins m1, m2 as given
  kStateScaled,  // margins m1 |x|^2, m2 |x|^2; both vanish at the origin
};

std::string_view to_string(MarginMode m);
MarginMode parse_margin_mode(std::string_view text);

struct LossConfig {
  double m1 = 0.05;
  double m2 = 0.05;
  MarginMode margin_mode = MarginMode::kConstant;
  void validate() const;
};

/// Penalty for V not exceeding its margin: m1 - v when v <= m1, else 0.
double h1(double v, double m1);
/// Penalty for V-dot not reaching -m2: vdot + m2 when vdot > -m2, else 0.
double h2(double vdot, double m2);

struct LossBreakdown {
  double total = 0;
  double h1_mean = 0;
  double h2_mean = 0;
  double violation_fraction_V = 0;     // points with h1 > 0
  double violation_fraction_Vdot = 0;  // points with h2 > 0
};

struct BatchMetrics {
  LossBreakdown loss;
  double v_bar = 0;
  double vdot_bar = 0;
};

/// h1(V(x)) + h2(V-dot(x)) with the margins of `cfg` at x.
double point_loss(const LyapunovNetwork& net, const DynamicalSystem& sys, std::span<const double> x,
                  const LossConfig& cfg);

/// Means over the batch, summed in batch order.
BatchMetrics batch_metrics(const LyapunovNetwork& net, const DynamicalSystem& sys, const SampleBatch& batch,
                           const LossConfig& cfg);

/// Exact gradient of the mean batch loss with respect to the network
/// parameters, including the path through grad_x V . f in the h2 term.
/// At a hinge kink the branch printed in h1/h2 is used (v <= m1 is active,
/// vdot <= -m2 is not).
ParamVector loss_param_gradient(const LyapunovNetwork& net, const DynamicalSystem& sys,
                                const SampleBatch& batch, const LossConfig& cfg);

}  // namespace lyapnet
