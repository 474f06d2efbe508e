#include "lyapnet/loss.hpp"

#include <stdexcept>
#include <string>

namespace lyapnet {

std::string_view to_string(MarginMode m) {
  return m == MarginMode::kConstant ? "constant" : "state_scaled";
}

MarginMode parse_margin_mode(std::string_view text) {
  if (text == "constant") return MarginMode::kConstant;
  if (text == "state_scaled") return MarginMode::kStateScaled;
  throw ConfigError("unknown margin mode '" + std::string(text) + "' (expected constant or state_scaled)");
}

void LossConfig::validate() const {
  if (!(m1 >= 0) || !(m2 >= 0)) throw ConfigError("margins m1, m2 must be nonnegative");
}

double h1(double v, double m1) { return v <= m1 ? m1 - v : 0.0; }

double h2(double vdot, double m2) { return vdot > -m2 ? vdot + m2 : 0.0; }

namespace {

struct Margins {
  double m1;
  double m2;
};

Margins margins_at(const LossConfig& cfg, std::span<const double> x) {
  if (cfg.margin_mode == MarginMode::kConstant) return {cfg.m1, cfg.m2};
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return {cfg.m1 * r2, cfg.m2 * r2};
}

}  // namespace

double point_loss(const LyapunovNetwork& net, const DynamicalSystem& sys, std::span<const double> x,
                  const LossConfig& cfg) {
  const Margins m = margins_at(cfg, x);
  return h1(net.value(x), m.m1) + h2(net.vdot(sys, x), m.m2);
}

BatchMetrics batch_metrics(const LyapunovNetwork& net, const DynamicalSystem& sys, const SampleBatch& batch,
                           const LossConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("batch_metrics needs a nonempty batch");
  BatchMetrics out;
  std::size_t viol_v = 0, viol_vdot = 0;
  for (const auto& x : batch) {
    const Margins m = margins_at(cfg, x);
    const double v = net.value(x);
    const double vd = net.vdot(sys, x);
    const double a = h1(v, m.m1);
    const double b = h2(vd, m.m2);
    out.v_bar += v;
    out.vdot_bar += vd;
    out.loss.h1_mean += a;
    out.loss.h2_mean += b;
    viol_v += a > 0.0;
    viol_vdot += b > 0.0;
  }
  const double n = static_cast<double>(batch.size());
  out.v_bar /= n;
  out.vdot_bar /= n;
  out.loss.h1_mean /= n;
  out.loss.h2_mean /= n;
  out.loss.total = out.loss.h1_mean + out.loss.h2_mean;
  out.loss.violation_fraction_V = static_cast<double>(viol_v) / n;
  out.loss.violation_fraction_Vdot = static_cast<double>(viol_vdot) / n;
  return out;
}

ParamVector loss_param_gradient(const LyapunovNetwork& net, const DynamicalSystem& sys,
                                const SampleBatch& batch, const LossConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("loss_param_gradient needs a nonempty batch");
  ParamVector grad(net.param_count(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  State f(static_cast<std::size_t>(sys.dim()));
  for (const auto& x : batch) {
    const Margins m = margins_at(cfg, x);
    sys.evaluate_into(x, f);
    const double v = net.value(x);
    const double vd = net.vdot(sys, x);
    // dh1/dV = -1 on v <= m1; dh2/dVdot = +1 on vdot > -m2.
    const double value_weight = v <= m.m1 ? -scale : 0.0;
    const double slope_weight = vd > -m.m2 ? scale : 0.0;
    net.accumulate_param_gradient(x, f, value_weight, slope_weight, grad);
  }
  return grad;
}

}  // namespace lyapnet
