#include "lyapnet/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lyapnet/rng.hpp"

namespace lyapnet {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be positive");
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train.learning_rate must be finite and nonnegative");
  }
  if (max_steps < 1) throw ConfigError("train.max_steps must be positive");
  if (eval_every < 1) throw ConfigError("train.eval_every must be positive");
  if (eval_sample_count < 1) throw ConfigError("train.eval_sample_count must be positive");
  if (!(loss_tol >= 0)) throw ConfigError("train.loss_tol must be nonnegative");
  if (patience_windows < 1) throw ConfigError("train.patience_windows must be positive");
  if (!(pass_threshold >= 0 && pass_threshold <= 1)) throw ConfigError("verify.pass_threshold must lie in [0, 1]");
}

std::string_view to_string(Verdict v) {
  return v == Verdict::kCertificateFound ? "certificate_found" : "no_certificate";
}

namespace {

std::string describe_point(std::span<const double> x) {
  std::ostringstream s;
  s.precision(17);
  s << "(";
  for (std::size_t i = 0; i < x.size(); ++i) s << (i ? ", " : "") << x[i];
  s << ")";
  return s.str();
}

bool all_finite(std::span<const double> v) {
  for (double d : v) {
    if (!std::isfinite(d)) return false;
  }
  return true;
}

[[noreturn]] void abort_nonfinite(const LyapunovNetwork& net, const DynamicalSystem& sys, const SampleBatch& batch,
                                  const LossConfig& cfg, int step, const char* what) {
  for (const auto& x : batch) {
    const SampleBatch one{x};
    const double l = point_loss(net, sys, x, cfg);
    if (!std::isfinite(l) || !all_finite(loss_param_gradient(net, sys, one, cfg))) {
      throw NumericalError(std::string("non-finite ") + what + " at step " + std::to_string(step) +
                           ", sample x = " + describe_point(x));
    }
  }
  throw NumericalError(std::string("non-finite ") + what + " at step " + std::to_string(step));
}

}  // namespace

TrainReport train(const DynamicalSystem& sys, LyapunovNetwork& net, const SamplingDomain& domain,
                  const LossConfig& loss_cfg, const TrainConfig& train_cfg) {
  train_cfg.validate();
  loss_cfg.validate();
  domain.validate();
  if (sys.dim() != domain.dim || net.input_dim() != domain.dim) {
    throw ConfigError("system, network and domain dimensions differ");
  }

  TrainReport report;
  report.root_seed = train_cfg.root_seed;

  Sampler batches(domain, derive_seed(train_cfg.root_seed, Stream::kTrainBatches));
  const SampleBatch eval_set =
      Sampler(domain, derive_seed(train_cfg.root_seed, Stream::kEvalSet))
          .sample(static_cast<std::size_t>(train_cfg.eval_sample_count));

  int below_tol = 0;
  auto evaluate = [&](int step) {
    TraceRow row{step, batch_metrics(net, sys, eval_set, loss_cfg)};
    if (!std::isfinite(row.metrics.loss.total)) abort_nonfinite(net, sys, eval_set, loss_cfg, step, "loss");
    report.trace.push_back(row);
    below_tol = row.metrics.loss.total < train_cfg.loss_tol ? below_tol + 1 : 0;
    return below_tol >= train_cfg.patience_windows;
  };

  bool converged = evaluate(0);
  ParamVector theta = net.params();
  int step = 0;
  while (!converged && step < train_cfg.max_steps) {
    ++step;
    const SampleBatch batch = batches.sample(static_cast<std::size_t>(train_cfg.batch_size));
    const ParamVector grad = loss_param_gradient(net, sys, batch, loss_cfg);
    if (!all_finite(grad)) abort_nonfinite(net, sys, batch, loss_cfg, step, "gradient");
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= train_cfg.learning_rate * grad[i];
    net.set_params(theta);
    if (step % train_cfg.eval_every == 0 || step == train_cfg.max_steps) converged = evaluate(step);
  }

  report.steps_run = step;
  report.converged = converged;
  SamplingDomain verify_domain = domain;
  verify_domain.seed = derive_seed(train_cfg.root_seed, Stream::kVerify);
  report.verification = verify(net, sys, verify_domain, train_cfg.pass_threshold);
  report.verdict = converged && report.verification.pass ? Verdict::kCertificateFound : Verdict::kNoCertificate;
  return report;
}

void write_trace(const TrainReport& report, std::ostream& out) {
  out << "step,loss,h1_mean,h2_mean,v_bar,vdot_bar,viol_V,viol_Vdot\n";
  char buf[256];
  for (const auto& row : report.trace) {
    const auto& m = row.metrics;
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.step, m.loss.total,
                  m.loss.h1_mean, m.loss.h2_mean, m.v_bar, m.vdot_bar, m.loss.violation_fraction_V,
                  m.loss.violation_fraction_Vdot);
    out << buf;
  }
}

void export_trace(const TrainReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path.string());
  write_trace(report, out);
  if (!out) throw std::runtime_error("failed writing trace file: " + path.string());
}

}  // namespace lyapnet
