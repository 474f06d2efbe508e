#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "lyapnet/loss.hpp"
#include "lyapnet/net.hpp"
#include "lyapnet/sampler.hpp"
#include "lyapnet/systems.hpp"
#include "lyapnet/verifier.hpp"

namespace lyapnet {

struct TrainConfig {
  int batch_size = 20;
  double learning_rate = 0.005;
  int max_steps = 20000;
  int eval_every = 100;
  int eval_sample_count = 2000;
  double loss_tol = 1e-6;
  int patience_windows = 5;
  double pass_threshold = 0.999;
  std::uint64_t root_seed = 0;

  void validate() const;
};

enum class Verdict { kCertificateFound, kNoCertificate };

std::string_view to_string(Verdict v);

struct TraceRow {
  int step = 0;
  BatchMetrics metrics;
};

struct TrainReport {
  std::vector<TraceRow> trace;
  Verdict verdict = Verdict::kNoCertificate;
  int steps_run = 0;
  bool converged = false;  // eval loss stayed below loss_tol for patience_windows evaluations
  VerificationReport verification;
  std::uint64_t root_seed = 0;

  double final_loss() const { return trace.empty() ? 0.0 : trace.back().metrics.loss.total; }
};

/// Plain SGD on the hinge objective.
///
/// Each step draws a fresh batch of batch_size points from `domain` and
/// applies theta -= learning_rate * grad. Every eval_every steps (and at step
/// 0) the loss is measured on one evaluation set drawn at the start. Training
/// stops once that loss stays below loss_tol for patience_windows consecutive
/// evaluations, or after max_steps. The verifier then runs on a fresh sample;
/// the verdict is certificate_found only when training converged and the
/// verifier passed.
///
/// All randomness derives from train_cfg.root_seed (domain.seed is ignored).
/// `net` is updated in place. Throws NumericalError on a non-finite loss or
/// gradient.
TrainReport train(const DynamicalSystem& sys, LyapunovNetwork& net, const SamplingDomain& domain,
                  const LossConfig& loss_cfg, const TrainConfig& train_cfg);

/// CSV: step,loss,h1_mean,h2_mean,v_bar,vdot_bar,viol_V,viol_Vdot
void export_trace(const TrainReport& report, const std::filesystem::path& path);
void write_trace(const TrainReport& report, std::ostream& out);

}  // namespace lyapnet
