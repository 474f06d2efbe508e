#include "lyapnet/run.hpp"

#include <algorithm>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lyapnet/error.hpp"
#include "lyapnet/rng.hpp"
#include "lyapnet/verifier.hpp"

namespace lyapnet {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string fmt_state(const State& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s + ")";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

constexpr const char* kNoCertificateCaveat =
    "no certificate found; this suggests, but does not prove, that the equilibrium is not asymptotically stable";
constexpr const char* kCertificateCaveat =
    "empirical certificate: conditions hold on the verification sample, which is evidence, not a proof";

void write_report(const RunConfig& cfg, const DynamicalSystem& sys, const TrainReport& rep, std::ostream& out) {
  const auto& v = rep.verification;
  const auto& last = rep.trace.back().metrics;
  out << "system = " << sys.name() << "\n";
  out << "dim = " << sys.dim() << "\n";
  for (int i = 0; i < sys.dim(); ++i) out << "rhs" << i + 1 << " = " << sys.rhs()[i].to_string() << "\n";
  out << "expected_verdict = " << to_string(sys.expected_verdict()) << "\n";
  out << "verdict = " << to_string(rep.verdict) << "\n";
  out << "caveat = " << (rep.verdict == Verdict::kCertificateFound ? kCertificateCaveat : kNoCertificateCaveat)
      << "\n";
  out << "converged = " << (rep.converged ? "true" : "false") << "\n";
  out << "steps_run = " << rep.steps_run << "\n";
  out << "final_loss = " << fmt(last.loss.total) << "\n";
  out << "final_v_bar = " << fmt(last.v_bar) << "\n";
  out << "final_vdot_bar = " << fmt(last.vdot_bar) << "\n";
  out << "verify.pass = " << (v.pass ? "true" : "false") << "\n";
  out << "verify.samples_checked = " << v.samples_checked << "\n";
  out << "verify.requested_samples = " << v.requested_samples << "\n";
  out << "verify.capped = " << (v.capped() ? "true" : "false") << "\n";
  out << "verify.fraction_V_positive = " << fmt(v.fraction_V_positive) << "\n";
  out << "verify.fraction_Vdot_negative = " << fmt(v.fraction_Vdot_negative) << "\n";
  out << "verify.min_V = " << fmt(v.min_V) << "\n";
  out << "verify.max_Vdot = " << fmt(v.max_Vdot) << "\n";
  out << "seed.root = " << rep.root_seed << "\n";
  out << "seed.init = " << derive_seed(rep.root_seed, Stream::kInit) << "\n";
  out << "seed.train_batches = " << derive_seed(rep.root_seed, Stream::kTrainBatches) << "\n";
  out << "seed.eval_set = " << derive_seed(rep.root_seed, Stream::kEvalSet) << "\n";
  out << "seed.verify = " << derive_seed(rep.root_seed, Stream::kVerify) << "\n";
  if (sys.dim() <= 3) {
    const auto eig = small_eigenvalues(jacobian_fd(sys, State(static_cast<std::size_t>(sys.dim()), 0.0)));
    std::string list;
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& e : eig) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g%+.6gi", e.real(), e.imag());
      list += (list.empty() ? "" : " ") + std::string(buf);
      max_re = std::max(max_re, e.real());
    }
    out << "linearization.eigenvalues = " << list << "\n";
    out << "linearization.max_real_part = " << fmt(max_re) << "\n";
  }
  std::ostringstream echo;
  write_config(cfg, echo);
  std::istringstream lines(echo.str());
  for (std::string line; std::getline(lines, line);) out << "config." << line << "\n";
}

ConfiguredRun run_impl(const RunConfig& cfg, std::ostream& log) {
  ConfiguredRun result = train_configured(cfg, log);
  const auto& sys = result.system;
  const auto& rep = result.report;

  std::filesystem::create_directories(cfg.output);
  {
    auto out = open_out(cfg.output / "run_config.txt");
    write_config(cfg, out);
  }

  export_trace(rep, cfg.output / "trace.csv");
  save_checkpoint(result.net, cfg.seed, cfg.output / "checkpoint.txt");
  if (sys.dim() == 2) export_grid(result.net, sys, cfg.radius, cfg.grid_resolution, cfg.output / "grid.csv");
  {
    auto out = open_out(cfg.output / "report.txt");
    write_report(cfg, sys, rep, out);
  }

  const auto& v = rep.verification;
  log << sys.name() << ": " << to_string(rep.verdict) << " after " << rep.steps_run << " steps (final loss "
      << short_fmt(rep.final_loss()) << ", V>0 on " << short_fmt(v.fraction_V_positive) << ", Vdot<0 on "
      << short_fmt(v.fraction_Vdot_negative) << " of " << v.samples_checked << " samples)\n";
  log << "  " << (rep.verdict == Verdict::kCertificateFound ? kCertificateCaveat : kNoCertificateCaveat) << "\n";
  return result;
}

}  // namespace

ConfiguredRun train_configured(const RunConfig& cfg, std::ostream& log) {
  DynamicalSystem sys = resolve_system(cfg);
  const auto eq = check_equilibrium(sys);
  if (!eq.ok) {
    const std::string msg = "system " + sys.name() + " has no equilibrium at the origin: residual f(0) = " +
                            fmt_state(eq.residual);
    if (!cfg.allow_nonequilibrium) throw ConfigError(msg + " (pass --allow-nonequilibrium to train anyway)");
    log << "warning: " << msg << "\n";
  }
  const SamplingDomain domain = resolve_domain(cfg, sys.dim());
  const Architecture arch = resolve_architecture(cfg, sys.dim());
  cfg.loss.validate();
  TrainConfig tc = cfg.train;
  tc.root_seed = cfg.seed;
  tc.validate();
  if (sys.dim() == 2 && cfg.grid_resolution < 2) throw ConfigError("grid.resolution must be at least 2");

  LyapunovNetwork net = LyapunovNetwork::init(arch, derive_seed(cfg.seed, Stream::kInit), cfg.zero_anchor);
  TrainReport rep = train(sys, net, domain, cfg.loss, tc);
  return {std::move(sys), std::move(net), std::move(rep)};
}

int run(const RunConfig& cfg, std::ostream& log) {
  const auto result = run_impl(cfg, log);
  return result.report.verdict == Verdict::kCertificateFound ? kExitCertificate : kExitNoCertificate;
}

int bench(const RunConfig& base, std::ostream& log) {
  std::filesystem::create_directories(base.output);
  auto summary = open_out(base.output / "bench_summary.csv");
  summary << "system,expected_verdict,obtained_verdict,steps,final_loss,min_V,max_Vdot\n";
  bool all_match = true;
  for (const auto& sys : benchmark_systems()) {
    RunConfig cfg = base;
    cfg.system = sys.name();
    cfg.custom_dim = 0;
    cfg.custom_rhs.clear();
    cfg.output = base.output / sys.name();
    const auto result = run_impl(cfg, log);
    const auto& rep = result.report;
    const auto expected = sys.expected_verdict() == ExpectedVerdict::kStable ? Verdict::kCertificateFound
                                                                             : Verdict::kNoCertificate;
    all_match = all_match && rep.verdict == expected;
    summary << sys.name() << "," << to_string(expected) << "," << to_string(rep.verdict) << "," << rep.steps_run
            << "," << fmt(rep.final_loss()) << "," << fmt(rep.verification.min_V) << ","
            << fmt(rep.verification.max_Vdot) << "\n";
  }
  return all_match ? kExitCertificate : kExitNoCertificate;
}

}  // namespace lyapnet
