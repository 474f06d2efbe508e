// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "lyapnet/run.hpp"
#include "lyapnet/sampler.hpp"
#include "lyapnet/verifier.hpp"

namespace fs = std::filesystem;
using namespace lyapnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- 1 ---------------------------------------------------------------------
Outcome gradient_exactness() {
  const auto res = testing::run_gradient_checks(20240601, 50);
  Outcome o;
  o.pass = res.cases == 50 && res.worst_input < 1e-4 && res.worst_param < 1e-4;
  o.detail = "50 draws, worst input rel err " + fmt("%.2e", res.worst_input) + ", worst param rel err " +
             fmt("%.2e", res.worst_param) + ", " + std::to_string(res.resampled) + " kink draws resampled";
  return o;
}

// --- 2 ---------------------------------------------------------------------
Outcome sampler_statistics() {
  constexpr std::size_t n = 100000;
  Outcome o{true, ""};
  double worst_z = 0;
  for (int d : {1, 2, 3, 5}) {
    Sampler s(SamplingDomain{d, 1.0, 0.02, SamplingScheme::kUniform, 0.0, 0}, 1000 + static_cast<unsigned>(d));
    const auto batch = s.sample(n);
    for (double rho : {0.25, 0.5, 0.75}) {
      std::size_t inside = 0;
      for (const auto& x : batch) {
        double r2 = 0;
        for (double xi : x) r2 += xi * xi;
        inside += std::sqrt(r2) <= rho;
      }
      const double p = std::pow(rho, d);
      const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
      const double z = std::abs(static_cast<double>(inside) / static_cast<double>(n) - p) / se;
      worst_z = std::max(worst_z, z);
      if (z > 3) o.pass = false;
    }
  }
  Sampler polar(SamplingDomain{2, 1.0, 0.02, SamplingScheme::kCenterConcentrated, 0.0, 0}, 77);
  const auto batch = polar.sample(n);
  std::size_t inside = 0;
  for (const auto& x : batch) inside += std::hypot(x[0], x[1]) <= 0.5;
  const double frac = static_cast<double>(inside) / static_cast<double>(n);
  if (std::abs(frac - 0.5) > 0.01) o.pass = false;
  o.detail = "uniform worst |z| = " + fmt("%.2f", worst_z) + " (limit 3), polar P(|x|<=0.5) = " + fmt("%.4f", frac);
  return o;
}

// --- 3 ---------------------------------------------------------------------
LyapunovNetwork norm_squared(int d) {
  const auto dd = static_cast<std::size_t>(d);
  std::vector<double> eye(dd * dd, 0.0);
  for (std::size_t i = 0; i < dd; ++i) eye[i * dd + i] = 1.0;
  return LyapunovNetwork(d,
                         {Layer{d, d, eye, std::vector<double>(dd, 0.0), Activation::kPoly2},
                          Layer{d, 1, std::vector<double>(dd, 1.0), {0.0}, Activation::kLinear}},
                         true);
}

Outcome oracle_certificate() {
  Outcome o{true, ""};
  for (int d : {1, 2, 3, 5}) {
    std::vector<std::string> rhs;
    for (int i = 1; i <= d; ++i) rhs.push_back("-x" + std::to_string(i));
    const auto sys = DynamicalSystem::from_strings("decay", d, rhs);
    const double delta = d <= 2 ? 0.02 : (d == 3 ? 0.05 : 0.25);
    const auto rep = verify(norm_squared(d), sys, SamplingDomain{d, 1.0, delta, SamplingScheme::kUniform, 0.0, 3});
    const bool ok = rep.pass && rep.fraction_V_positive == 1.0 && rep.fraction_Vdot_negative == 1.0;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("d=") + std::to_string(d) + ": " +
                std::to_string(rep.samples_checked) + " samples " + (ok ? "ok" : "FAILED");
  }
  return o;
}

// --- 4 ---------------------------------------------------------------------
Outcome linear_oracle() {
  // A^T P + P A = -I for A = [[0,1],[-1,-1]] gives P = [[3/2,1/2],[1/2,1]],
  // i.e. V = 1.25 x1^2 + (0.5 x1 + x2)^2.
  const LyapunovNetwork net(2,
                            {Layer{2, 2, {1.0, 0.0, 0.5, 1.0}, {0.0, 0.0}, Activation::kPoly2},
                             Layer{2, 1, {1.25, 1.0}, {0.0}, Activation::kLinear}},
                            true);
  const auto sys = *find_builtin("s2_linear");
  const auto rep = verify(net, sys, SamplingDomain{2, 1.0, 0.02, SamplingScheme::kUniform, 0.1, 11});
  Outcome o;
  o.pass = rep.pass && rep.fraction_V_positive == 1.0 && rep.fraction_Vdot_negative == 1.0;
  o.detail = std::to_string(rep.samples_checked) + " samples, min V " + fmt("%.4g", rep.min_V) + ", max Vdot " +
             fmt("%.4g", rep.max_Vdot);
  return o;
}

// --- 5 ---------------------------------------------------------------------
Outcome benchmark_reproduction() {
  const std::uint64_t seeds[] = {7, 8, 9};
  Outcome o{true, ""};
  std::ostringstream null_log;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& sys : benchmark_systems()) {
    const bool stable = sys.expected_verdict() == ExpectedVerdict::kStable;
    int good = 0;
    std::string runs;
    for (std::uint64_t seed : seeds) {
      RunConfig cfg;
      cfg.system = sys.name();
      cfg.seed = seed;
      const auto r = train_configured(cfg, null_log);
      const auto& last = r.report.trace.back().metrics;
      const bool certified = r.report.verdict == Verdict::kCertificateFound;
      const bool ok = stable ? certified && last.v_bar > 0 && last.vdot_bar < 0
                             : !certified && last.loss.total > 1e-3;
      good += ok;
      runs += " seed " + std::to_string(seed) + ": " + std::string(to_string(r.report.verdict)) + " loss " +
              fmt("%.2e", last.loss.total) + " Vdot<0 " + fmt("%.4f", r.report.verification.fraction_Vdot_negative) +
              (ok ? "" : " (x)") + ";";
    }
    const bool sys_ok = stable ? good >= 2 : good == 3;
    o.pass = o.pass && sys_ok;
    o.detail += "\n    " + std::string(sys_ok ? "ok  " : "BAD ") + sys.name() + " [" +
                std::string(to_string(sys.expected_verdict())) + "]" + runs;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 900) o.pass = false;
  o.detail = "24 runs in " + fmt("%.1f", secs) + " s (limit 900)" + o.detail;
  return o;
}

// --- 6 ---------------------------------------------------------------------
Outcome instability_corroboration() {
  Outcome o{true, ""};
  for (const char* name : {"u2_saddle", "u2_quad", "u3_mixed"}) {
    const double re = max_real_eigenvalue_at_origin(*find_builtin(name));
    o.pass = o.pass && re > 0;
    o.detail += (o.detail.empty() ? "" : ", ") + std::string(name) + " max Re = " + fmt("%.4g", re);
  }
  return o;
}

// --- 7, 8: through the command-line tool -----------------------------------
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LYAPNET_CLI_PATH + "\" " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const fs::path& work) {
  const fs::path a = work / "bench_a", b = work / "bench_b";
  run_cli("bench --seed 7 --out \"" + a.string() + "\" > \"" + (work / "bench_a.log").string() + "\"");
  run_cli("bench --seed 7 --out \"" + b.string() + "\" > \"" + (work / "bench_b.log").string() + "\"");
  Outcome o{true, ""};
  int compared = 0;
  auto same = [&](const fs::path& rel) {
    const bool exists = fs::exists(a / rel) && fs::exists(b / rel);
    const bool eq = exists && slurp(a / rel) == slurp(b / rel) && !slurp(a / rel).empty();
    ++compared;
    if (!eq) {
      o.pass = false;
      o.detail += " differs: " + rel.string() + ";";
    }
  };
  same("bench_summary.csv");
  for (const auto& sys : benchmark_systems()) same(fs::path(sys.name()) / "trace.csv");
  o.detail = std::to_string(compared) + " files compared" + o.detail;
  return o;
}

Outcome equilibrium_guard(const fs::path& work) {
  const fs::path err = work / "guard.err";
  const int code = run_cli("run --system s3_shifted --out \"" + (work / "guard").string() + "\" > /dev/null 2> \"" +
                           err.string() + "\"");
  const std::string msg = slurp(err);
  Outcome o;
  o.pass = code == 1 && msg.find("residual") != std::string::npos && msg.find("(1,0,0)") != std::string::npos &&
           !fs::exists(work / "guard" / "trace.csv");
  std::string first_line = msg.substr(0, msg.find('\n'));
  o.detail = "exit code " + std::to_string(code) + ": " + first_line;
  return o;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("lyapnet_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient exactness", gradient_exactness},
      {"sampler statistics", sampler_statistics},
      {"oracle certificate V=|x|^2", oracle_certificate},
      {"linear-system quadratic oracle", linear_oracle},
      {"benchmark reproduction", benchmark_reproduction},
      {"instability corroboration", instability_corroboration},
      {"bench determinism", [&] { return determinism(work); }},
      {"equilibrium guard", [&] { return equilibrium_guard(work); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", "
              << fmt("%.2f", secs) << " s): " << o.detail << std::endl;
  }
  fs::remove_all(work);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << "\n";
  return failures == 0 ? 0 : 1;
}
