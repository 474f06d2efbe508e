#include "lyapnet/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lyapnet {

std::string_view to_string(ExpectedVerdict v) {
  switch (v) {
    case ExpectedVerdict::kStable: return "stable";
    case ExpectedVerdict::kUnstable: return "unstable";
    case ExpectedVerdict::kUnknown: return "unknown";
  }
  return "unknown";
}

DynamicalSystem::DynamicalSystem(std::string name, int dim, std::vector<Expr> rhs,
                                 ExpectedVerdict expected)
    : name_(std::move(name)), dim_(dim), rhs_(std::move(rhs)), expected_(expected) {
  if (dim_ < 1) throw ConfigError("system '" + name_ + "': dimension must be positive");
  if (static_cast<int>(rhs_.size()) != dim_) {
    throw ConfigError("system '" + name_ + "': expected " + std::to_string(dim_) +
                      " right-hand-side components, got " + std::to_string(rhs_.size()));
  }
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    if (rhs_[i].max_variable() > dim_) {
      throw ConfigError("system '" + name_ + "': component " + std::to_string(i + 1) +
                        " references x" + std::to_string(rhs_[i].max_variable()));
    }
  }
}

DynamicalSystem DynamicalSystem::from_strings(std::string name, int dim,
                                              const std::vector<std::string>& rhs,
                                              ExpectedVerdict expected) {
  std::vector<Expr> parsed;
  parsed.reserve(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    try {
      parsed.push_back(parse(rhs[i], dim));
    } catch (const ParseError& e) {
      throw ParseError("system '" + name + "' component " + std::to_string(i + 1) + ": " +
                           std::string(e.what()).substr(0, std::string(e.what()).rfind(" at offset")),
                       e.offset());
    }
  }
  return DynamicalSystem(std::move(name), dim, std::move(parsed), expected);
}

void DynamicalSystem::evaluate_unchecked(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < rhs_.size(); ++i) out[i] = rhs_[i].eval(x);
}

void DynamicalSystem::evaluate_into(std::span<const double> x, std::span<double> out) const {
  evaluate_unchecked(x, out);
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "system '" << name_ << "': component " << i + 1 << " is non-finite at x = (";
      for (std::size_t j = 0; j < x.size(); ++j) msg << (j ? ", " : "") << x[j];
      msg << ")";
      throw ConfigError(msg.str());
    }
  }
}

State DynamicalSystem::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("state has " + std::to_string(x.size()) + " components, system '" +
                                name_ + "' expects " + std::to_string(dim_));
  }
  State out(static_cast<std::size_t>(dim_));
  evaluate_into(x, out);
  return out;
}

EquilibriumCheck check_equilibrium(const DynamicalSystem& sys, double tol) {
  if (tol < 0) throw std::invalid_argument("tolerance must be nonnegative");
  EquilibriumCheck result;
  const State origin(static_cast<std::size_t>(sys.dim()), 0.0);
  result.residual.assign(origin.size(), 0.0);
  sys.evaluate_unchecked(origin, result.residual);
  for (double r : result.residual) {
    const double a = std::isnan(r) ? std::numeric_limits<double>::infinity() : std::abs(r);
    result.residual_norm = std::max(result.residual_norm, a);
  }
  result.ok = result.residual_norm <= tol;
  return result;
}

Matrix jacobian_fd(const DynamicalSystem& sys, std::span<const double> x, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
  const auto n = static_cast<std::size_t>(sys.dim());
  Matrix jac(n, std::vector<double>(n, 0.0));
  State probe(x.begin(), x.end());
  State plus(n), minus(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double saved = probe[j];
    probe[j] = saved + h;
    sys.evaluate_unchecked(probe, plus);
    probe[j] = saved - h;
    sys.evaluate_unchecked(probe, minus);
    probe[j] = saved;
    for (std::size_t i = 0; i < n; ++i) jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
  }
  return jac;
}

namespace {

using Complex = std::complex<double>;

std::vector<Complex> quadratic_roots(double b, double c) {
  // x^2 + b x + c
  const double disc = b * b - 4.0 * c;
  if (disc >= 0) {
    const double s = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(s, b));
    if (q == 0.0) return {Complex(0.0), Complex(0.0)};
    return {Complex(q), Complex(c / q)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex(-0.5 * b, im), Complex(-0.5 * b, -im)};
}

std::vector<Complex> cubic_roots(double a, double b, double c) {
  // x^3 + a x^2 + b x + c, via the depressed cubic t^3 + p t + q with x = t - a/3.
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  std::vector<Complex> roots;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    const double re = -(u + v) / 2.0 - shift;
    const double im = std::sqrt(3.0) / 2.0 * (u - v);
    roots = {Complex(u + v - shift), Complex(re, im), Complex(re, -im)};
  } else if (p == 0.0) {
    const double t = std::cbrt(-q);
    roots = {Complex(t - shift), Complex(t - shift), Complex(t - shift)};
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots.emplace_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }
  }
  return roots;
}

}  // namespace

std::vector<std::complex<double>> small_eigenvalues(const Matrix& m) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    if (row.size() != n) throw std::invalid_argument("matrix must be square");
  }
  if (n == 1) return {Complex(m[0][0])};
  if (n == 2) {
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return quadratic_roots(-tr, det);
  }
  if (n == 3) {
    const double tr = m[0][0] + m[1][1] + m[2][2];
    const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] -
                          m[0][2] * m[2][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // det(lambda I - M) = lambda^3 - tr lambda^2 + minors lambda - det
    return cubic_roots(-tr, minors, -det);
  }
  throw std::invalid_argument("eigenvalue oracle supports n <= 3 only");
}

double max_real_eigenvalue_at_origin(const DynamicalSystem& sys) {
  const State origin(static_cast<std::size_t>(sys.dim()), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& ev : small_eigenvalues(jacobian_fd(sys, origin))) best = std::max(best, ev.real());
  return best;
}

namespace {

std::vector<DynamicalSystem> make_builtins() {
  using E = ExpectedVerdict;
  std::vector<DynamicalSystem> v;
  v.push_back(DynamicalSystem::from_strings("s2_cubic", 2, {"x1 - x1^3 + x2", "3*x1 - x2"}, E::kStable));
  v.push_back(DynamicalSystem::from_strings("s2_pendulum", 2, {"x2", "-sin(x1) - x2"}, E::kStable));
  v.push_back(DynamicalSystem::from_strings("s2_linear", 2, {"x2", "-x1 - x2"}, E::kStable));
  v.push_back(DynamicalSystem::from_strings("s3_cubic", 3, {"-2*x1 + x1^3", "-x2 + x1^2", "-x3"},
                                            E::kStable));
  v.push_back(DynamicalSystem::from_strings("s3_rotational", 3,
                                            {"-x1", "-x1 - x3 - x1*x3", "(x1 + 1)*x2"}, E::kStable));
  v.push_back(DynamicalSystem::from_strings("s3_shifted", 3,
                                            {"-x2*x3 + 1", "x1*x3 - x2", "x3^2*(1 - x3)"}, E::kStable));
  v.push_back(DynamicalSystem::from_strings("u2_saddle", 2, {"-x1 + x2^2", "2*x2 - x1^3"}, E::kUnstable));
  v.push_back(DynamicalSystem::from_strings("u2_quad", 2, {"x1 - x2", "-x1^2 + x2"}, E::kUnstable));
  v.push_back(DynamicalSystem::from_strings("u3_mixed", 3, {"3*x1 - x2", "-x1^3 + 4*x2", "x3"},
                                            E::kUnstable));
  return v;
}

}  // namespace

const std::vector<DynamicalSystem>& builtin_systems() {
  static const std::vector<DynamicalSystem> systems = make_builtins();
  return systems;
}

std::optional<DynamicalSystem> find_builtin(std::string_view name) {
  for (const auto& s : builtin_systems()) {
    if (s.name() == name) return s;
  }
  return std::nullopt;
}

std::vector<DynamicalSystem> benchmark_systems() {
  std::vector<DynamicalSystem> out;
  for (const auto& s : builtin_systems()) {
    if (check_equilibrium(s).ok) out.push_back(s);
  }
  return out;
}

}  // namespace lyapnet
