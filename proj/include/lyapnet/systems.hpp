#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyapnet/expr.hpp"

namespace lyapnet {

using State = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

enum class ExpectedVerdict { kStable, kUnstable, kUnknown };

std::string_view to_string(ExpectedVerdict v);

/// Autonomous system dx/dt = f(x) with the equilibrium of interest at x = 0.
class DynamicalSystem {
 public:
  /// Throws ConfigError if rhs.size() != dim or a component references a
  /// variable beyond x<dim>.
  DynamicalSystem(std::string name, int dim, std::vector<Expr> rhs,
                  ExpectedVerdict expected = ExpectedVerdict::kUnknown);

  /// Parses each component of `rhs` over x1..x<dim>.
  static DynamicalSystem from_strings(std::string name, int dim,
                                      const std::vector<std::string>& rhs,
                                      ExpectedVerdict expected = ExpectedVerdict::kUnknown);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::vector<Expr>& rhs() const { return rhs_; }
  ExpectedVerdict expected_verdict() const { return expected_; }

  /// f(x). Throws ConfigError when any component is non-finite.
  State evaluate(std::span<const double> x) const;
  void evaluate_into(std::span<const double> x, std::span<double> out) const;

  /// f(x) without the finiteness check, for oracles that want to see NaN.
  void evaluate_unchecked(std::span<const double> x, std::span<double> out) const;

 private:
  std::string name_;
  int dim_;
  std::vector<Expr> rhs_;
  ExpectedVerdict expected_;
};

struct EquilibriumCheck {
  bool ok = true;
  State residual;            // f(0)
  double residual_norm = 0;  // max-norm of f(0)
};

/// ok iff ||f(0)||_inf <= tol.
EquilibriumCheck check_equilibrium(const DynamicalSystem& sys, double tol = 1e-12);

/// Central-difference Jacobian: J[i][j] ~ d f_i / d x_j.
Matrix jacobian_fd(const DynamicalSystem& sys, std::span<const double> x, double h = 1e-6);

/// Eigenvalues of an n x n matrix with n <= 3, as roots of the characteristic
/// polynomial. Throws std::invalid_argument for larger matrices.
std::vector<std::complex<double>> small_eigenvalues(const Matrix& a);

/// Largest real part among the eigenvalues of the Jacobian at the origin.
double max_real_eigenvalue_at_origin(const DynamicalSystem& sys);

/// Builtin benchmark systems.
///
///   s2_cubic       x1' = x1 - x1^3 + x2,  x2' = 3 x1 - x2
///   s2_pendulum    x1' = x2,  x2' = -sin(x1) - x2          (g = l = k = m = 1)
///   s2_linear      x1' = x2,  x2' = -x1 - x2               (pendulum linearization)
///   s3_cubic       x1' = -2 x1 + x1^3, x2' = -x2 + x1^2, x3' = -x3
///   s3_rotational  x1' = -x1, x2' = -x1 - x3 - x1 x3, x3' = (x1 + 1) x2
///   s3_shifted     x1' = -x2 x3 + 1, x2' = x1 x3 - x2, x3' = x3^2 (1 - x3)
///   u2_saddle      x1' = -x1 + x2^2, x2' = 2 x2 - x1^3
///   u2_quad        x1' = x1 - x2, x2' = -x1^2 + x2
///   u3_mixed       x1' = 3 x1 - x2, x2' = -x1^3 + 4 x2, x3' = x3
///
/// s3_shifted is listed as stable in its source table but f(0) = (1, 0, 0),
/// so the origin is not an equilibrium; check_equilibrium rejects it.
/// u3_mixed reads the printed "4x^2" term as 4 x2.
const std::vector<DynamicalSystem>& builtin_systems();

std::optional<DynamicalSystem> find_builtin(std::string_view name);

/// Builtins that pass check_equilibrium, in registry order.
std::vector<DynamicalSystem> benchmark_systems();

}  // namespace lyapnet
