#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lyapnet/systems.hpp"

namespace lyapnet {
namespace {

DynamicalSystem builtin(const char* name) {
  auto sys = find_builtin(name);
  if (!sys) throw std::runtime_error(std::string("missing builtin ") + name);
  return *sys;
}

void expect_matrix_near(const Matrix& got, const Matrix& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    for (std::size_t j = 0; j < got.size(); ++j) EXPECT_NEAR(got[i][j], want[i][j], tol) << i << "," << j;
  }
}

TEST(Systems, RegistryContents) {
  std::vector<std::string> names;
  for (const auto& s : builtin_systems()) names.push_back(s.name());
  const std::vector<std::string> want{"s2_cubic", "s2_pendulum", "s2_linear", "s3_cubic", "s3_rotational",
                                      "s3_shifted", "u2_saddle", "u2_quad", "u3_mixed"};
  EXPECT_EQ(names, want);
  EXPECT_EQ(benchmark_systems().size(), 8u);
  EXPECT_FALSE(find_builtin("nope").has_value());
}

TEST(Systems, EvaluatePendulumAtOrigin) {
  const State f = builtin("s2_pendulum").evaluate(State{0.0, 0.0});
  EXPECT_EQ(f, (State{0.0, 0.0}));
}

TEST(Systems, EvaluateCubicAndSaddle) {
  EXPECT_EQ(builtin("s2_cubic").evaluate(State{1.0, 1.0}), (State{1.0, 2.0}));
  EXPECT_EQ(builtin("u2_saddle").evaluate(State{0.0, 1.0}), (State{1.0, 2.0}));
}

TEST(Systems, EvaluateRejectsNonFinite) {
  const auto sys = DynamicalSystem::from_strings("blowup", 1, {"1/x1"});
  EXPECT_THROW(sys.evaluate(State{0.0}), ConfigError);
  EXPECT_THROW(sys.evaluate(State{0.0, 1.0}), std::invalid_argument);
}

TEST(Systems, ConstructionValidates) {
  EXPECT_THROW(DynamicalSystem::from_strings("short", 2, {"x1"}), ConfigError);
  EXPECT_THROW(DynamicalSystem::from_strings("oob", 2, {"x1", "x3"}), ParseError);
  EXPECT_THROW(DynamicalSystem("oob", 1, {Expr::variable(2)}), ConfigError);
}

TEST(Systems, EquilibriumChecks) {
  EXPECT_TRUE(check_equilibrium(builtin("s2_pendulum")).ok);
  EXPECT_TRUE(check_equilibrium(DynamicalSystem::from_strings("rot", 2, {"x2", "-x1"})).ok);

  const auto shifted = check_equilibrium(builtin("s3_shifted"));
  EXPECT_FALSE(shifted.ok);
  EXPECT_EQ(shifted.residual, (State{1.0, 0.0, 0.0}));
  EXPECT_EQ(shifted.residual_norm, 1.0);

  for (const auto& s : builtin_systems()) {
    if (s.name() != "s3_shifted") {
      EXPECT_TRUE(check_equilibrium(s, 1e-12).ok) << s.name();
    }
  }
  EXPECT_THROW(check_equilibrium(builtin("s2_pendulum"), -1.0), std::invalid_argument);
}

TEST(Systems, EquilibriumToleranceIsInclusive) {
  const auto sys = DynamicalSystem::from_strings("offset", 1, {"x1 + 0.001"});
  EXPECT_FALSE(check_equilibrium(sys).ok);
  EXPECT_TRUE(check_equilibrium(sys, 0.001).ok);
}

TEST(Systems, JacobianOracles) {
  const State origin2{0.0, 0.0};
  expect_matrix_near(jacobian_fd(builtin("s2_pendulum"), origin2), {{0, 1}, {-1, -1}}, 1e-6);
  expect_matrix_near(jacobian_fd(builtin("u2_saddle"), origin2), {{-1, 0}, {0, 2}}, 1e-6);
  const auto rot = DynamicalSystem::from_strings("rot", 2, {"x2", "-x1"});
  expect_matrix_near(jacobian_fd(rot, State{0.4, -1.7}), {{0, 1}, {-1, 0}}, 1e-6);
  EXPECT_THROW(jacobian_fd(rot, origin2, 0.0), std::invalid_argument);
}

double max_real(const std::vector<std::complex<double>>& ev) {
  double m = -1e300;
  for (const auto& e : ev) m = std::max(m, e.real());
  return m;
}

TEST(Eigenvalues, ClosedFormCases) {
  // diag
  auto ev = small_eigenvalues({{-2, 0, 0}, {0, -1, 0}, {0, 0, -3}});
  std::vector<double> re;
  for (const auto& e : ev) re.push_back(e.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -3, 1e-12);
  EXPECT_NEAR(re[1], -2, 1e-12);
  EXPECT_NEAR(re[2], -1, 1e-12);

  // rotation: +-i
  ev = small_eigenvalues({{0, 1}, {-1, 0}});
  EXPECT_NEAR(std::abs(ev[0].imag()), 1.0, 1e-12);
  EXPECT_NEAR(ev[0].real(), 0.0, 1e-12);

  // pendulum linearization: -1/2 +- i sqrt(3)/2
  ev = small_eigenvalues({{0, 1}, {-1, -1}});
  EXPECT_NEAR(ev[0].real(), -0.5, 1e-12);
  EXPECT_NEAR(std::abs(ev[0].imag()), std::sqrt(3.0) / 2, 1e-12);

  // 3x3 with a complex pair: block diag(-1, [[0,-1],[1,0]])
  ev = small_eigenvalues({{-1, 0, 0}, {0, 0, -1}, {0, 1, 0}});
  EXPECT_NEAR(max_real(ev), 0.0, 1e-9);

  // triple root
  ev = small_eigenvalues({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  for (const auto& e : ev) EXPECT_NEAR(e.real(), 2.0, 1e-9);

  EXPECT_NEAR(small_eigenvalues({{4.5}})[0].real(), 4.5, 0);
  EXPECT_THROW(small_eigenvalues(Matrix(4, std::vector<double>(4, 0.0))), std::invalid_argument);
}

TEST(Eigenvalues, CubicRootsSatisfyCharacteristicPolynomial) {
  const Matrix a{{1, 2, 0.5}, {-3, 0.2, 1}, {0.7, -1, -2}};
  const double tr = a[0][0] + a[1][1] + a[2][2];
  for (const auto& l : small_eigenvalues(a)) {
    std::complex<double> m[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? l : 0.0) - a[i][j];
    }
    const std::complex<double> det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    EXPECT_LT(std::abs(det), 1e-9) << l;
  }
  std::complex<double> sum = 0;
  for (const auto& l : small_eigenvalues(a)) sum += l;
  EXPECT_NEAR(sum.real(), tr, 1e-12);
}

TEST(Eigenvalues, SaddleInstabilityOracle) {
  EXPECT_GE(max_real_eigenvalue_at_origin(builtin("u2_saddle")), 1.9);
  EXPECT_LT(max_real_eigenvalue_at_origin(builtin("s2_pendulum")), 0.0);
  EXPECT_LT(max_real_eigenvalue_at_origin(builtin("s3_cubic")), 0.0);
}

}  // namespace
}  // namespace lyapnet
