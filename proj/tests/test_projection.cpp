#include <doctest.h>

#include <cmath>

#include "fhs/basis.hpp"
#include "fhs/errors.hpp"
#include "fhs/projection.hpp"
#include "fhs/random.hpp"
#include "oracles.hpp"

using namespace fhs;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, RandomStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

Eigen::VectorXd uniform_x(int n, RandomStream& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = -M_PI + 2 * M_PI * rng.uniform();
  return x;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("projector simple cases") {
  const auto mean = projector(Eigen::MatrixXd::Ones(4, 1)).dense();
  CHECK(max_abs(mean.array() - 0.25) < 1e-15);

  Eigen::MatrixXd e(3, 2);
  e << 1, 0, 0, 1, 0, 0;
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
  want(0, 0) = want(1, 1) = 1;
  CHECK(max_abs(projector(e).dense() - want) < 1e-15);
}

TEST_CASE("projector against the normal equations and changes of basis") {
  RandomStream rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd a = random_matrix(6, 3, rng);
    const Eigen::MatrixXd q = projector(a).dense();
    CHECK(max_abs(q - oracle::normal_projector(a)) < 1e-10);
    const Eigen::MatrixXd c = random_matrix(3, 3, rng);
    CHECK(max_abs(projector(a * c).dense() - q) < 1e-8);
    CHECK(max_abs(q * q - q) < 1e-12);
    CHECK(max_abs(q - q.transpose()) < 1e-15);
  }
}

TEST_CASE("rank deficiency is reported") {
  RandomStream rng(11);
  Eigen::MatrixXd a = random_matrix(10, 3, rng);
  a.col(2) = a.col(0) + 2 * a.col(1);
  try {
    (void)projector(a);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("rank deficient: 1") != std::string::npos);
  }
}

TEST_CASE("orthogonal decomposition invariants") {
  RandomStream rng(12);
  const Eigen::VectorXd x = uniform_x(200, rng);
  const auto basis = make_basis(8, 3, x.minCoeff(), x.maxCoeff());
  const auto phi = design_matrix(basis, x);
  const Eigen::MatrixXd phi0 = polynomial_null_design(x, 1);
  const auto sd = orthogonal_complement(phi, phi0);

  CHECK(sd.d0 == 2);
  CHECK(sd.phi1.cols() == 6);
  const Eigen::MatrixXd qp = oracle::normal_projector(phi.values);
  const Eigen::MatrixXd q0 = oracle::normal_projector(phi0);
  const Eigen::MatrixXd q1 = sd.q1.dense();
  CHECK(max_abs(sd.q_phi.dense() - qp) < 1e-8);
  CHECK(max_abs(sd.q0.dense() - q0) < 1e-8);
  CHECK(max_abs(qp - q0 - q1) < 1e-8);
  CHECK(max_abs(q1 * q1 - q1) < 1e-8);
  CHECK(max_abs(q1 * q0) < 1e-8);
  CHECK(std::abs(q1.trace() - 6.0) < 1e-8);
  CHECK(std::abs(sd.q0.dense().trace() - 2.0) < 1e-8);
  CHECK(max_abs(sd.phi1.transpose() * phi0) < 1e-10 * max_abs(phi0));

  Eigen::MatrixXd blocks(200, 8);
  blocks << sd.q0.basis(), sd.q1.basis();
  CHECK(max_abs(phi.values * sd.to_coefficients - blocks) < 1e-8);
}

TEST_CASE("nested polynomial spaces") {
  RandomStream rng(13);
  const Eigen::VectorXd x = uniform_x(50, rng);
  const Eigen::MatrixXd phi = polynomial_null_design(x, 2);
  const auto sd = orthogonal_complement(phi, polynomial_null_design(x, 1));
  CHECK(sd.shrunk_dim() == 1);
  CHECK(max_abs(sd.q0.dense() + sd.q1.dense() - sd.q_phi.dense()) < 1e-10);

  const auto single = orthogonal_complement(phi, phi.col(0));
  CHECK(std::abs(single.q1.dense().trace() - 2.0) < 1e-10);
}

TEST_CASE("errors: not nested, too large a null space") {
  RandomStream rng(14);
  const Eigen::VectorXd x = uniform_x(100, rng);
  const auto basis = make_basis(8, 3, x.minCoeff(), x.maxCoeff());
  const auto phi = design_matrix(basis, x);
  const Eigen::MatrixXd sine = x.array().sin().matrix();
  CHECK_THROWS_WITH_AS(orthogonal_complement(phi, sine), doctest::Contains("not nested"), NumericalError);
  CHECK_THROWS_AS(orthogonal_complement(phi, phi.values), ConfigError);
}

TEST_CASE("shrinkage mean: endpoints, dense oracle, monotone path") {
  RandomStream rng(15);
  const Eigen::VectorXd x = uniform_x(120, rng);
  const auto basis = make_basis(8, 3, x.minCoeff(), x.maxCoeff());
  const auto phi = design_matrix(basis, x);
  const Eigen::MatrixXd phi0 = polynomial_null_design(x, 1);
  const auto sd = orthogonal_complement(phi, phi0);
  Eigen::VectorXd y(120);
  for (int i = 0; i < 120; ++i) y[i] = std::sin(x[i]) + rng.normal();

  CHECK(max_abs(shrinkage_mean(y, 0.0, sd) - sd.q_phi.apply(y)) < 1e-12);
  CHECK(max_abs(shrinkage_mean(y, 1.0, sd) - sd.q0.apply(y)) < 1e-12);
  CHECK(max_abs(shrinkage_mean(y, 0.3, sd) - oracle::penalized_fit(phi.values, phi0, y, 0.3)) < 1e-8);

  const Eigen::VectorXd target = sd.q0.apply(y);
  double last = INFINITY;
  for (double w = 0.0; w <= 1.0; w += 0.05) {
    const double dist = (shrinkage_mean(y, w, sd) - target).norm();
    CHECK(dist <= last + 1e-12);
    last = dist;
  }
  CHECK_THROWS_AS(shrinkage_mean(y, 1.5, sd), ConfigError);
}

TEST_CASE("piecewise linear null design") {
  Eigen::VectorXd x(5);
  x << -3, -1, 0, 1, 3;
  const Eigen::MatrixXd p = piecewise_linear_null_design(x);
  CHECK(p.cols() == 4);
  CHECK(p(0, 0) == 1.0);
  CHECK(p(4, 1) == 4.0);  // (x + 1)+
  CHECK(p(0, 2) == 2.0);  // (-x - 1)+
  CHECK(p(4, 3) == 2.0);  // (x - 1)+
  CHECK(p(2, 1) == 1.0);
}
