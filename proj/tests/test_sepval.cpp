#include <doctest.h>

#include <cmath>
#include <random>

#include "stoqlab/sepval.hpp"

#include <nlohmann/json.hpp>

using namespace stoqlab;
using namespace stoqlab::sepval;

TEST_CASE("hsep of the identity is 1") {
  const PartitionedMatrix id = PartitionedMatrix::make({2, 2}, Eigen::MatrixXd::Identity(4, 4));
  CHECK(hsep_bruteforce(id).value == doctest::Approx(1.0));
  CHECK(hsep_alternating(id).value == doctest::Approx(1.0));
}

TEST_CASE("hsep of a diagonal projector") {
  // |01><01| in block coordinates: block1 = 0, block2 = 1 -> index 2
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(2, 2) = 1.0;
  const PartitionedMatrix p = PartitionedMatrix::make({2, 2}, m);
  CHECK(hsep_bruteforce(p).value == doctest::Approx(1.0));
}

TEST_CASE("remark counterexample value and multiplicativity failure") {
  const PartitionedMatrix m = remark_counterexample();
  CHECK(m.entrywise_nonneg);
  CHECK_FALSE(m.psd);
  const HsepResult bf = hsep_bruteforce(m, 64);
  CHECK(bf.value == doctest::Approx(0.5).epsilon(1e-9));
  const HsepResult alt = hsep_alternating(m);
  CHECK(alt.value == doctest::Approx(0.5).epsilon(1e-6));

  const MultiplicativityReport rep = check_multiplicativity(m, m);
  CHECK(rep.lhs >= 0.5 - 1e-6);
  CHECK(rep.rhs == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(rep.verdict == "EXCESS");
}

TEST_CASE("shift identity") {
  const PartitionedMatrix m = remark_counterexample();
  {
    const ShiftCheckReport r = hsep_shift_check(m, 1.0, 0.0);
    CHECK(r.pass);
  }
  {
    const ShiftCheckReport r = hsep_shift_check(m, 0.0, 1.0);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.pass);
  }
  {
    const ShiftCheckReport r = hsep_shift_check(m, 2.0, 3.0);
    CHECK(r.rhs == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(r.pass);
  }
}

TEST_CASE("alternating maximization agrees with brute force on random matrices") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const PartitionedMatrix m = random_nonneg({2, 2}, rng);
    const HsepResult bf = hsep_bruteforce(m, 64);
    const HsepResult alt = hsep_alternating(m, 12, 50, trial);
    CHECK(std::abs(bf.value - alt.value) <= bf.grid_error + 1e-6);
  }
}

TEST_CASE("tensor lower bound and product-form identity") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const PartitionedMatrix a = random_nonneg({2, 2}, rng);
    const PartitionedMatrix b = random_nonneg({2, 2}, rng);
    const double ha = hsep_bruteforce(a, 48).value;
    const double hb = hsep_bruteforce(b, 48).value;
    const PartitionedMatrix big = tensor_blockwise(a, b);
    const HsepResult hbig = hsep_alternating(big, 16, 60, trial);
    CHECK(hbig.value >= ha * hb - 1e-6);
  }

  for (int trial = 0; trial < 20; ++trial) {
    const PartitionedMatrix m = random_product_form({2, 2}, rng);
    REQUIRE(m.factors.has_value());
    const double lm1 = lambda_max_nonneg((*m.factors)[0]).value;
    const double lm2 = lambda_max_nonneg((*m.factors)[1]).value;
    const double h = std::max(hsep_bruteforce(m, 64).value, hsep_alternating(m).value);
    CHECK(h == doctest::Approx(lm1 * lm2).epsilon(1e-8));
  }
}

TEST_CASE("power iteration") {
  {
    const PerronResult r = lambda_max_nonneg(Eigen::MatrixXd::Identity(3, 3));
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.converged);
  }
  {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 1, 0;
    const PerronResult r = lambda_max_nonneg(m);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.vector[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(r.vector[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
  {
    Eigen::MatrixXd m(2, 2);
    m << 2, 1, 1, 2;
    CHECK(lambda_max_nonneg(m).value == doctest::Approx(3.0));
  }
  Eigen::MatrixXd neg(2, 2);
  neg << 1, -1, -1, 1;
  CHECK_THROWS(lambda_max_nonneg(neg));
}

TEST_CASE("signed grid agrees with non-negative grid for non-negative matrices") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const PartitionedMatrix m = random_nonneg({2, 2}, rng);
    const double nn = hsep_bruteforce(m, 48, false).value;
    const double sg = hsep_bruteforce(m, 48, true).value;
    CHECK(sg <= nn + 1e-9);
    CHECK(sg >= nn - 1e-6);
  }
}

TEST_CASE("matrix JSON round trip") {
  const PartitionedMatrix m = remark_counterexample();
  const PartitionedMatrix back = matrix_from_json(matrix_to_json(m));
  CHECK(back.dims == m.dims);
  CHECK((back.m - m.m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.entrywise_nonneg);
}

TEST_CASE("construction validates flags") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS(PartitionedMatrix::make({2}, asym));

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  std::vector<Eigen::MatrixXd> bad_factors{Eigen::MatrixXd::Identity(2, 2),
                                           2.0 * Eigen::MatrixXd::Identity(2, 2)};
  CHECK_THROWS(PartitionedMatrix::make({2, 2}, id, bad_factors));
}
