#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stoqlab/sosround.hpp"

#include <nlohmann/json.hpp>

using namespace stoqlab;
using namespace stoqlab::sosround;

namespace {

MomentOracle basis_oracle(int d, int t) {
  MomentOracle o;
  o.d = d;
  o.t = t;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e[0] = 1.0;
  o.weights = {1.0};
  o.vectors = {e};
  return o;
}

MomentOracle half_e1_half_e2(int t = 2) {
  MomentOracle o;
  o.d = 2;
  o.t = t;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2), e2 = Eigen::VectorXd::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  o.weights = {0.5, 0.5};
  o.vectors = {e1, e2};
  return o;
}

MomentOracle random_oracle(int d, int t, int comps, std::mt19937_64& rng) {
  MomentOracle o;
  o.d = d;
  o.t = t;
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  std::normal_distribution<double> gauss;
  double tot = 0;
  for (int i = 0; i < comps; ++i) {
    o.weights.push_back(uni(rng));
    tot += o.weights.back();
    Eigen::VectorXd v =
        Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return gauss(rng); });
    v.normalize();
    o.vectors.push_back(v);
  }
  for (auto& w : o.weights) w /= tot;
  o.validate();
  return o;
}

}  // namespace

TEST_CASE("marginal and direct rounding") {
  const MomentOracle e1 = basis_oracle(3, 2);
  CHECK(marginal(e1)[0] == doctest::Approx(1.0));
  CHECK(direct_round(e1)[0] == doctest::Approx(1.0));

  const MomentOracle mix = half_e1_half_e2();
  const Eigen::VectorXd m = marginal(mix);
  CHECK(m[0] == doctest::Approx(0.5));
  CHECK(m[1] == doctest::Approx(0.5));
  const Eigen::VectorXd x = direct_round(mix);
  CHECK(x[0] == doctest::Approx(1.0 / std::numbers::sqrt2));
  CHECK(x.norm() == doctest::Approx(1.0));

  // single vector (1/sqrt2, 1/sqrt2): uniform marginal
  MomentOracle o;
  o.d = 2;
  o.t = 2;
  Eigen::VectorXd v(2);
  v << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  o.weights = {1.0};
  o.vectors = {v};
  CHECK(marginal(o)[0] == doctest::Approx(0.5));

  // any oracle: ||x*|| = 1
  std::mt19937_64 rng(137);
  for (int i = 0; i < 20; ++i)
    CHECK(direct_round(random_oracle(3, 2, 3, rng)).norm() == doctest::Approx(1.0));
}

TEST_CASE("joint law") {
  const MomentOracle e1 = basis_oracle(2, 2);
  const std::vector<double> j1 = joint_law(e1, 2);
  CHECK(j1[0] == doctest::Approx(1.0));

  const MomentOracle mix = half_e1_half_e2();
  const std::vector<double> j2 = joint_law(mix, 2);
  CHECK(j2[0] == doctest::Approx(0.5));   // (1,1)
  CHECK(j2[3] == doctest::Approx(0.5));   // (2,2)
  CHECK(j2[1] == doctest::Approx(0.0));

  // single-vector oracle: joint = marginal^t
  std::mt19937_64 rng(139);
  const MomentOracle single = random_oracle(3, 2, 1, rng);
  const std::vector<double> j3 = joint_law(single, 2);
  const Eigen::VectorXd m = marginal(single);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(j3[static_cast<std::size_t>(a + 3 * b)] == doctest::Approx(m[a] * m[b]));

  double sum = 0;
  for (double x : joint_law(random_oracle(4, 3, 3, rng), 3)) sum += x;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("hellinger between joint and product") {
  CHECK(hellinger_joint_product(basis_oracle(2, 2), 2) == doctest::Approx(0.0));
  CHECK(hellinger_joint_product(half_e1_half_e2(), 2) ==
        doctest::Approx(std::sqrt(1.0 - 1.0 / std::numbers::sqrt2)));
  std::mt19937_64 rng(149);
  CHECK(hellinger_joint_product(random_oracle(3, 2, 3, rng), 1) == doctest::Approx(0.0));
}

TEST_CASE("conditioning") {
  const MomentOracle e1 = basis_oracle(2, 2);
  const MomentOracle same = condition(e1, {0});
  CHECK(same.weights.size() == 1);

  const MomentOracle mix = half_e1_half_e2();
  const MomentOracle pinned = condition(mix, {0});
  REQUIRE(pinned.weights.size() == 1);
  CHECK(pinned.vectors[0][0] == doctest::Approx(1.0));

  CHECK_THROWS(condition(e1, {1}));  // zero mass

  // conditioning preserves vectors and reweights
  std::mt19937_64 rng(151);
  const MomentOracle o = random_oracle(3, 2, 4, rng);
  const MomentOracle c = condition(o, {1});
  double s = 0;
  for (double w : c.weights) s += w;
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("entropy decrement") {
  const MomentOracle mix = half_e1_half_e2();
  const EntropyDecrement dec = entropy_decrement_check(mix, 2, 0.54);
  CHECK(dec.h_marginal == doctest::Approx(1.0));
  CHECK(dec.h_conditional == doctest::Approx(0.0));
  CHECK(dec.decrement == doctest::Approx(1.0));
  CHECK(dec.required == doctest::Approx(2 * 0.54 * 0.54 / 2));
  CHECK(dec.holds);
  REQUIRE(dec.pinning.size() == 1);
  CHECK(dec.pinning[0] == 0);  // lexicographically least

  // independent oracle: premise fails
  CHECK_THROWS(entropy_decrement_check(basis_oracle(2, 2), 2, 0.1));

  // three-component correlated mixture at d = 3
  MomentOracle o;
  o.d = 3;
  o.t = 2;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
    e[i] = 1.0;
    o.weights.push_back(1.0 / 3);
    o.vectors.push_back(e);
  }
  const double dh = hellinger_joint_product(o, 2);
  const EntropyDecrement d3 = entropy_decrement_check(o, 2, 0.9 * dh);
  CHECK(d3.holds);
}

TEST_CASE("tensor value") {
  {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd x(2);
    x << 0.6, 0.8;
    CHECK(tensor_value(id, x, 2, 2) == doctest::Approx(1.0));
  }
  {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 0) = 1.0;  // e_(1,1) e_(1,1)^T
    Eigen::VectorXd e1(2);
    e1 << 1, 0;
    CHECK(tensor_value(m, e1, 2, 2) == doctest::Approx(1.0));
  }
  {
    // the 4x4 counterexample matrix at x = (1/sqrt2, 1/sqrt2)
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 3) = m(3, 0) = 1.0;
    Eigen::VectorXd x(2);
    x << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    CHECK(tensor_value(m, x, 2, 2) == doctest::Approx(0.5));
  }
}

TEST_CASE("pseudoexpectation axioms hold for mixtures") {
  // E[(sum x_i^2 - 1) q(x)] = 0 for arbitrary polynomial samples
  std::mt19937_64 rng(157);
  const MomentOracle o = random_oracle(4, 2, 3, rng);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    double acc = 0;
    // q(x) = random quadratic evaluated on each component
    Eigen::MatrixXd q(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) q(i, j) = gauss(rng);
    for (std::size_t m = 0; m < o.components(); ++m) {
      const double norm2 = o.vectors[m].squaredNorm();
      acc += o.weights[m] * (norm2 - 1.0) * o.vectors[m].dot(q * o.vectors[m]);
    }
    CHECK(std::abs(acc) <= 1e-12);
  }
}

TEST_CASE("chain rule identity") {
  std::mt19937_64 rng(163);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 3);
    const int t = 2 + static_cast<int>(rng() % 2);
    const MomentOracle o = random_oracle(d, t, 3, rng);
    CHECK(kl_joint_product(o, t) ==
          doctest::Approx(chain_rule_mutual_information(o, t)).epsilon(1e-10));
  }
}

TEST_CASE("bks rounding loop") {
  // single-vector oracle at the optimum: hellinger 0, x* = |v| entrywise
  {
    MomentOracle o;
    o.d = 2;
    o.t = 2;
    Eigen::VectorXd v(2);
    v << 0.6, 0.8;
    o.weights = {1.0};
    o.vectors = {v};
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    const RoundingResult r = bks_round_loop(m, o, 0.5);
    CHECK(r.trace.empty());
    CHECK(r.x[0] == doctest::Approx(0.6));
    CHECK(r.x[1] == doctest::Approx(0.8));
    CHECK(r.value == doctest::Approx(1.0));
  }

  // half e1 + half e2 with M = I: the loop conditions once and lands on a
  // basis vector with value 1
  {
    const MomentOracle o = half_e1_half_e2();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    const RoundingResult r = bks_round_loop(m, o, 1.0);
    CHECK(r.trace.size() == 1);
    CHECK(r.value == doctest::Approx(1.0));
  }

  // random mixtures: final value >= E_final[M] - eps
  std::mt19937_64 rng(167);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const MomentOracle o = random_oracle(3, 2, 3, rng);
    Eigen::MatrixXd m(9, 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j <= i; ++j) {
        m(i, j) = uni(rng);
        m(j, i) = m(i, j);
      }
    const double eps = 0.4;
    const RoundingResult r = bks_round_loop(m, o, eps);
    CHECK(r.value >= r.final_oracle_value - eps - 1e-9);
  }
}

TEST_CASE("oracle JSON round trip") {
  const MomentOracle o = half_e1_half_e2();
  const MomentOracle back = oracle_from_json(oracle_to_json(o));
  CHECK(back.d == 2);
  CHECK(back.weights.size() == 2);
  CHECK(back.vectors[0][0] == doctest::Approx(1.0));
  nlohmann::json bad = {{"d", 2}, {"t", 2}, {"components", {{{"w", 1.0}, {"v", {2.0, 0.0}}}}}};
  CHECK_THROWS(oracle_from_json(bad));
}
