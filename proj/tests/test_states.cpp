#include <doctest.h>

#include <cmath>
#include <random>

#include "stoqlab/states.hpp"

#include <nlohmann/json.hpp>

using namespace stoqlab;
using namespace stoqlab::states;

namespace {

Distribution random_distribution(int n, std::mt19937_64& rng, bool full_support = true) {
  std::uniform_real_distribution<double> uni(full_support ? 0.05 : 0.0, 1.0);
  Distribution d;
  double tot = 0;
  for (int i = 0; i < n; ++i) {
    const double w = uni(rng);
    d.p[static_cast<Word>(i)] = w;
    tot += w;
  }
  for (auto& [k, v] : d.p) v /= tot;
  return d;
}

}  // namespace

TEST_CASE("tensor products of states") {
  const NonNegativeState zero = NonNegativeState::basis(1, 0);
  const NonNegativeState one = NonNegativeState::basis(1, 1);
  const NonNegativeState both = tensor(zero, one);
  CHECK(both.width == 2);
  CHECK(both.amplitude(0b10) == doctest::Approx(1.0));  // "01": qubit0=0, qubit1=1

  const NonNegativeState plus = NonNegativeState::subset(1, {0, 1});
  const NonNegativeState pp = tensor(plus, plus);
  for (Word x = 0; x < 4; ++x) CHECK(pp.amplitude(x) == doctest::Approx(0.5));

  const NonNegativeState s = NonNegativeState::subset(2, {0b00, 0b10});
  const NonNegativeState st = tensor(s, zero);
  CHECK(st.amplitude(0b000) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(st.amplitude(0b010) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("inner products") {
  const NonNegativeState s = NonNegativeState::subset(2, {0, 1});
  CHECK(inner_product(s, s) == doctest::Approx(1.0));
  const NonNegativeState t = NonNegativeState::basis(2, 0);
  CHECK(inner_product(t, s) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(inner_product(NonNegativeState::basis(1, 0), NonNegativeState::basis(1, 1)) == 0.0);
  CHECK_THROWS(inner_product(NonNegativeState::basis(1, 0), NonNegativeState::basis(2, 0)));
}

TEST_CASE("squared distribution") {
  const NonNegativeState plus = NonNegativeState::subset(1, {0, 1});
  const Distribution d = squared_distribution(plus);
  CHECK(d.p.at(0) == doctest::Approx(0.5));
  CHECK(d.p.at(1) == doctest::Approx(0.5));

  NonNegativeState w;
  w.width = 1;
  w.amp[0] = std::sqrt(0.8);
  w.amp[1] = std::sqrt(0.2);
  const Distribution dw = squared_distribution(w);
  CHECK(dw.p.at(0) == doctest::Approx(0.8));
  CHECK(dw.p.at(1) == doctest::Approx(0.2));
}

TEST_CASE("absolutize and the overlap inequality") {
  const NonNegativeState plus = absolutize(1, {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)});
  CHECK(plus.amplitude(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(plus.amplitude(1) == doctest::Approx(1.0 / std::sqrt(2.0)));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int width = 3;
    std::vector<double> v(8);
    double n2 = 0;
    for (auto& x : v) {
      x = gauss(rng);
      n2 += x * x;
    }
    for (auto& x : v) x /= std::sqrt(n2);
    std::vector<double> wv(8);
    double wn = 0;
    for (auto& x : wv) {
      x = uni(rng);
      wn += x * x;
    }
    NonNegativeState w;
    w.width = width;
    for (int i = 0; i < 8; ++i) w.amp[static_cast<Word>(i)] = wv[static_cast<std::size_t>(i)] / std::sqrt(wn);
    const NonNegativeState av = absolutize(width, v);
    double signed_ov = 0;
    for (int i = 0; i < 8; ++i) signed_ov += w.amplitude(static_cast<Word>(i)) * v[static_cast<std::size_t>(i)];
    CHECK(inner_product(w, av) >= std::abs(signed_ov) - 1e-12);
  }
}

TEST_CASE("distance formulas") {
  std::mt19937_64 rng(9);
  const Distribution p = random_distribution(6, rng);
  CHECK(tv(p, p) == doctest::Approx(0.0));
  CHECK(hellinger2(p, p) == doctest::Approx(0.0));
  CHECK(kl(p, p) == doctest::Approx(0.0));

  Distribution a, b;
  a.p[0] = 1.0;
  b.p[1] = 1.0;
  CHECK(tv(a, b) == doctest::Approx(1.0));
  CHECK(hellinger2(a, b) == doctest::Approx(1.0));
  CHECK(std::isinf(kl(a, b)));

  Distribution u2, point;
  u2.p[0] = 0.5;
  u2.p[1] = 0.5;
  point.p[0] = 1.0;
  CHECK(hellinger2(u2, point) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
}

TEST_CASE("2 H^2 <= KL on random pairs") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const Distribution p = random_distribution(5, rng);
    const Distribution q = random_distribution(5, rng);
    CHECK(2.0 * hellinger2(p, q) <= kl(p, q) + 1e-12);
  }
}

TEST_CASE("squared distribution of a tensor is the product distribution") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int wa = 1; wa <= 3; ++wa)
    for (int wb = 1; wb <= 3; ++wb) {
      NonNegativeState a, b;
      a.width = wa;
      b.width = wb;
      double na = 0, nb = 0;
      for (Word x = 0; x < (Word{1} << wa); ++x) {
        a.amp[x] = uni(rng);
        na += a.amp[x] * a.amp[x];
      }
      for (Word x = 0; x < (Word{1} << wb); ++x) {
        b.amp[x] = uni(rng);
        nb += b.amp[x] * b.amp[x];
      }
      for (auto& [x, v] : a.amp) v /= std::sqrt(na);
      for (auto& [x, v] : b.amp) v /= std::sqrt(nb);
      const Distribution joint = squared_distribution(tensor(a, b));
      const Distribution da = squared_distribution(a);
      const Distribution db = squared_distribution(b);
      for (const auto& [xa, pa] : da.p)
        for (const auto& [xb, pb] : db.p)
          CHECK(joint.p.at(xa | (xb << wa)) == doctest::Approx(pa * pb).epsilon(1e-12));
    }
}

TEST_CASE("entropy") {
  for (int d : {2, 4, 8, 16}) {
    Distribution u;
    for (int i = 0; i < d; ++i) u.p[static_cast<Word>(i)] = 1.0 / d;
    CHECK(entropy(u) == doctest::Approx(std::log2(static_cast<double>(d))));
  }
  Distribution point;
  point.p[3] = 1.0;
  CHECK(entropy(point) == 0.0);  // 0 log 0 = 0 convention
}

TEST_CASE("fidelity and trace distance identities") {
  const NonNegativeState zero = NonNegativeState::basis(1, 0);
  Eigen::VectorXd e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  CHECK(fidelity_pure_mixed(zero, DensityMatrix::pure(e0)) == doctest::Approx(1.0));
  CHECK(fidelity_pure_mixed(zero, DensityMatrix::pure(e1)) == doctest::Approx(0.0));
  DensityMatrix half;
  half.m = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  CHECK(fidelity_pure_mixed(zero, half) == doctest::Approx(0.5));

  const NonNegativeState a = NonNegativeState::basis(1, 0);
  const NonNegativeState b = NonNegativeState::basis(1, 1);
  CHECK(trace_distance_pure(a, a) == doctest::Approx(0.0));
  CHECK(trace_distance_pure(a, b) == doctest::Approx(1.0));
  NonNegativeState c;
  c.width = 1;
  c.amp[0] = 0.5;
  c.amp[1] = std::sqrt(3.0) / 2.0;
  CHECK(trace_distance_pure(a, c) == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("exact states stay normalized and match their double view") {
  const ExactState s = ExactState::subset(3, {1, 4, 6});
  s.validate();
  const NonNegativeState d = s.to_double();
  d.validate();
  CHECK(d.amplitude(1) == doctest::Approx(1.0 / std::sqrt(3.0)));

  const ExactState t = tensor(s, ExactState::basis(1, 1));
  t.validate();
  CHECK(t.width == 4);
  CHECK(t.coeff.count(1 | (1 << 3)) == 1);
}

TEST_CASE("state JSON round trip and subset shorthand") {
  const NonNegativeState s = NonNegativeState::subset(2, {0b01, 0b10});
  const NonNegativeState back = state_from_json(state_to_json(s));
  CHECK(back.width == 2);
  CHECK(back.amplitude(0b01) == doctest::Approx(s.amplitude(0b01)));

  nlohmann::json j = {{"width", 2}, {"subset", {"10", "01"}}};
  CHECK(json_is_subset_state(j));
  const ExactState e = exact_state_from_json(j);
  CHECK(e.coeff.size() == 2);
  CHECK(e.scale2 == Rat(1, 2));

  nlohmann::json bad = {{"width", 1}, {"amplitudes", {{"0", 2.0}}}};
  CHECK_THROWS(state_from_json(bad));
}

TEST_CASE("density matrix validation") {
  DensityMatrix good;
  good.m = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  CHECK_NOTHROW(good.validate());
  DensityMatrix bad;
  bad.m = Eigen::MatrixXd::Identity(2, 2);  // trace 2
  CHECK_THROWS(bad.validate());
}
