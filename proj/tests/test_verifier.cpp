#include <doctest.h>

#include <cmath>
#include <random>

#include "stoqlab/verifier.hpp"

#include <nlohmann/json.hpp>

using namespace stoqlab;
using namespace stoqlab::verifier;
using revsim::Gate;
using revsim::ReversibleCircuit;

namespace {

ReversibleCircuit random_circuit(int width, int n_gates, std::mt19937_64& rng) {
  ReversibleCircuit c(width);
  std::uniform_int_distribution<int> q(0, width - 1);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < n_gates; ++i) {
    const int kk = kind(rng);
    if (kk == 0 || width < 2) {
      c.append(Gate::x(q(rng)));
    } else if (kk == 1 || width < 3) {
      int a = q(rng), b = q(rng);
      while (b == a) b = q(rng);
      c.append(Gate::cnot(a, b));
    } else {
      int a = q(rng), b = q(rng), t = q(rng);
      while (b == a) b = q(rng);
      while (t == a || t == b) t = q(rng);
      c.append(Gate::ccx(a, b, t));
    }
  }
  return c;
}

states::ExactState random_subset_witness(int width, std::mt19937_64& rng) {
  std::uniform_int_distribution<Word> pick(0, (Word{1} << width) - 1);
  std::uniform_int_distribution<int> size_dist(1, 1 << std::min(width, 3));
  std::set<Word> sup;
  const int target = size_dist(rng);
  while (static_cast<int>(sup.size()) < target) sup.insert(pick(rng));
  return states::ExactState::subset(width, sup);
}

}  // namespace

TEST_CASE("acceptance of trivial verifiers") {
  // empty circuit, output a plus ancilla: accepts with probability 1
  StoqVerifier plus_out;
  plus_out.layout = {1, 1, 0, 1, 1};
  plus_out.circuit = ReversibleCircuit(2);
  CHECK(acceptance_probability(plus_out, states::NonNegativeState::basis(1, 0)) ==
        doctest::Approx(1.0));

  // empty circuit, output a zero ancilla: 1/2
  StoqVerifier zero_out;
  zero_out.layout = {1, 1, 1, 0, 1};
  zero_out.circuit = ReversibleCircuit(2);
  CHECK(acceptance_probability(zero_out, states::NonNegativeState::basis(1, 0)) ==
        doctest::Approx(0.5));

  // V = X on the output zero ancilla: still 1/2
  StoqVerifier x_out = zero_out;
  x_out.circuit.append(Gate::x(1));
  CHECK(acceptance_probability(x_out, states::NonNegativeState::basis(1, 0)) ==
        doctest::Approx(0.5));

  // witness width mismatch errors out
  CHECK_THROWS(acceptance_probability(plus_out, states::NonNegativeState::basis(2, 0)));
}

TEST_CASE("branch overlap acceptance formula") {
  // layout: 1 witness qubit, 1 zero, 1 plus
  VerifierLayout lay{1, 1, 1, 1, 0};
  const states::NonNegativeState w = states::NonNegativeState::basis(1, 0);

  const ReversibleCircuit identity(lay.width());
  CHECK(branch_overlap_acceptance(identity, identity, lay, w) == doctest::Approx(1.0));

  ReversibleCircuit x_on_zero(lay.width());
  x_on_zero.append(Gate::x(lay.zero_offset()));
  CHECK(branch_overlap_acceptance(identity, x_on_zero, lay, w) == doctest::Approx(0.5));

  // r1 = CNOT(plus -> zero): overlap of (|00>+|01>)/sqrt2 with (|00>+|11>)/sqrt2
  ReversibleCircuit cnot_pz(lay.width());
  cnot_pz.append(Gate::cnot(lay.plus_offset(), lay.zero_offset()));
  CHECK(branch_overlap_acceptance(identity, cnot_pz, lay, w) == doctest::Approx(0.75));
}

TEST_CASE("built branch-overlap verifier matches the formula") {
  VerifierLayout lay{1, 1, 1, 1, 0};
  const ReversibleCircuit identity(lay.width());

  {
    const StoqVerifier v = build_branch_overlap_verifier(identity, identity, lay);
    CHECK(acceptance_probability(v, states::NonNegativeState::basis(1, 1)) ==
          doctest::Approx(1.0));
  }
  {
    ReversibleCircuit x_on_zero(lay.width());
    x_on_zero.append(Gate::x(lay.zero_offset()));
    const StoqVerifier v = build_branch_overlap_verifier(x_on_zero, identity, lay);
    CHECK(acceptance_probability(v, states::NonNegativeState::basis(1, 0)) ==
          doctest::Approx(0.5));
  }

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    VerifierLayout l2{1, 2, 2, 2, 0};
    const ReversibleCircuit r0 = random_circuit(l2.width(), 15, rng);
    const ReversibleCircuit r1 = random_circuit(l2.width(), 15, rng);
    const states::ExactState w = random_subset_witness(2, rng);
    const Rat direct = branch_overlap_acceptance_exact(r0, r1, l2, w);
    const StoqVerifier v = build_branch_overlap_verifier(r0, r1, l2);
    const Rat built = acceptance_probability_exact(v, w);
    CHECK(direct == built);
    // float path agrees with the exact path
    CHECK(branch_overlap_acceptance(r0, r1, l2, w.to_double()) ==
          doctest::Approx(to_double(direct)).epsilon(1e-12));
  }
}

TEST_CASE("gamma form equivalence") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    VerifierLayout lay{1, 2, 2, 2, 0};
    std::uniform_int_distribution<int> out_d(0, lay.width() - 1);
    lay.output = out_d(rng);
    StoqVerifier v;
    v.layout = lay;
    v.circuit = random_circuit(lay.width(), 18, rng);
    const states::ExactState w = random_subset_witness(lay.witness_qubits(), rng);
    const Rat direct = acceptance_probability_exact(v, w);
    const Rat via_gamma = branch_overlap_acceptance_exact(
        gamma_form(v), ReversibleCircuit(lay.width()), lay, w);
    CHECK(direct == via_gamma);
  }
}

TEST_CASE("acceptance of (Gamma, I) pairs on non-negative witnesses stays in [1/2, 1]") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    VerifierLayout lay{1, 2, 1, 1, 0};
    const ReversibleCircuit g = random_circuit(lay.width(), 12, rng);
    const states::ExactState w = random_subset_witness(2, rng);
    const Rat acc =
        branch_overlap_acceptance_exact(g, ReversibleCircuit(lay.width()), lay, w);
    CHECK(acc >= Rat(1, 2));
    CHECK(acc <= 1);
  }
}

TEST_CASE("signed witnesses do not beat non-negative ones at 2-dim witness") {
  // grid over signed vs non-negative single-qubit witnesses for a fixed
  // verifier; the maxima agree
  VerifierLayout lay{1, 1, 1, 1, 0};
  StoqVerifier v;
  v.layout = lay;
  v.layout.output = lay.zero_offset();
  v.circuit = ReversibleCircuit(lay.width());
  v.circuit.append(Gate::cnot(0, lay.zero_offset()));
  v.circuit.append(Gate::ccx(0, lay.plus_offset(), lay.zero_offset()));

  // signed amplitudes only flip the sign of cross terms of Gamma's overlap;
  // evaluate the quadratic form directly on the effective 2x2 matrix
  const ReversibleCircuit gamma = gamma_form(v);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  for (Word a = 0; a < 2; ++a)
    for (Word u = 0; u < 2; ++u) {
      const Word x = a | (u << 2);
      const Word y = gamma.apply_word(x);
      if (get_bit(y, 1)) continue;  // left the zero sector
      m(static_cast<int>(get_bit(y, 0)), static_cast<int>(a)) += 0.5;
    }
  const Eigen::MatrixXd sym = (m + m.transpose()) / 2.0;
  double best_signed = -1, best_nonneg = -1;
  for (int i = 0; i <= 256; ++i) {
    const double th = 2.0 * M_PI * i / 256;
    Eigen::VectorXd psi(2);
    psi << std::cos(th), std::sin(th);
    const double val = psi.dot(sym * psi);
    best_signed = std::max(best_signed, val);
    if (psi[0] >= 0 && psi[1] >= 0) best_nonneg = std::max(best_nonneg, val);
  }
  CHECK(best_nonneg == doctest::Approx(best_signed).epsilon(1e-3));
}

TEST_CASE("swap test acceptance") {
  Eigen::VectorXd e0(2), e1(2), plus(2);
  e0 << 1, 0;
  e1 << 0, 1;
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  using states::DensityMatrix;
  CHECK(swap_test_acceptance(DensityMatrix::pure(e0), DensityMatrix::pure(e0)) ==
        doctest::Approx(1.0));
  CHECK(swap_test_acceptance(DensityMatrix::pure(e0), DensityMatrix::pure(e1)) ==
        doctest::Approx(0.5));
  CHECK(swap_test_acceptance(DensityMatrix::pure(e0), DensityMatrix::pure(plus)) ==
        doctest::Approx(0.75));
}

TEST_CASE("close image fidelity") {
  VerifierLayout lay{1, 1, 1, 1, 0};
  const ReversibleCircuit identity(lay.width());

  // R = I, witness |0>, pattern all-zeros on the witness qubit
  CHECK(close_image_fidelity(identity, lay, states::NonNegativeState::basis(1, 0), {0}, {}) ==
        doctest::Approx(1.0));
  // witness |1> on a designated zero-pattern qubit
  CHECK(close_image_fidelity(identity, lay, states::NonNegativeState::basis(1, 1), {0}, {}) ==
        doctest::Approx(0.0));
  // R = X on the designated qubit, witness |1> there
  ReversibleCircuit x0(lay.width());
  x0.append(Gate::x(0));
  CHECK(close_image_fidelity(x0, lay, states::NonNegativeState::basis(1, 1), {0}, {}) ==
        doctest::Approx(1.0));
  // plus-pattern qubit: the plus ancilla is untouched, fidelity 1
  CHECK(close_image_fidelity(identity, lay, states::NonNegativeState::basis(1, 0), {0},
                             {lay.plus_offset()}) == doctest::Approx(1.0));
  CHECK_THROWS(close_image_fidelity(identity, lay, states::NonNegativeState::basis(1, 0), {9},
                                    {}));
}

TEST_CASE("close image fidelity matches the swap test against the target state") {
  // the swap test between the reduced output state and the target accepts
  // with (1 + F^2)/2
  std::mt19937_64 rng(47);
  VerifierLayout lay{1, 2, 1, 1, 0};
  for (int trial = 0; trial < 10; ++trial) {
    const ReversibleCircuit r = random_circuit(lay.width(), 12, rng);
    const states::ExactState we = random_subset_witness(2, rng);
    const states::NonNegativeState w = we.to_double();
    const std::vector<int> zouts{0, lay.zero_offset()};
    const double f2 = close_image_fidelity(r, lay, w, zouts, {});

    // brute-force reduced density matrix on the two designated qubits
    Eigen::VectorXd full = Eigen::VectorXd::Zero(1 << lay.width());
    for (const auto& [xw, a] : w.amp)
      for (Word u = 0; u < 2; ++u)
        full[static_cast<Eigen::Index>(r.apply_word(xw | (u << lay.plus_offset())))] +=
            a / std::sqrt(2.0);
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(4, 4);
    for (Word x = 0; x < (Word{1} << lay.width()); ++x)
      for (Word y = 0; y < (Word{1} << lay.width()); ++y) {
        const Word xo = get_bit(x, 0) | (static_cast<Word>(get_bit(x, lay.zero_offset())) << 1);
        const Word yo = get_bit(y, 0) | (static_cast<Word>(get_bit(y, lay.zero_offset())) << 1);
        Word xr = (x & ~(Word{1} | (Word{1} << lay.zero_offset())));
        Word yr = (y & ~(Word{1} | (Word{1} << lay.zero_offset())));
        if (xr != yr) continue;
        rho(static_cast<Eigen::Index>(xo), static_cast<Eigen::Index>(yo)) += full[static_cast<Eigen::Index>(x)] * full[static_cast<Eigen::Index>(y)];
      }
    Eigen::VectorXd target = Eigen::VectorXd::Zero(4);
    target[0] = 1.0;
    const double swap_acc = 0.5 + 0.5 * (rho * (target * target.transpose())).trace();
    CHECK(swap_acc == doctest::Approx(0.5 + 0.5 * f2).epsilon(1e-12));
  }
}

TEST_CASE("verifier JSON round trip") {
  std::mt19937_64 rng(43);
  StoqVerifier v;
  v.layout = {2, 1, 1, 1, 2};
  v.circuit = random_circuit(v.layout.width(), 9, rng);
  const StoqVerifier back = verifier_from_json(verifier_to_json(v));
  CHECK(back.circuit == v.circuit);
  CHECK(back.layout.k == v.layout.k);
  CHECK(back.layout.output == v.layout.output);

  const StoqVerifier oracle = make_gamma_oracle_verifier(
      v.layout, [](Word x) { return x; }, "test-oracle");
  CHECK_THROWS(verifier_to_json(oracle));
}

TEST_CASE("simulation caps fail loudly") {
  StoqVerifier v;
  v.layout = {1, 1, 0, 1, 1};
  v.circuit = ReversibleCircuit(2);
  SimCaps caps;
  caps.max_weighted_support = 1;
  CHECK_THROWS(acceptance_probability(v, states::NonNegativeState::basis(1, 0), caps));
}
