#include <doctest.h>

#include <cmath>
#include <random>

#include "stoqlab/rectclosure.hpp"
#include "stoqlab/sepval.hpp"

#include <nlohmann/json.hpp>

using namespace stoqlab;
using namespace stoqlab::rectclosure;
using revsim::Gate;
using revsim::ReversibleCircuit;

namespace {

SepRcdInstance identity_instance(int ell, int m0, int r) {
  SepRcdInstance inst;
  inst.ell = ell;
  inst.m0 = m0;
  inst.r = r;
  inst.gamma = ReversibleCircuit(inst.width());
  return inst;
}

SepRcdInstance x_on_ancilla_instance(int ell, int m0, int r) {
  SepRcdInstance inst = identity_instance(ell, m0, r);
  inst.gamma.append(Gate::x(2 * ell));
  return inst;
}

}  // namespace

TEST_CASE("transitions") {
  const SepRcdInstance id = identity_instance(2, 1, 1);
  for (Word a = 0; a < 4; ++a)
    for (Word b = 0; b < 4; ++b)
      for (Word u = 0; u < 2; ++u) {
        const Transition t = transition(id, a, b, u);
        REQUIRE(std::holds_alternative<GoodTransition>(t));
        const auto& g = std::get<GoodTransition>(t);
        CHECK(g.a_out == a);
        CHECK(g.b_out == b);
        CHECK(g.u_out == u);
      }

  const SepRcdInstance bad = x_on_ancilla_instance(2, 1, 1);
  for (Word a = 0; a < 4; ++a)
    CHECK(std::holds_alternative<BadTransition>(transition(bad, a, 0, 0)));

  // block swap at ell = 1: GOOD(b, a, u)
  SepRcdInstance swap = identity_instance(1, 1, 0);
  swap.gamma.append(Gate::cnot(1, 0));
  swap.gamma.append(Gate::cnot(0, 1));
  swap.gamma.append(Gate::cnot(1, 0));
  const Transition t = transition(swap, 1, 0, 0);
  REQUIRE(std::holds_alternative<GoodTransition>(t));
  CHECK(std::get<GoodTransition>(t).a_out == 0);
  CHECK(std::get<GoodTransition>(t).b_out == 1);
}

TEST_CASE("closed rectangles") {
  const SepRcdInstance id = identity_instance(2, 1, 1);
  CHECK(is_closed_rectangle(id, {0, 1}, {2}));

  SepRcdInstance swap = identity_instance(1, 1, 0);
  swap.gamma.append(Gate::cnot(1, 0));
  swap.gamma.append(Gate::cnot(0, 1));
  swap.gamma.append(Gate::cnot(1, 0));
  CHECK_FALSE(is_closed_rectangle(swap, {0}, {1}));
  CHECK(is_closed_rectangle(swap, {0, 1}, {0, 1}));

  // X on a witness qubit keeps the full cube closed
  SepRcdInstance xw = identity_instance(1, 1, 0);
  xw.gamma.append(Gate::x(0));
  CHECK(is_closed_rectangle(xw, {0, 1}, {0, 1}));
  CHECK_FALSE(is_closed_rectangle(xw, {0}, {0}));
}

TEST_CASE("closure rounds") {
  const SepRcdInstance id = identity_instance(2, 1, 1);
  const RoundOutcome r = closure_round(id, {1}, {2});
  CHECK_FALSE(r.bad);
  CHECK(r.s_next == std::set<Word>{1});
  CHECK(r.t_next == std::set<Word>{2});

  const SepRcdInstance bad = x_on_ancilla_instance(2, 1, 1);
  CHECK(closure_round(bad, {1}, {2}).bad);
}

TEST_CASE("parameter formulas") {
  CHECK(round_bound(2, 0.5) == 10);
  CHECK(completeness_log_eps(1, 0, 1) == -15.0);
  // closed form log2 tau_t = -(ell+4) 2^t + 4 matches the recurrence
  for (int ell : {1, 2, 3, 5})
    for (int L = 0; L <= 20; ++L) {
      double lt = -static_cast<double>(ell);
      for (int t = 0; t < L; ++t) lt = 2 * lt - 4;
      CHECK(lt == doctest::Approx(log2_tau_closed_form(ell, L)));
    }
  const RectClosureParams p = RectClosureParams::make(2, 1, 0.5);
  CHECK(p.L == 10);
  CHECK(p.log2_tau[0] == -2.0);
  CHECK(p.log2_tau[1] == -8.0);
  CHECK_THROWS(round_bound(2, 0.0));
}

TEST_CASE("yes instances accept") {
  std::mt19937_64 rng(101);
  for (int ell : {1, 2, 3}) {
    const SepRcdInstance inst = build_pointwise_fixed_instance(ell, 2, 2, 30, rng);
    const RectClosureVerdict v = rect_closure_test(inst, 0.5);
    CHECK(v.accept);
    REQUIRE(v.accepting_seed.has_value());
    CHECK(v.accepting_seed->rounds_completed == v.params.L);
  }
  // identity instance: every seed survives; accepting seed is lexicographic least
  const SepRcdInstance id = identity_instance(2, 1, 1);
  const RectClosureVerdict v = rect_closure_test(id, 0.5);
  CHECK(v.accept);
  CHECK(v.accepting_seed->a0 == 0);
  CHECK(v.accepting_seed->b0 == 0);
}

TEST_CASE("X-on-ancilla rejects at round 0 for every seed") {
  const SepRcdInstance bad = x_on_ancilla_instance(2, 1, 1);
  const RectClosureVerdict v = rect_closure_test(bad, 0.5);
  CHECK_FALSE(v.accept);
  CHECK(v.seed_logs.size() == 16);
  for (const auto& log : v.seed_logs) CHECK(log.rounds_completed == 0);
}

TEST_CASE("certified no instances reject with per-round growth") {
  std::mt19937_64 rng(103);
  const double gamma = 0.5;
  int found = 0;
  for (int attempt = 0; attempt < 300 && found < 3; ++attempt) {
    const SepRcdInstance inst = build_random_instance(2, 2, 2, 25, rng);
    const Eigen::MatrixXd m = effective_overlap_matrix(inst);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 - gamma) continue;
    ++found;
    // the lambda_max certificate dominates the separable value
    const auto pm = sepval::PartitionedMatrix::make({4, 4}, m);
    if (pm.entrywise_nonneg) {
      const double hsep = sepval::hsep_alternating(pm, 12, 50, 11).value;
      CHECK(hsep <= es.eigenvalues().maxCoeff() + 1e-9);
    }
    const RectClosureVerdict v = rect_closure_test(inst, gamma);
    CHECK_FALSE(v.accept);
    for (const auto& log : v.seed_logs) {
      CHECK(log.rounds_completed < v.params.L);
      for (std::size_t t = 0; t + 1 < log.rect_sizes.size(); ++t)
        CHECK(static_cast<double>(log.rect_sizes[t + 1]) >=
              (1.0 + gamma) * static_cast<double>(log.rect_sizes[t]));
    }
  }
  CHECK(found == 3);
}

TEST_CASE("monotone growth of S and T on good rounds") {
  std::mt19937_64 rng(107);
  const SepRcdInstance inst = build_random_instance(2, 1, 1, 10, rng);
  std::set<Word> s{0}, t{0};
  for (int round = 0; round < 4; ++round) {
    const RoundOutcome out = closure_round(inst, s, t);
    if (out.bad) break;
    for (Word a : s) CHECK(out.s_next.count(a));
    for (Word b : t) CHECK(out.t_next.count(b));
    s = out.s_next;
    t = out.t_next;
  }
}

TEST_CASE("recursive implementation agrees with the table implementation") {
  std::mt19937_64 rng(109);
  // ell = 1 at the natural L from the formula (gamma = 0.9 gives L = 4)
  for (int i = 0; i < 10; ++i) {
    const SepRcdInstance inst = build_random_instance(1, 1, 1, i % 2 ? 8 : 3, rng);
    const auto tv = rect_closure_test(inst, 0.9);
    const auto rv = rect_closure_test_recursive(inst, 0.9);
    CHECK(tv.accept == rv.accept);
  }
  // ell = 2 at a fixed round budget (the formula L is beyond the memoless DFS)
  for (int i = 0; i < 20; ++i) {
    const SepRcdInstance inst = build_random_instance(2, 1, 1, i % 3 == 0 ? 4 : 12, rng);
    const auto tv = rect_closure_test(inst, 0.5, 3);
    const auto rv = rect_closure_test_recursive(inst, 0.5, 3);
    CHECK(tv.accept == rv.accept);
  }
  // identity and X-on-ancilla demonstrations at ell = 1
  CHECK(rect_closure_test_recursive(identity_instance(1, 1, 1), 0.9).accept);
  CHECK_FALSE(rect_closure_test_recursive(x_on_ancilla_instance(1, 1, 1), 0.9).accept);
}

TEST_CASE("parallel seed scan matches the serial verdict") {
  std::mt19937_64 rng(113);
  for (int i = 0; i < 6; ++i) {
    const SepRcdInstance inst = i % 2 ? build_random_instance(2, 1, 1, 10, rng)
                                      : build_pointwise_fixed_instance(2, 1, 1, 10, rng);
    const auto serial = rect_closure_test(inst, 0.5);
    const auto parallel = rect_closure_test(inst, 0.5, -1, true, 4);
    CHECK(serial.accept == parallel.accept);
    if (serial.accept) {
      CHECK(serial.accepting_seed->a0 == parallel.accepting_seed->a0);
      CHECK(serial.accepting_seed->b0 == parallel.accepting_seed->b0);
    }
  }
}

TEST_CASE("verdict invariance under a consistent witness relabeling") {
  std::mt19937_64 rng(127);
  const SepRcdInstance inst = build_random_instance(2, 1, 1, 12, rng);
  // relabel the A block by XOR with a constant, applied consistently
  SepRcdInstance relabeled = inst;
  ReversibleCircuit conj(inst.width());
  conj.append(Gate::x(0));
  ReversibleCircuit gamma2(inst.width());
  gamma2.append(conj);
  gamma2.append(inst.gamma);
  gamma2.append(conj);
  relabeled.gamma = gamma2;
  CHECK(rect_closure_test(inst, 0.5).accept == rect_closure_test(relabeled, 0.5).accept);
}

TEST_CASE("instance JSON round trip") {
  std::mt19937_64 rng(131);
  const SepRcdInstance inst = build_random_instance(2, 2, 1, 9, rng);
  const SepRcdInstance back = instance_from_json(instance_to_json(inst));
  CHECK(back.ell == inst.ell);
  CHECK(back.m0 == inst.m0);
  CHECK(back.gamma == inst.gamma);
  const RectClosureVerdict v = rect_closure_test(inst, 0.5);
  const nlohmann::json vj = verdict_to_json(v);
  CHECK(vj.contains("accept"));
  CHECK(vj.contains("seeds"));
}
