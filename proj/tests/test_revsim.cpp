#include <doctest.h>

#include <random>

#include "stoqlab/revsim.hpp"

#include <nlohmann/json.hpp>

using namespace stoqlab;
using namespace stoqlab::revsim;

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

}  // namespace

TEST_CASE("gate definitions on basis strings") {
  ReversibleCircuit x1(1, {Gate::x(0)});
  CHECK(x1.apply("0") == "1");

  ReversibleCircuit cnot(2, {Gate::cnot(0, 1)});
  CHECK(cnot.apply("10") == "11");
  CHECK(cnot.apply("01") == "01");

  ReversibleCircuit ccx(3, {Gate::ccx(0, 1, 2)});
  CHECK(ccx.apply("100") == "100");
  CHECK(ccx.apply("110") == "111");
}

TEST_CASE("apply rejects width mismatch and bad indices") {
  ReversibleCircuit c(2, {Gate::cnot(0, 1)});
  CHECK_THROWS(c.apply("101"));
  CHECK_THROWS(ReversibleCircuit(1, {Gate::cnot(0, 1)}));
  CHECK_THROWS(ReversibleCircuit(3, {Gate::ccx(0, 0, 1)}));
}

TEST_CASE("inverse round trip") {
  CHECK(ReversibleCircuit(0).inverse().gates.empty());

  ReversibleCircuit c(2, {Gate::x(0), Gate::cnot(0, 1)});
  const ReversibleCircuit inv = c.inverse();
  CHECK(inv.gates[0] == Gate::cnot(0, 1));
  CHECK(inv.gates[1] == Gate::x(0));
  for (Word x = 0; x < 4; ++x) CHECK(inv.apply_word(c.apply_word(x)) == x);

  std::mt19937_64 rng(7);
  const ReversibleCircuit r = random_circuit(6, 20, rng);
  const ReversibleCircuit rinv = r.inverse();
  for (Word x = 0; x < 64; ++x) CHECK(rinv.apply_word(r.apply_word(x)) == x);
}

TEST_CASE("single gates are involutions") {
  for (const Gate& g : {Gate::x(0), Gate::cnot(0, 1), Gate::ccx(0, 1, 2)}) {
    for (Word x = 0; x < 8; ++x) CHECK(g.apply(g.apply(x)) == x);
  }
}

TEST_CASE("controlled lifts gates one level") {
  const ReversibleCircuit x_on_1(2, {Gate::x(1)});
  const ReversibleCircuit c1 = controlled(x_on_1, 0);
  REQUIRE(c1.gates.size() == 1);
  CHECK(c1.gates[0] == Gate::cnot(0, 1));

  const ReversibleCircuit cnot12(3, {Gate::cnot(1, 2)});
  const ReversibleCircuit c2 = controlled(cnot12, 0);
  REQUIRE(c2.gates.size() == 1);
  CHECK(c2.gates[0] == Gate::ccx(0, 1, 2));

  // CCX needs an explicit clean ancilla
  const ReversibleCircuit ccx(3, {Gate::ccx(0, 1, 2)});
  CHECK_THROWS(controlled(ccx, 3));
  const ReversibleCircuit c3 = controlled(remap(ccx, {0, 1, 2}, 5), 3, 4);
  // semantics: control 3 on, ancilla 4 clean
  for (Word x = 0; x < 8; ++x) {
    CHECK(c3.apply_word(x) == x);                            // control off
    CHECK(c3.apply_word(x | 8) == (ccx.apply_word(x) | 8));  // control on
  }
}

TEST_CASE("controlled swap matches swap semantics") {
  // controlled-SWAP(c; a, b) = [CNOT(b,a), CCX(c,a,b), CNOT(b,a)]
  ReversibleCircuit c(3);
  append_fredkin(c, 2, 0, 1);
  REQUIRE(c.gates.size() == 3);
  CHECK(c.gates[0] == Gate::cnot(1, 0));
  CHECK(c.gates[1] == Gate::ccx(2, 0, 1));
  CHECK(c.gates[2] == Gate::cnot(1, 0));
  for (Word x = 0; x < 8; ++x) {
    Word want = x;
    if (get_bit(x, 2)) {
      want = set_bit(want, 0, get_bit(x, 1));
      want = set_bit(want, 1, get_bit(x, 0));
    }
    CHECK(c.apply_word(x) == want);
  }
}

TEST_CASE("compose concatenates and acts in order") {
  const ReversibleCircuit x0(1, {Gate::x(0)});
  const ReversibleCircuit id1 = compose(x0, x0);
  CHECK(id1.apply_word(0) == 0);
  CHECK(id1.apply_word(1) == 1);

  const ReversibleCircuit cn(2, {Gate::cnot(0, 1)});
  const ReversibleCircuit id2 = compose(cn, cn);
  for (Word x = 0; x < 4; ++x) CHECK(id2.apply_word(x) == x);

  std::mt19937_64 rng(3);
  const ReversibleCircuit c = random_circuit(8, 25, rng);
  const ReversibleCircuit inv = c.inverse();
  const ReversibleCircuit both = compose(c, inv);
  for (Word x = 0; x < 256; ++x) CHECK(both.apply_word(x) == x);

  CHECK_THROWS(compose(ReversibleCircuit(2), ReversibleCircuit(3)));
}

TEST_CASE("composition associativity at the semantic level") {
  std::mt19937_64 rng(11);
  const ReversibleCircuit a = random_circuit(8, 10, rng);
  const ReversibleCircuit b = random_circuit(8, 10, rng);
  const ReversibleCircuit ab = compose(a, b);
  for (Word x = 0; x < 256; ++x) CHECK(ab.apply_word(x) == b.apply_word(a.apply_word(x)));
}

TEST_CASE("bijectivity at width up to 12") {
  std::mt19937_64 rng(13);
  for (int width : {4, 8, 12}) {
    const ReversibleCircuit c = random_circuit(width, 40, rng);
    std::vector<bool> seen(std::size_t{1} << width, false);
    for (Word x = 0; x < (Word{1} << width); ++x) {
      const Word y = c.apply_word(x);
      CHECK(!seen[y]);
      seen[y] = true;
    }
  }
}

TEST_CASE("mcx and pattern flips") {
  std::mt19937_64 rng(17);
  for (int n_ctrl : {1, 2, 3, 4, 5}) {
    const int width = n_ctrl + 1 + std::max(0, n_ctrl - 2);
    ReversibleCircuit c(width);
    std::vector<int> ctrls(static_cast<std::size_t>(n_ctrl));
    for (int i = 0; i < n_ctrl; ++i) ctrls[static_cast<std::size_t>(i)] = i;
    std::vector<int> anc;
    for (int i = n_ctrl + 1; i < width; ++i) anc.push_back(i);
    append_mcx(c, ctrls, n_ctrl, anc);
    for (Word x = 0; x < (Word{1} << width); ++x) {
      // ancillas must be clean for the gadget contract
      if ((x >> (n_ctrl + 1)) != 0) continue;
      const bool fire = (x & ones(n_ctrl)) == ones(n_ctrl);
      const Word want = fire ? flip_bit(x, n_ctrl) : x;
      CHECK(c.apply_word(x) == want);
    }
  }

  // pattern flip on a random pattern
  ReversibleCircuit c(7);
  const std::vector<int> ctrls{0, 1, 2, 3};
  append_pattern_flip(c, ctrls, 0b0101, 4, {5, 6});
  for (Word x = 0; x < 32; ++x) {
    const bool fire = (x & 15) == 0b0101;
    const Word want = fire ? flip_bit(x, 4) : x;
    CHECK(c.apply_word(x) == want);
  }
}

TEST_CASE("permutation synthesis round trip") {
  std::mt19937_64 rng(23);
  for (int width : {1, 2, 3, 4, 6}) {
    const Word n = Word{1} << width;
    std::vector<Word> perm(n);
    for (Word i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    const SynthesizedCircuit s =
        synthesize_permutation(width, [&](Word x) { return perm[x]; });
    for (Word x = 0; x < n; ++x) CHECK(s.circuit.apply_word(x) == perm[x]);
  }
}

TEST_CASE("circuit JSON round trip and rejection of malformed input") {
  std::mt19937_64 rng(29);
  const ReversibleCircuit c = random_circuit(5, 12, rng);
  const ReversibleCircuit back = circuit_from_json(to_json(c));
  CHECK(back == c);

  nlohmann::json bad = {{"width", 2}, {"gates", {{{"kind", "H"}, {"qubits", {0}}}}}};
  CHECK_THROWS(circuit_from_json(bad));
  nlohmann::json bad2 = {{"width", 2}, {"gates", {{{"kind", "CNOT"}, {"qubits", {0, 5}}}}}};
  CHECK_THROWS(circuit_from_json(bad2));
}
