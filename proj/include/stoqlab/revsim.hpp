#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stoqlab/bits.hpp"

#include <nlohmann/json_fwd.hpp>

namespace stoqlab::revsim {

enum class GateKind : std::uint8_t { X, CNOT, CCX };

// Last index is always the target. Indices must be distinct and in range.
struct Gate {
  GateKind kind;
  std::array<int, 3> q{0, 0, 0};

  static Gate x(int t) { return Gate{GateKind::X, {t, 0, 0}}; }
  static Gate cnot(int c, int t) { return Gate{GateKind::CNOT, {c, t, 0}}; }
  static Gate ccx(int c1, int c2, int t) { return Gate{GateKind::CCX, {c1, c2, t}}; }

  int arity() const {
    switch (kind) {
      case GateKind::X: return 1;
      case GateKind::CNOT: return 2;
      case GateKind::CCX: return 3;
    }
    return 0;
  }
  int target() const { return q[static_cast<std::size_t>(arity() - 1)]; }

  Word apply(Word w) const {
    switch (kind) {
      case GateKind::X:
        return flip_bit(w, q[0]);
      case GateKind::CNOT:
        return get_bit(w, q[0]) ? flip_bit(w, q[1]) : w;
      case GateKind::CCX:
        return (get_bit(w, q[0]) && get_bit(w, q[1])) ? flip_bit(w, q[2]) : w;
    }
    return w;
  }

  bool operator==(const Gate&) const = default;
};

// A gate list over X/CNOT/Toffoli, read left to right (first gate acts first).
// The induced map on width-bit strings is a permutation.
struct ReversibleCircuit {
  int width = 0;
  std::vector<Gate> gates;

  ReversibleCircuit() = default;
  explicit ReversibleCircuit(int w) : width(w) {}
  ReversibleCircuit(int w, std::vector<Gate> g) : width(w), gates(std::move(g)) { validate(); }

  void validate() const;

  Word apply_word(Word in) const {
    for (const Gate& g : gates) in = g.apply(in);
    return in;
  }

  // Bit-string front end; input length must equal the width.
  std::string apply(const std::string& in) const;

  // Each gate is an involution, so the inverse is the reversed gate list.
  ReversibleCircuit inverse() const;

  ReversibleCircuit& append(const Gate& g);
  ReversibleCircuit& append(const ReversibleCircuit& sub);

  bool operator==(const ReversibleCircuit&) const = default;
};

ReversibleCircuit compose(const ReversibleCircuit& first, const ReversibleCircuit& second);

// Control every gate of `c` on `control`. X becomes CNOT and CNOT becomes CCX;
// controlling a CCX is out of the gate set and needs a clean ancilla for the
// standard Toffoli compute/uncompute decomposition. The ancilla is restored.
ReversibleCircuit controlled(const ReversibleCircuit& c, int control,
                             std::optional<int> ancilla = std::nullopt);

// Rewires circuit qubits: gate index q becomes map[q].
ReversibleCircuit remap(const ReversibleCircuit& c, const std::vector<int>& map, int new_width);

// Multi-controlled X via a Toffoli ladder. Needs max(0, n_controls - 2) clean
// ancillas from `ancillas`; they are returned to zero.
void append_mcx(ReversibleCircuit& c, const std::vector<int>& controls, int target,
                const std::vector<int>& ancillas);

// Flip `target` exactly when the qubits `ctrls` carry the bit pattern
// `pattern` (bit i of pattern corresponds to ctrls[i]).
void append_pattern_flip(ReversibleCircuit& c, const std::vector<int>& ctrls, Word pattern,
                         int target, const std::vector<int>& ancillas);

// Append `sub` controlled on `ctrls` matching `pattern`.
void append_controlled_on_pattern(ReversibleCircuit& c, const ReversibleCircuit& sub,
                                  const std::vector<int>& ctrls, Word pattern,
                                  const std::vector<int>& ancillas);

// controlled-SWAP(c; a, b) expands to [CNOT(b,a), CCX(c,a,b), CNOT(b,a)].
void append_fredkin(ReversibleCircuit& c, int control, int a, int b);

// Gate-level synthesis of an arbitrary permutation on data_width bits.
// Qubits [data_width, circuit.width) are clean workspace ancillas.
struct SynthesizedCircuit {
  ReversibleCircuit circuit;
  int data_width = 0;
};
SynthesizedCircuit synthesize_permutation(int data_width, const std::function<Word(Word)>& pi);

nlohmann::json to_json(const ReversibleCircuit& c);
ReversibleCircuit circuit_from_json(const nlohmann::json& j);

}  // namespace stoqlab::revsim
