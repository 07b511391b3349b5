#include "stoqlab/revsim.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace stoqlab::revsim {

void ReversibleCircuit::validate() const {
  if (width < 0 || width > 63) throw std::invalid_argument("circuit width out of range");
  for (const Gate& g : gates) {
    const int a = g.arity();
    for (int i = 0; i < a; ++i) {
      if (g.q[static_cast<std::size_t>(i)] < 0 || g.q[static_cast<std::size_t>(i)] >= width)
        throw std::invalid_argument("gate index out of range");
      for (int j = i + 1; j < a; ++j)
        if (g.q[static_cast<std::size_t>(i)] == g.q[static_cast<std::size_t>(j)])
          throw std::invalid_argument("gate indices must be distinct");
    }
  }
}

std::string ReversibleCircuit::apply(const std::string& in) const {
  if (static_cast<int>(in.size()) != width)
    throw std::invalid_argument("input length does not match circuit width");
  return string_from_word(apply_word(word_from_string(in)), width);
}

ReversibleCircuit ReversibleCircuit::inverse() const {
  ReversibleCircuit r(width);
  r.gates.assign(gates.rbegin(), gates.rend());
  return r;
}

ReversibleCircuit& ReversibleCircuit::append(const Gate& g) {
  gates.push_back(g);
  return *this;
}

ReversibleCircuit& ReversibleCircuit::append(const ReversibleCircuit& sub) {
  if (sub.width > width) throw std::invalid_argument("appended circuit is wider than target");
  gates.insert(gates.end(), sub.gates.begin(), sub.gates.end());
  return *this;
}

ReversibleCircuit compose(const ReversibleCircuit& first, const ReversibleCircuit& second) {
  if (first.width != second.width) throw std::invalid_argument("compose: width mismatch");
  ReversibleCircuit r = first;
  r.gates.insert(r.gates.end(), second.gates.begin(), second.gates.end());
  return r;
}

ReversibleCircuit controlled(const ReversibleCircuit& c, int control, std::optional<int> ancilla) {
  const bool need_anc =
      std::any_of(c.gates.begin(), c.gates.end(),
                  [](const Gate& g) { return g.kind == GateKind::CCX; });
  int w = std::max(c.width, control + 1);
  if (need_anc) {
    if (!ancilla) throw std::invalid_argument("controlling a CCX needs a clean ancilla");
    if (*ancilla == control) throw std::invalid_argument("ancilla collides with control");
    w = std::max(w, *ancilla + 1);
  }
  ReversibleCircuit r(w);
  for (const Gate& g : c.gates) {
    for (int i = 0; i < g.arity(); ++i)
      if (g.q[static_cast<std::size_t>(i)] == control)
        throw std::invalid_argument("control qubit collides with circuit qubit");
    switch (g.kind) {
      case GateKind::X:
        r.append(Gate::cnot(control, g.q[0]));
        break;
      case GateKind::CNOT:
        r.append(Gate::ccx(control, g.q[0], g.q[1]));
        break;
      case GateKind::CCX: {
        const int a = *ancilla;
        if (a == g.q[0] || a == g.q[1] || a == g.q[2])
          throw std::invalid_argument("ancilla collides with gate qubits");
        r.append(Gate::ccx(g.q[0], g.q[1], a));
        r.append(Gate::ccx(control, a, g.q[2]));
        r.append(Gate::ccx(g.q[0], g.q[1], a));
        break;
      }
    }
  }
  return r;
}

ReversibleCircuit remap(const ReversibleCircuit& c, const std::vector<int>& map, int new_width) {
  if (static_cast<int>(map.size()) != c.width)
    throw std::invalid_argument("remap table size must equal circuit width");
  ReversibleCircuit r(new_width);
  for (const Gate& g : c.gates) {
    Gate h = g;
    for (int i = 0; i < g.arity(); ++i)
      h.q[static_cast<std::size_t>(i)] = map[static_cast<std::size_t>(g.q[static_cast<std::size_t>(i)])];
    r.append(h);
  }
  r.validate();
  return r;
}

void append_mcx(ReversibleCircuit& c, const std::vector<int>& controls, int target,
                const std::vector<int>& ancillas) {
  const std::size_t m = controls.size();
  if (m == 0) {
    c.append(Gate::x(target));
    return;
  }
  if (m == 1) {
    c.append(Gate::cnot(controls[0], target));
    return;
  }
  if (m == 2) {
    c.append(Gate::ccx(controls[0], controls[1], target));
    return;
  }
  if (ancillas.size() < m - 2)
    throw std::invalid_argument("append_mcx: not enough clean ancillas");
  // Ladder: a[0] = c0&c1, a[i] = a[i-1]&c[i+1], then flip, then uncompute.
  std::vector<Gate> ladder;
  ladder.push_back(Gate::ccx(controls[0], controls[1], ancillas[0]));
  for (std::size_t i = 0; i + 3 < m; ++i)
    ladder.push_back(Gate::ccx(ancillas[i], controls[i + 2], ancillas[i + 1]));
  for (const Gate& g : ladder) c.append(g);
  c.append(Gate::ccx(ancillas[m - 3], controls[m - 1], target));
  for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) c.append(*it);
}

void append_pattern_flip(ReversibleCircuit& c, const std::vector<int>& ctrls, Word pattern,
                         int target, const std::vector<int>& ancillas) {
  std::vector<int> zero_ctrls;
  for (std::size_t i = 0; i < ctrls.size(); ++i)
    if (!get_bit(pattern, static_cast<int>(i))) zero_ctrls.push_back(ctrls[i]);
  for (int q : zero_ctrls) c.append(Gate::x(q));
  append_mcx(c, ctrls, target, ancillas);
  for (int q : zero_ctrls) c.append(Gate::x(q));
}

void append_controlled_on_pattern(ReversibleCircuit& c, const ReversibleCircuit& sub,
                                  const std::vector<int>& ctrls, Word pattern,
                                  const std::vector<int>& ancillas) {
  if (ctrls.empty()) {
    c.append(sub);
    return;
  }
  // Fold the pattern controls into every gate of sub via an indicator ancilla.
  if (ancillas.empty()) throw std::invalid_argument("pattern control needs an indicator ancilla");
  const int ind = ancillas[0];
  std::vector<int> rest(ancillas.begin() + 1, ancillas.end());
  append_pattern_flip(c, ctrls, pattern, ind, rest);
  ReversibleCircuit ctl = controlled(sub, ind, rest.empty() ? std::nullopt : std::optional<int>(rest[0]));
  c.append(ctl);
  append_pattern_flip(c, ctrls, pattern, ind, rest);
}

void append_fredkin(ReversibleCircuit& c, int control, int a, int b) {
  c.append(Gate::cnot(b, a));
  c.append(Gate::ccx(control, a, b));
  c.append(Gate::cnot(b, a));
}

SynthesizedCircuit synthesize_permutation(int data_width, const std::function<Word(Word)>& pi) {
  if (data_width < 1 || data_width > 20)
    throw std::invalid_argument("synthesize_permutation: data width out of range");
  const Word n = Word{1} << data_width;
  std::vector<Word> img(n);
  std::vector<bool> seen(n, false);
  for (Word x = 0; x < n; ++x) {
    img[x] = pi(x);
    if (img[x] >= n || seen[img[x]])
      throw std::invalid_argument("synthesize_permutation: map is not a permutation");
    seen[img[x]] = true;
  }

  const int n_anc = std::max(0, data_width - 3);
  SynthesizedCircuit out;
  out.data_width = data_width;
  out.circuit = ReversibleCircuit(data_width + n_anc);
  std::vector<int> ancillas(static_cast<std::size_t>(n_anc));
  for (int i = 0; i < n_anc; ++i) ancillas[static_cast<std::size_t>(i)] = data_width + i;

  // Sort the table into the identity with transpositions, emitting each
  // transposition (cur[x] <-> x) as CNOT conjugation plus one pattern flip.
  std::vector<Word> cur = img;
  std::vector<Word> pos(n);  // pos[v] = location of value v in cur
  for (Word x = 0; x < n; ++x) pos[cur[x]] = x;
  ReversibleCircuit& c = out.circuit;
  std::vector<Gate> emitted;  // collected in "sorting" order

  auto emit_transposition = [&](Word a, Word b) {
    const Word diff = a ^ b;
    int t = -1;
    for (int i = 0; i < data_width; ++i)
      if (get_bit(diff, i)) {
        t = i;
        break;
      }
    std::vector<Gate> conj;
    for (int i = 0; i < data_width; ++i)
      if (i != t && get_bit(diff, i)) conj.push_back(Gate::cnot(t, i));
    ReversibleCircuit piece(c.width);
    for (const Gate& g : conj) piece.append(g);
    // After conjugation a and b agree off bit t; flip t on that shared pattern.
    Word a2 = a;
    for (const Gate& g : conj) a2 = g.apply(a2);
    std::vector<int> ctrls;
    Word pattern = 0;
    for (int i = 0; i < data_width; ++i)
      if (i != t) {
        if (get_bit(a2, i)) pattern |= Word{1} << ctrls.size();
        ctrls.push_back(i);
      }
    append_pattern_flip(piece, ctrls, pattern, t, ancillas);
    for (auto it = conj.rbegin(); it != conj.rend(); ++it) piece.append(*it);
    for (const Gate& g : piece.gates) emitted.push_back(g);
  };

  for (Word x = 0; x < n; ++x) {
    if (cur[x] == x) continue;
    const Word v = cur[x];
    const Word y = pos[x];
    // swap contents of slots x and y so that slot x holds x
    emit_transposition(x, v);
    std::swap(cur[x], cur[y]);
    pos[v] = y;
    pos[x] = x;
  }
  // emitted, applied in order, maps img -> identity; the circuit for img is the inverse.
  c.gates.assign(emitted.rbegin(), emitted.rend());
  return out;
}

nlohmann::json to_json(const ReversibleCircuit& c) {
  nlohmann::json j;
  j["width"] = c.width;
  j["gates"] = nlohmann::json::array();
  for (const Gate& g : c.gates) {
    nlohmann::json gj;
    switch (g.kind) {
      case GateKind::X: gj["kind"] = "X"; break;
      case GateKind::CNOT: gj["kind"] = "CNOT"; break;
      case GateKind::CCX: gj["kind"] = "CCX"; break;
    }
    std::vector<int> qs(g.q.begin(), g.q.begin() + g.arity());
    gj["qubits"] = qs;
    j["gates"].push_back(gj);
  }
  return j;
}

ReversibleCircuit circuit_from_json(const nlohmann::json& j) {
  if (!j.contains("width") || !j.contains("gates"))
    throw std::invalid_argument("circuit JSON needs width and gates");
  ReversibleCircuit c(j.at("width").get<int>());
  for (const auto& gj : j.at("gates")) {
    const std::string kind = gj.at("kind").get<std::string>();
    const std::vector<int> qs = gj.at("qubits").get<std::vector<int>>();
    Gate g;
    if (kind == "X" && qs.size() == 1)
      g = Gate::x(qs[0]);
    else if (kind == "CNOT" && qs.size() == 2)
      g = Gate::cnot(qs[0], qs[1]);
    else if (kind == "CCX" && qs.size() == 3)
      g = Gate::ccx(qs[0], qs[1], qs[2]);
    else
      throw std::invalid_argument("malformed gate: kind " + kind);
    c.append(g);
  }
  c.validate();
  return c;
}

}  // namespace stoqlab::revsim
