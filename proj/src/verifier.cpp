#include "stoqlab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace stoqlab::verifier {

void VerifierLayout::validate() const {
  if (k < 0 || ell < 0 || n0 < 0 || nplus < 0) throw std::invalid_argument("negative layout field");
  if (width() <= 0 || width() > 62) throw std::invalid_argument("layout width out of range");
  if (output < 0 || output >= width()) throw std::invalid_argument("output index out of range");
}

void StoqVerifier::validate() const {
  layout.validate();
  if (kind == Kind::Explicit) {
    circuit.validate();
    if (circuit.width != layout.width())
      throw std::invalid_argument("circuit width does not equal layout width");
  } else if (!gamma_oracle) {
    throw std::invalid_argument("gamma oracle verifier without oracle");
  }
}

revsim::ReversibleCircuit gamma_form(const StoqVerifier& v) {
  if (!v.gate_level()) throw std::invalid_argument("gamma_form needs an explicit circuit");
  revsim::ReversibleCircuit g(v.circuit.width);
  g.append(v.circuit);
  g.append(revsim::Gate::x(v.layout.output));
  g.append(v.circuit.inverse());
  return g;
}

namespace {

void check_caps(std::size_t witness_support, const VerifierLayout& layout, const SimCaps& caps) {
  const std::uint64_t weighted =
      static_cast<std::uint64_t>(witness_support) << layout.nplus;
  if (weighted > caps.max_weighted_support)
    throw std::runtime_error("simulation cap exceeded: witness support * 2^nplus = " +
                             std::to_string(weighted));
}

const std::map<Word, double>& witness_coeffs(const states::NonNegativeState& s) { return s.amp; }
const std::map<Word, Rat>& witness_coeffs(const states::ExactState& s) { return s.coeff; }

// Overlap <Psi|pi|Psi> in raw coefficients (plus-branch and scale factors are
// folded in by the callers), where Psi = witness x |0..0> x |+..+>.
template <typename Coeff, typename State>
Coeff initialized_overlap(const std::function<Word(Word)>& pi, const VerifierLayout& layout,
                          const State& witness, const SimCaps& caps) {
  if (witness.width != layout.witness_qubits())
    throw std::invalid_argument("witness width mismatch");
  const auto& coeffs = witness_coeffs(witness);
  check_caps(coeffs.size(), layout, caps);
  const int zoff = layout.zero_offset();
  const int poff = layout.plus_offset();
  const Word zmask = ones(layout.n0) << zoff;
  Coeff acc = 0;
  for (const auto& [xw, cx] : coeffs) {
    for (Word u = 0; u < (Word{1} << layout.nplus); ++u) {
      const Word x = xw | (u << poff);
      const Word y = pi(x);
      if ((y & zmask) != 0) continue;
      const Word yw = y & ones(layout.witness_qubits());
      auto it = coeffs.find(yw);
      if (it == coeffs.end()) continue;
      acc += cx * it->second;
    }
  }
  return acc;
}

}  // namespace

double acceptance_probability(const StoqVerifier& v, const states::NonNegativeState& witness,
                              const SimCaps& caps) {
  v.validate();
  double raw = 0;
  if (v.gate_level()) {
    const revsim::ReversibleCircuit g = gamma_form(v);
    std::function<Word(Word)> pi = [&g](Word x) { return g.apply_word(x); };
    raw = initialized_overlap<double>(pi, v.layout, witness, caps);
  } else {
    raw = initialized_overlap<double>(v.gamma_oracle, v.layout, witness, caps);
  }
  const double ov = raw / std::pow(2.0, v.layout.nplus);
  return 0.5 + 0.5 * ov;
}

Rat acceptance_probability_exact(const StoqVerifier& v, const states::ExactState& witness,
                                 const SimCaps& caps) {
  v.validate();
  Rat ov;
  if (v.gate_level()) {
    const revsim::ReversibleCircuit g = gamma_form(v);
    std::function<Word(Word)> pi = [&g](Word x) { return g.apply_word(x); };
    ov = initialized_overlap<Rat>(pi, v.layout, witness, caps);
  } else {
    ov = initialized_overlap<Rat>(v.gamma_oracle, v.layout, witness, caps);
  }
  // coefficients carry a common scale; fold it in with the plus-branch weight
  ov *= witness.scale2 * pow2_rat(-v.layout.nplus);
  return Rat(1, 2) + ov / 2;
}

namespace {

// <R0 Psi | R1 Psi> = sum over x,x' with R0(x) = R1(x') of amp(x) amp(x').
template <typename Coeff, typename State>
Coeff pair_overlap(const revsim::ReversibleCircuit& r0, const revsim::ReversibleCircuit& r1,
                   const VerifierLayout& layout, const State& witness, const SimCaps& caps) {
  if (r0.width != layout.width() || r1.width != layout.width())
    throw std::invalid_argument("branch overlap: circuit width mismatch");
  if (witness.width != layout.witness_qubits())
    throw std::invalid_argument("witness width mismatch");
  const auto& coeffs = witness_coeffs(witness);
  check_caps(coeffs.size(), layout, caps);
  const int poff = layout.plus_offset();
  std::unordered_map<Word, Coeff> image0;
  image0.reserve(coeffs.size() << layout.nplus);
  for (const auto& [xw, cx] : coeffs)
    for (Word u = 0; u < (Word{1} << layout.nplus); ++u)
      image0[r0.apply_word(xw | (u << poff))] = cx;
  Coeff acc = 0;
  for (const auto& [xw, cx] : coeffs)
    for (Word u = 0; u < (Word{1} << layout.nplus); ++u) {
      auto it = image0.find(r1.apply_word(xw | (u << poff)));
      if (it != image0.end()) acc += cx * it->second;
    }
  return acc;
}

}  // namespace

double branch_overlap_acceptance(const revsim::ReversibleCircuit& r0,
                                 const revsim::ReversibleCircuit& r1, const VerifierLayout& layout,
                                 const states::NonNegativeState& witness, const SimCaps& caps) {
  const double raw = pair_overlap<double>(r0, r1, layout, witness, caps);
  const double ov = raw / std::pow(2.0, layout.nplus);
  return 0.5 + 0.5 * ov;
}

Rat branch_overlap_acceptance_exact(const revsim::ReversibleCircuit& r0,
                                    const revsim::ReversibleCircuit& r1,
                                    const VerifierLayout& layout,
                                    const states::ExactState& witness, const SimCaps& caps) {
  Rat ov = pair_overlap<Rat>(r0, r1, layout, witness, caps);
  ov *= witness.scale2 * pow2_rat(-layout.nplus);
  return Rat(1, 2) + ov / 2;
}

StoqVerifier build_branch_overlap_verifier(const revsim::ReversibleCircuit& r0,
                                           const revsim::ReversibleCircuit& r1,
                                           const VerifierLayout& layout) {
  if (r0.width != layout.width() || r1.width != layout.width())
    throw std::invalid_argument("branch overlap: circuit width mismatch");
  const bool need_anc =
      std::any_of(r0.gates.begin(), r0.gates.end(),
                  [](const revsim::Gate& g) { return g.kind == revsim::GateKind::CCX; }) ||
      std::any_of(r1.gates.begin(), r1.gates.end(),
                  [](const revsim::Gate& g) { return g.kind == revsim::GateKind::CCX; });
  const int n_anc = need_anc ? 1 : 0;

  VerifierLayout nl = layout;
  nl.n0 = layout.n0 + n_anc;
  nl.nplus = layout.nplus + 1;
  const int ctrl = nl.width() - 1;
  nl.output = ctrl;

  // Old plus ancillas shift up by n_anc; the fresh zero ancilla sits after
  // the old zero block.
  std::vector<int> map(static_cast<std::size_t>(layout.width()));
  for (int i = 0; i < layout.width(); ++i)
    map[static_cast<std::size_t>(i)] = i < layout.plus_offset() ? i : i + n_anc;
  const std::optional<int> anc =
      need_anc ? std::optional<int>(layout.plus_offset()) : std::nullopt;

  const revsim::ReversibleCircuit m0 = revsim::remap(r0, map, nl.width());
  const revsim::ReversibleCircuit m1 = revsim::remap(r1, map, nl.width());

  StoqVerifier v;
  v.layout = nl;
  v.circuit = revsim::ReversibleCircuit(nl.width());
  v.circuit.append(revsim::controlled(m1, ctrl, anc));
  v.circuit.append(revsim::Gate::x(ctrl));
  v.circuit.append(revsim::controlled(m0, ctrl, anc));
  v.validate();
  return v;
}

StoqVerifier make_gamma_oracle_verifier(VerifierLayout layout, std::function<Word(Word)> gamma,
                                        std::string name) {
  StoqVerifier v;
  v.layout = layout;
  v.kind = StoqVerifier::Kind::GammaOracle;
  v.gamma_oracle = std::move(gamma);
  v.oracle_name = std::move(name);
  v.circuit = revsim::ReversibleCircuit(layout.width());
  v.validate();
  return v;
}

double swap_test_acceptance(const states::DensityMatrix& rho0, const states::DensityMatrix& rho1) {
  if (rho0.m.rows() != rho1.m.rows()) throw std::invalid_argument("swap test: dimension mismatch");
  return 0.5 + 0.5 * (rho0.m * rho1.m).trace();
}

Eigen::MatrixXd effective_witness_matrix(const StoqVerifier& v, const SimCaps& caps) {
  v.validate();
  const int wq = v.layout.witness_qubits();
  if (wq > 12) throw std::invalid_argument("effective matrix cap exceeded");
  std::function<Word(Word)> pi;
  revsim::ReversibleCircuit g;
  if (v.gate_level()) {
    g = gamma_form(v);
    pi = [&g](Word x) { return g.apply_word(x); };
  } else {
    pi = v.gamma_oracle;
  }
  const std::uint64_t weighted = (std::uint64_t{1} << wq) << v.layout.nplus;
  if (weighted > caps.max_weighted_support)
    throw std::runtime_error("simulation cap exceeded in effective matrix");
  const int dim = 1 << wq;
  const Word zmask = ones(v.layout.n0) << v.layout.zero_offset();
  const int poff = v.layout.plus_offset();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const double w = std::pow(2.0, -v.layout.nplus);
  for (Word xw = 0; xw < static_cast<Word>(dim); ++xw)
    for (Word u = 0; u < (Word{1} << v.layout.nplus); ++u) {
      const Word y = pi(xw | (u << poff));
      if ((y & zmask) != 0) continue;
      m(static_cast<Eigen::Index>(y & ones(wq)), static_cast<Eigen::Index>(xw)) += w;
    }
  return (m + m.transpose()) / 2.0;
}

double close_image_fidelity(const revsim::ReversibleCircuit& r, const VerifierLayout& layout,
                            const states::NonNegativeState& witness,
                            const std::vector<int>& zero_outputs,
                            const std::vector<int>& plus_outputs, const SimCaps& caps) {
  if (r.width != layout.width()) throw std::invalid_argument("circuit width mismatch");
  for (int q : zero_outputs)
    if (q < 0 || q >= layout.width()) throw std::invalid_argument("bad output designation");
  for (int q : plus_outputs)
    if (q < 0 || q >= layout.width()) throw std::invalid_argument("bad output designation");
  if (witness.width != layout.witness_qubits())
    throw std::invalid_argument("witness width mismatch");
  check_caps(witness.amp.size(), layout, caps);

  Word out_mask = 0;
  for (int q : zero_outputs) out_mask |= Word{1} << q;
  for (int q : plus_outputs) out_mask |= Word{1} << q;
  Word zero_mask = 0;
  for (int q : zero_outputs) zero_mask |= Word{1} << q;

  const int poff = layout.plus_offset();
  const double plus_in = std::pow(2.0, -0.5 * layout.nplus);
  const double target_amp = std::pow(2.0, -0.5 * static_cast<double>(plus_outputs.size()));

  std::unordered_map<Word, double> acc;
  for (const auto& [xw, a] : witness.amp)
    for (Word u = 0; u < (Word{1} << layout.nplus); ++u) {
      const Word y = r.apply_word(xw | (u << poff));
      if ((y & zero_mask) != 0) continue;
      acc[y & ~out_mask] += a * plus_in * target_amp;
    }
  double f2 = 0;
  for (const auto& [key, v] : acc) f2 += v * v;
  return f2;
}

nlohmann::json verifier_to_json(const StoqVerifier& v) {
  if (!v.gate_level())
    throw std::invalid_argument("verifier '" + v.oracle_name +
                                "' has no gate-level circuit to serialize");
  nlohmann::json j = revsim::to_json(v.circuit);
  j["layout"] = {{"k", v.layout.k},
                 {"ell", v.layout.ell},
                 {"n0", v.layout.n0},
                 {"nplus", v.layout.nplus},
                 {"output", v.layout.output}};
  return j;
}

StoqVerifier verifier_from_json(const nlohmann::json& j) {
  StoqVerifier v;
  v.circuit = revsim::circuit_from_json(j);
  const auto& lay = j.at("layout");
  v.layout.k = lay.at("k").get<int>();
  v.layout.ell = lay.at("ell").get<int>();
  v.layout.n0 = lay.at("n0").get<int>();
  v.layout.nplus = lay.at("nplus").get<int>();
  v.layout.output = lay.at("output").get<int>();
  v.validate();
  return v;
}

}  // namespace stoqlab::verifier
