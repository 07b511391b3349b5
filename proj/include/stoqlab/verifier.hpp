#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "stoqlab/revsim.hpp"
#include "stoqlab/states.hpp"

namespace stoqlab::verifier {

// Register layout: witness qubits first, then |0> ancillas, then |+> ancillas.
struct VerifierLayout {
  int k = 1;       // prover count
  int ell = 1;     // qubits per proof
  int n0 = 0;      // zero-ancilla count
  int nplus = 0;   // plus-ancilla count
  int output = 0;  // designated output qubit

  int witness_qubits() const { return k * ell; }
  int zero_offset() const { return k * ell; }
  int plus_offset() const { return k * ell + n0; }
  int width() const { return k * ell + n0 + nplus; }
  void validate() const;
};

struct SimCaps {
  // support size times 2^nplus; fails loudly when exceeded
  std::uint64_t max_weighted_support = std::uint64_t{1} << 26;
};

struct Thresholds {
  double c = 1.0;
  double s = 0.5;
  double delta() const { return c - s; }
};

// A stoquastic verifier. Normally an explicit circuit whose designated output
// qubit is measured in the Hadamard basis (accept on +). Constructions whose
// branch logic is impractical to synthesize at gate level instead carry an
// opaque permutation Gamma, with acceptance 1/2 + <Psi|Gamma|Psi>/2 (the
// wrapped branch-overlap form of the pair (Gamma, I)).
struct StoqVerifier {
  enum class Kind { Explicit, GammaOracle };

  revsim::ReversibleCircuit circuit;
  VerifierLayout layout;
  Kind kind = Kind::Explicit;
  std::function<Word(Word)> gamma_oracle;
  std::string oracle_name;

  void validate() const;
  bool gate_level() const { return kind == Kind::Explicit; }
};

// Gamma = V^dagger . X_output . V as an explicit gate list.
revsim::ReversibleCircuit gamma_form(const StoqVerifier& v);

// Exact acceptance probability on initialized ancillas |0...0>|+...+>.
double acceptance_probability(const StoqVerifier& v, const states::NonNegativeState& witness,
                              const SimCaps& caps = {});
Rat acceptance_probability_exact(const StoqVerifier& v, const states::ExactState& witness,
                                 const SimCaps& caps = {});

// (1 + <R0(Psi)|R1(Psi)>)/2 by joint support enumeration.
double branch_overlap_acceptance(const revsim::ReversibleCircuit& r0,
                                 const revsim::ReversibleCircuit& r1, const VerifierLayout& layout,
                                 const states::NonNegativeState& witness, const SimCaps& caps = {});
Rat branch_overlap_acceptance_exact(const revsim::ReversibleCircuit& r0,
                                    const revsim::ReversibleCircuit& r1,
                                    const VerifierLayout& layout,
                                    const states::ExactState& witness, const SimCaps& caps = {});

// Explicit circuit with one extra |+> control qubit and a single X whose
// acceptance equals branch_overlap_acceptance on every witness.
StoqVerifier build_branch_overlap_verifier(const revsim::ReversibleCircuit& r0,
                                           const revsim::ReversibleCircuit& r1,
                                           const VerifierLayout& layout);

// Wraps a permutation in the same way a branch-overlap pair (Gamma, I) would
// be, but keeps Gamma as an opaque callable.
StoqVerifier make_gamma_oracle_verifier(VerifierLayout layout, std::function<Word(Word)> gamma,
                                        std::string name);

double swap_test_acceptance(const states::DensityMatrix& rho0, const states::DensityMatrix& rho1);

// Symmetrized effective matrix M on the witness space with
// acceptance(psi) = 1/2 + <psi|M|psi>/2 for every witness psi.
Eigen::MatrixXd effective_witness_matrix(const StoqVerifier& v, const SimCaps& caps = {});

// F^2 of the reduced output state against |0>^{r0} tensor |+>^{r+}.
double close_image_fidelity(const revsim::ReversibleCircuit& r, const VerifierLayout& layout,
                            const states::NonNegativeState& witness,
                            const std::vector<int>& zero_outputs,
                            const std::vector<int>& plus_outputs, const SimCaps& caps = {});

nlohmann::json verifier_to_json(const StoqVerifier& v);
StoqVerifier verifier_from_json(const nlohmann::json& j);

}  // namespace stoqlab::verifier
