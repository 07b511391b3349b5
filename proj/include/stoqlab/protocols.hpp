#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "stoqlab/rational.hpp"
#include "stoqlab/verifier.hpp"

namespace stoqlab::protocols {

// Dyadic branch register for a uniform choice among K = k! permutations.
struct DyadicBranchPlan {
  int k = 0;
  std::uint64_t K = 0;  // k!
  int b = 0;            // extra precision bits
  int q = 0;            // ceil(log K) + b
  std::uint64_t N = 0;  // 2^q
  std::uint64_t a = 0;  // floor(N/K)
  std::uint64_t r = 0;  // N mod K
  Rat zeta;             // r (K - r) / (K N)

  static DyadicBranchPlan make(int k, int b);
};

struct CompressionParams {
  double c_prod = 1.0 / 3.0;
  double gamma = 0;   // c_prod / 4
  double lambda = 0;  // gamma * delta
  Dyadic lambda_dyadic;
  double truncation_error = 0;

  static CompressionParams make(double delta, double c_prod = 1.0 / 3.0, int bits = 16);
};

struct SymmetrizationPlan {
  int k = 0;
  int r = 0;  // ceil(12 ln k) bundles
  int label_bits = 0;
  int m = 0;  // r (ell + ceil(log k))
  double dummy_acceptance = 0;  // c - Delta

  static SymmetrizationPlan make(int k, int ell, double c, double delta);
};

// P_prod(rho, sigma) = 2^{-k} sum_{S subset [k]} Tr(rho_S sigma_S) for pure
// states given as dense real vectors over k blocks of ell qubits.
double product_test_value(const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma, int k,
                          int ell);

// Branch register of k plus-qubits controlling blockwise SWAPs, wrapped in the
// branch-overlap test. Witness = rho tensor sigma (2 proofs of k*ell qubits).
verifier::StoqVerifier build_product_test(int k, int ell);

// 1 - (max overlap with a product state)^2; exact via SVD at k = 2,
// alternating maximization with restarts otherwise.
double eta(const Eigen::VectorXd& rho, int k, int ell, int restarts = 24,
           std::uint64_t seed = 2);

// Dyadic-lambda convex combination of the product test on (A,B) and v on A.
struct CompressedVerifier {
  verifier::StoqVerifier w;
  CompressionParams params;
};
CompressedVerifier build_prover_compression(const verifier::StoqVerifier& v,
                                            const verifier::Thresholds& th, int lambda_bits = 8);

// Balanced map from N = 2^q dyadic branches onto K permutations.
std::uint64_t balanced_map(std::uint64_t j, std::uint64_t K, std::uint64_t N);

// Permutations of S_k in lexicographic order; index t -> pi_t.
std::vector<int> permutation_lex(int k, std::uint64_t t);

struct SymProjectorVerifier {
  verifier::StoqVerifier v;
  DyadicBranchPlan plan;
};
SymProjectorVerifier build_sym_projector(int k, int ell, int b);

// <Phi|Pi_sym|Phi> for a dense state over k blocks of ell qubits.
double symmetric_overlap(const Eigen::VectorXd& phi, int k, int ell);

struct SymCloseness {
  double bound = 0;  // 2 sqrt(1 - <Phi|Pi_sym|Phi>)
  Eigen::VectorXd best_power;  // best tensor-power witness found
  double achieved_distance = 0;
};
SymCloseness symmetric_closeness_bound(const Eigen::VectorXd& phi, int k, int ell,
                                       int restarts = 16, std::uint64_t seed = 3);

// Hopcroft-Karp style bipartite matching; NONE comes with a Hall violator.
struct MatchingResult {
  bool exists = false;
  std::vector<int> match;          // for each right/role vertex, the matched left vertex
  std::vector<int> hall_violator;  // left set with |N(S)| < |S| when no matching
};
MatchingResult perfect_matching(const std::vector<std::vector<int>>& adj_left_to_right,
                                int n_right);

struct SymmetrizedVerifier {
  verifier::StoqVerifier v;  // gamma-oracle verifier
  SymmetrizationPlan plan;
};
// Length-efficient symmetrization of a k-prover verifier with proofs of ell
// qubits; per-branch matching routes data blocks into Gamma_V, otherwise a
// dummy branch accepting at exactly the dyadic c - Delta runs instead.
SymmetrizedVerifier build_length_efficient_symmetrization(const verifier::StoqVerifier& v,
                                                          const verifier::Thresholds& th);

// Acceptance of the symmetrized verifier on bundle witnesses, evaluated by
// direct branch enumeration (the cross-validation oracle).
double symmetrization_direct_acceptance(const SymmetrizedVerifier& sv,
                                        const verifier::StoqVerifier& v,
                                        const std::vector<states::NonNegativeState>& data_states);

struct SymToStoqVerifier {
  verifier::StoqVerifier w;
  DyadicBranchPlan plan;
  Dyadic lambda;
};
SymToStoqVerifier build_sym_to_stoq(const verifier::StoqVerifier& v,
                                    const verifier::Thresholds& th);

// Run all verifiers without the final measurement and SWAP-test their output
// qubits against |+>^r.
verifier::StoqVerifier build_weak_conjunction(const std::vector<verifier::StoqVerifier>& vs);

// One plus-qubit controls all Gamma_j = V_j^dagger X_O V_j in sequence.
verifier::StoqVerifier build_strong_conjunction(const std::vector<verifier::StoqVerifier>& vs);

// ceil(n / log2(2/(1+b))) repetitions for 2^-n soundness.
std::int64_t repetition_count(std::int64_t n, double b);

}  // namespace stoqlab::protocols
