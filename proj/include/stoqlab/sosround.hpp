#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace stoqlab::sosround {

// Explicit finite mixture of real unit vectors: a pseudoexpectation of every
// degree realized by a true distribution, providing exact even moments.
struct MomentOracle {
  int d = 0;
  int t = 2;
  std::vector<double> weights;          // positive, sum 1
  std::vector<Eigen::VectorXd> vectors;  // unit vectors of length d

  void validate() const;
  std::size_t components() const { return weights.size(); }
  // E[prod_j x_{idx_j}^2]
  double moment_sq(const std::vector<int>& idx) const;
};

// Pr[A = i] = E[x_i^2].
Eigen::VectorXd marginal(const MomentOracle& o);

// Joint law of (A_1..A_t) as a flat vector indexed base-d, i_1 least
// significant. Cap d^t <= 1e6.
std::vector<double> joint_law(const MomentOracle& o, int t);

// x*_i = sqrt(E[x_i^2]); unit norm by construction.
Eigen::VectorXd direct_round(const MomentOracle& o);

// Hellinger distance (not squared) between the joint law and the product of
// marginals.
double hellinger_joint_product(const MomentOracle& o, int t);

// Reweights component m by prod_j v_m[i_j]^2 and renormalizes.
MomentOracle condition(const MomentOracle& o, const std::vector<int>& indices);

struct EntropyDecrement {
  double h_marginal = 0;        // H(A) in bits
  double h_conditional = 0;     // H(A_t | A_1..A_{t-1})
  double decrement = 0;         // h_marginal - h_conditional
  double required = 0;          // 2 eps^2 / t
  bool holds = false;
  std::vector<int> pinning;     // lexicographically least tuple achieving it
};
// Premise: hellinger_joint_product(o, t) > epsilon.
EntropyDecrement entropy_decrement_check(const MomentOracle& o, int t, double epsilon);

// Tr M (x x^T)^{ox t} for a symmetric matrix on (R^d)^{ox t}; index order
// matches joint_law (first tensor factor least significant).
double tensor_value(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, int d, int t);

// E[M(x)] under the mixture.
double oracle_value(const MomentOracle& o, const Eigen::MatrixXd& m);

struct RoundingTraceEntry {
  std::vector<int> pinning;
  double hellinger = 0;
  double entropy = 0;
};
struct RoundingResult {
  Eigen::VectorXd x;
  double value = 0;          // M(x*)
  double final_oracle_value = 0;  // E[M] under the final (conditioned) oracle
  std::vector<RoundingTraceEntry> trace;
};
// BKS combining loop: condition while the Hellinger distance exceeds
// delta = epsilon / (2 sqrt 2), then round directly. M is scaled to operator
// norm at most 1 on entry.
RoundingResult bks_round_loop(const Eigen::MatrixXd& m, const MomentOracle& oracle,
                              double epsilon);

// KL(joint || product of marginals) and the chain-rule right-hand side
// sum_j I(A_j; A_1..A_{j-1}), both in bits.
double kl_joint_product(const MomentOracle& o, int t);
double chain_rule_mutual_information(const MomentOracle& o, int t);

nlohmann::json oracle_to_json(const MomentOracle& o);
MomentOracle oracle_from_json(const nlohmann::json& j);

}  // namespace stoqlab::sosround
