#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "stoqlab/bits.hpp"
#include "stoqlab/rational.hpp"

namespace stoqlab::states {

inline constexpr double kNormTol = 1e-9;

// Sparse non-negative amplitude vector over bit strings.
struct NonNegativeState {
  int width = 0;
  std::map<Word, double> amp;

  void validate() const;  // amplitudes >= 0, squared sum 1 within kNormTol
  double amplitude(Word x) const {
    auto it = amp.find(x);
    return it == amp.end() ? 0.0 : it->second;
  }
  static NonNegativeState basis(int width, Word x);
  static NonNegativeState subset(int width, const std::set<Word>& support);
  static NonNegativeState plus_all(int width);  // uniform over all strings
};

// Exact counterpart: amplitude(x) = coeff(x) * sqrt(scale2) with coeff >= 0
// rational and scale2 rational, so every squared quantity stays rational.
struct ExactState {
  int width = 0;
  Rat scale2 = 1;
  std::map<Word, Rat> coeff;

  void validate() const;  // scale2 * sum coeff^2 == 1 exactly
  static ExactState basis(int width, Word x);
  static ExactState subset(int width, const std::set<Word>& support);
  NonNegativeState to_double() const;
};

// Uniform 1/sqrt(|S|) over a non-empty support.
struct SubsetState {
  int width = 0;
  std::set<Word> support;
  ExactState exact() const { return ExactState::subset(width, support); }
  NonNegativeState state() const { return NonNegativeState::subset(width, support); }
};

NonNegativeState tensor(const NonNegativeState& a, const NonNegativeState& b);
ExactState tensor(const ExactState& a, const ExactState& b);

double inner_product(const NonNegativeState& a, const NonNegativeState& b);

// Entrywise absolute value of a signed amplitude vector (dense, by index).
NonNegativeState absolutize(int width, const std::vector<double>& signed_amps);

// Finite distribution over Word outcomes.
struct Distribution {
  std::map<Word, double> p;
  void validate() const;
};

Distribution squared_distribution(const NonNegativeState& a);
std::map<Word, Rat> squared_distribution(const ExactState& a);

double tv(const Distribution& p, const Distribution& q);
double hellinger2(const Distribution& p, const Distribution& q);
// +infinity when support(p) is not contained in support(q). Log base 2.
double kl(const Distribution& p, const Distribution& q);
double entropy(const Distribution& p);  // bits, 0*log 0 = 0

// Real symmetric, trace 1, PSD within tolerance.
struct DensityMatrix {
  Eigen::MatrixXd m;
  void validate() const;
  static DensityMatrix pure(const Eigen::VectorXd& psi);
};

// F^2(|psi><psi|, rho) = <psi|rho|psi>.
double fidelity_pure_mixed(const NonNegativeState& pure, const DensityMatrix& rho);

// T(|a>,|b>) = sqrt(1 - <a|b>^2) for unit vectors.
double trace_distance_pure(const NonNegativeState& a, const NonNegativeState& b);

// Dense helpers shared by several modules.
Eigen::VectorXd dense_vector(const NonNegativeState& a);

nlohmann::json state_to_json(const NonNegativeState& s);
// Accepts {"width":n,"amplitudes":{...}} or the subset shorthand
// {"width":n,"subset":[...]}; the latter is returned exactly as well.
NonNegativeState state_from_json(const nlohmann::json& j);
bool json_is_subset_state(const nlohmann::json& j);
ExactState exact_state_from_json(const nlohmann::json& j);

}  // namespace stoqlab::states
