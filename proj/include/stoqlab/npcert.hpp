#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stoqlab/rational.hpp"
#include "stoqlab/states.hpp"
#include "stoqlab/verifier.hpp"

namespace stoqlab::npcert {

// Gap constraint graph: vertices with per-edge binary relations over an
// alphabet of size Q. Self-loop padding brings every vertex to degree d.
struct GapCGInstance {
  int n_vertices = 0;
  int degree = 0;
  int alphabet = 0;  // Q
  double eta = 0;    // promised violation fraction for no instances
  struct Edge {
    int u = 0, v = 0;
    std::set<std::pair<int, int>> relation;  // allowed (a,b) pairs, a at u
  };
  std::vector<Edge> edges;

  int vertex_bits() const { return ceil_log2(static_cast<std::uint64_t>(n_vertices)); }
  int label_bits() const { return ceil_log2(static_cast<std::uint64_t>(alphabet)); }
  int pair_bits() const { return vertex_bits() + label_bits(); }
  void validate() const;
  bool edge_allows(int u, int v, int a, int b) const;  // both orientations
  std::optional<std::size_t> edge_between(int u, int v) const;
};

// One-copy distribution over V x Sigma together with its derived quantities.
struct BranchDistribution {
  int n_vertices = 0;
  int alphabet = 0;
  std::vector<Rat> p;  // index v * Q + a

  Rat prob(int v, int a) const { return p[static_cast<std::size_t>(v * alphabet + a)]; }
  std::vector<Rat> vertex_marginal() const;       // q(v)
  std::vector<Rat> conditional_labels(int v) const;  // r_v, zero vector if q(v)=0
  int plurality(int v) const;                     // iota*(v)
  Rat ambiguity(int v) const;                     // b_v = 1 - r_v(iota*(v))
  void validate() const;

  static BranchDistribution honest(const GapCGInstance& g, const std::vector<int>& labeling);
  static BranchDistribution from_state(const GapCGInstance& g, const states::ExactState& psi);
  std::vector<double> to_double() const;
};

// Uniform over {(v, labeling(v))}; throws naming the violated edge if the
// labeling does not satisfy the instance.
states::SubsetState honest_witness(const GapCGInstance& g, const std::vector<int>& labeling);

// Deterministic collision-count predicate: accept iff the number of colliding
// sample pairs is at most (K(K-1)/(2n)) (1 + delta^2/2).
bool paninski_predicate(const std::vector<int>& vertex_samples, int n, double delta);
double paninski_threshold(int K, int n, double delta);

// Reject iff two branch entries share a vertex with different labels or
// violate an edge relation.
bool consistency_predicate(const std::vector<std::pair<int, int>>& branch,
                           const GapCGInstance& g);

// Reversible circuit writing the rejection indicator of (uniformity AND
// consistency) over K witness copies, wrapped in the branch-overlap test.
verifier::StoqVerifier build_protocol4_verifier(const GapCGInstance& g, int K, double delta);

struct AcceptanceEstimate {
  double value = 0;
  double ci_low = 0;
  double ci_high = 1;
  bool exact = false;
  std::uint64_t trials = 0;
};
// Monte Carlo (Wilson 99% CI) or exact enumeration when |V x Sigma|^K <= 1e6.
AcceptanceEstimate protocol4_acceptance(const GapCGInstance& g, const BranchDistribution& p,
                                        int K, double delta, std::uint64_t trials,
                                        std::uint64_t seed);

// One plus-qubit selects the uniformity or the consistency branch; the flag
// records rejection.
verifier::StoqVerifier build_protocol5_verifier(const GapCGInstance& g);

// Exact rejection probability of the two-sample branch-local protocol:
// (1/2) sum_u q(u)^2 + (1/2) Pr[consistency rejects], rational in p.
Rat protocol5_rejection(const GapCGInstance& g, const BranchDistribution& p);

struct MinimizeResult {
  double value = 0;
  std::vector<double> argmin;
  bool certified = false;  // true when the KKT support enumeration ran
};
// Global minimum of the rejection quadratic over the probability simplex:
// exact stationary-support enumeration for small dimensions, plus a lattice
// grid and projected-gradient polish.
MinimizeResult minimize_protocol5_rejection(const GapCGInstance& g, int grid = 24,
                                            std::uint64_t seed = 5);

// Fraction of trials in which K iid samples from mu contain a bad pair inside
// omega0. Deterministic given the seed.
struct BirthdayResult {
  double estimate = 0;
  double ci_low = 0;
  double ci_high = 1;
};
BirthdayResult birthday_mc(const std::vector<double>& mu,
                           const std::function<bool(int, int)>& bad_pair,
                           const std::vector<bool>& omega0, int K, std::uint64_t trials,
                           std::uint64_t seed);

// Exact product formula for the uniform-equality case.
double birthday_exact_uniform(int n, int K);

nlohmann::json gapcg_to_json(const GapCGInstance& g);
GapCGInstance gapcg_from_json(const nlohmann::json& j);

// Instance builders used by tests and the CLI.
GapCGInstance cycle_equality_instance(int n, int alphabet);
GapCGInstance triangle_disequality_instance();

}  // namespace stoqlab::npcert
