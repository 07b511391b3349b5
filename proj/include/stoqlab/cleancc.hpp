#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "stoqlab/rational.hpp"
#include "stoqlab/states.hpp"

namespace stoqlab::cleancc {

// Explicit-table instance: |V| = 2^n vertices, neighbor lists padded with
// self-loops to length dG, and a marking bit per vertex.
struct CleanCcInstance {
  int n = 0;   // vertex-label bits
  int dG = 0;  // padded degree bound
  std::vector<std::vector<int>> neighbor;  // neighbor[v][j], j in [dG]
  std::vector<int> marked;                 // 0/1 per vertex

  int n_vertices() const { return 1 << n; }
  int q() const { return ceil_log2(static_cast<std::uint64_t>(dG) + 1); }
  int J() const { return 1 << q(); }
  // every true neighbor exactly once, remaining slots self-loops, symmetric
  void validate() const;
  std::vector<std::pair<int, int>> edge_list() const;  // u < v, no self loops
  std::vector<std::vector<int>> components() const;
};

struct CleanCcWitness {
  std::vector<double> alpha;  // non-negative, squared sum 1
  void validate() const;
};

// The unique j' with neighbor(neighbor(v,j), j') = v; equals j on padded
// self-loop slots.
int return_index(const CleanCcInstance& inst, int v, int j);

// The piecewise permutation on (j, v, c): neighbor branches for j < dG, the
// marking branch at j = dG, identity above. An involution.
struct GammaMap {
  int q = 0, n = 0;
  std::function<Word(Word)> apply;  // word layout: j | v << q | c << (q+n)
};
GammaMap build_gamma(const CleanCcInstance& inst);

// 1 - (1/(2J)) ( sum_edges (alpha_u - alpha_v)^2 + sum_marked alpha_v^2 ).
double acceptance(const CleanCcInstance& inst, const CleanCcWitness& w);
// Exact counterpart for subset-state witnesses (uniform over a vertex set).
Rat acceptance_exact_subset(const CleanCcInstance& inst, const std::vector<int>& support);

struct MaxAcceptance {
  double value = 0;
  CleanCcWitness witness;
};
// 1/2 + lambda_max(Q)/2 for the quadratic form assembled from the branch
// decomposition; the Perron vector is the optimal non-negative witness.
MaxAcceptance max_acceptance(const CleanCcInstance& inst);

double soundness_bound(int n, int dG);

nlohmann::json cleancc_to_json(const CleanCcInstance& inst);
CleanCcInstance cleancc_from_json(const nlohmann::json& j);

// Builder from an edge list; pads with self-loops.
CleanCcInstance make_instance(int n, int dG, const std::vector<std::pair<int, int>>& edges,
                              const std::vector<int>& marked);

}  // namespace stoqlab::cleancc
