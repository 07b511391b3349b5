#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "stoqlab/revsim.hpp"

namespace stoqlab::rectclosure {

// A SepRCD instance in (Gamma, I) form: witness blocks A and B of ell qubits
// each, m0 zero ancillas, r plus ancillas.
struct SepRcdInstance {
  revsim::ReversibleCircuit gamma;
  int ell = 0;
  int m0 = 0;
  int r = 0;

  int width() const { return 2 * ell + m0 + r; }
  void validate() const;
};

struct RectClosureParams {
  double gamma_sound = 0;  // soundness parameter in (0,1)
  int L = 0;               // ceil((2 ell ln2 + 1) / ln(1+gamma))
  std::vector<double> log2_tau;  // log2 tau_t, t = 0..L
  double log2_eps = 0;           // log2 of the completeness-error bound

  static RectClosureParams make(int ell, int r, double gamma_sound);
};

int round_bound(int ell, double gamma_sound);
double completeness_log_eps(int ell, int r, int L);
double log2_tau_closed_form(int ell, int t);

struct GoodTransition {
  Word a_out = 0, b_out = 0, u_out = 0;
};
struct BadTransition {
  Word z_out = 0;
};
using Transition = std::variant<GoodTransition, BadTransition>;

Transition transition(const SepRcdInstance& inst, Word a, Word b, Word u);

bool is_closed_rectangle(const SepRcdInstance& inst, const std::set<Word>& s,
                         const std::set<Word>& t);

struct RoundOutcome {
  bool bad = false;
  std::set<Word> s_next, t_next;
};
RoundOutcome closure_round(const SepRcdInstance& inst, const std::set<Word>& s,
                           const std::set<Word>& t);

struct SeedLog {
  Word a0 = 0, b0 = 0;
  int rounds_completed = 0;          // good rounds before a bad one (or L)
  std::vector<std::size_t> rect_sizes;  // |S_t x T_t| per round, starting at 1
  bool survived = false;
};

struct RectClosureVerdict {
  bool accept = false;
  RectClosureParams params;
  std::optional<SeedLog> accepting_seed;  // lexicographically least on accept
  std::vector<SeedLog> seed_logs;         // all seeds (reject) or up to accept
};

// Explicit-table implementation: bit tables for S_t/T_t, seeds scanned in
// lexicographic order with early exit. max_rounds overrides the formula L
// when non-negative (used for implementation-equivalence tests).
RectClosureVerdict rect_closure_test(const SepRcdInstance& inst, double gamma_sound,
                                     int max_rounds = -1, bool parallel_seeds = false,
                                     int workers = 0);

// Depth-first recursive evaluation of the membership predicates; stores one
// path, no tables. Demonstration scale only.
RectClosureVerdict rect_closure_test_recursive(const SepRcdInstance& inst, double gamma_sound,
                                               int max_rounds = -1);

nlohmann::json instance_to_json(const SepRcdInstance& inst);
SepRcdInstance instance_from_json(const nlohmann::json& j);
nlohmann::json verdict_to_json(const RectClosureVerdict& v);

// Yes-instance builder: a circuit fixing the initialized sector over S x T
// pointwise (every gate carries a control on some zero ancilla).
SepRcdInstance build_pointwise_fixed_instance(int ell, int m0, int r, int n_gates,
                                              std::mt19937_64& rng);

// Random-gate instance; callers filter with a separable-value oracle.
SepRcdInstance build_random_instance(int ell, int m0, int r, int n_gates, std::mt19937_64& rng);

// Effective matrix M[(a,b),(a',b')] = 2^{-r} #{u : Gamma(a',b',0,u) = (a,b,0,.)},
// whose separable value over (A,B) is the SepRCD value of the instance.
Eigen::MatrixXd effective_overlap_matrix(const SepRcdInstance& inst);

}  // namespace stoqlab::rectclosure
