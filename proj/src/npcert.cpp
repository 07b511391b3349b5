#include "stoqlab/npcert.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace stoqlab::npcert {

void GapCGInstance::validate() const {
  if (n_vertices < 1) throw std::invalid_argument("instance needs vertices");
  if (alphabet < 1) throw std::invalid_argument("instance needs an alphabet");
  if (degree < 0) throw std::invalid_argument("negative degree");
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n_vertices || e.v < 0 || e.v >= n_vertices)
      throw std::invalid_argument("edge endpoint out of range");
    for (const auto& [a, b] : e.relation)
      if (a < 0 || a >= alphabet || b < 0 || b >= alphabet)
        throw std::invalid_argument("relation label out of range");
  }
}

bool GapCGInstance::edge_allows(int u, int v, int a, int b) const {
  for (const auto& e : edges) {
    if (e.u == u && e.v == v && !e.relation.count({a, b})) return false;
    if (e.u == v && e.v == u && !e.relation.count({b, a})) return false;
  }
  return true;
}

std::optional<std::size_t> GapCGInstance::edge_between(int u, int v) const {
  for (std::size_t i = 0; i < edges.size(); ++i)
    if ((edges[i].u == u && edges[i].v == v) || (edges[i].u == v && edges[i].v == u)) return i;
  return std::nullopt;
}

std::vector<Rat> BranchDistribution::vertex_marginal() const {
  std::vector<Rat> q(static_cast<std::size_t>(n_vertices), Rat(0));
  for (int v = 0; v < n_vertices; ++v)
    for (int a = 0; a < alphabet; ++a) q[static_cast<std::size_t>(v)] += prob(v, a);
  return q;
}

std::vector<Rat> BranchDistribution::conditional_labels(int v) const {
  std::vector<Rat> r(static_cast<std::size_t>(alphabet), Rat(0));
  Rat q(0);
  for (int a = 0; a < alphabet; ++a) q += prob(v, a);
  if (q == 0) return r;
  for (int a = 0; a < alphabet; ++a) r[static_cast<std::size_t>(a)] = prob(v, a) / q;
  return r;
}

int BranchDistribution::plurality(int v) const {
  const auto r = conditional_labels(v);
  int best = 0;
  for (int a = 1; a < alphabet; ++a)
    if (r[static_cast<std::size_t>(a)] > r[static_cast<std::size_t>(best)]) best = a;
  return best;
}

Rat BranchDistribution::ambiguity(int v) const {
  const auto r = conditional_labels(v);
  return Rat(1) - r[static_cast<std::size_t>(plurality(v))];
}

void BranchDistribution::validate() const {
  Rat s(0);
  for (const Rat& x : p) {
    if (x < 0) throw std::invalid_argument("negative probability");
    s += x;
  }
  if (s != 1) throw std::invalid_argument("branch distribution must sum to 1");
}

BranchDistribution BranchDistribution::honest(const GapCGInstance& g,
                                              const std::vector<int>& labeling) {
  BranchDistribution d;
  d.n_vertices = g.n_vertices;
  d.alphabet = g.alphabet;
  d.p.assign(static_cast<std::size_t>(g.n_vertices * g.alphabet), Rat(0));
  for (int v = 0; v < g.n_vertices; ++v)
    d.p[static_cast<std::size_t>(v * g.alphabet + labeling[static_cast<std::size_t>(v)])] =
        Rat(1, g.n_vertices);
  return d;
}

BranchDistribution BranchDistribution::from_state(const GapCGInstance& g,
                                                  const states::ExactState& psi) {
  BranchDistribution d;
  d.n_vertices = g.n_vertices;
  d.alphabet = g.alphabet;
  d.p.assign(static_cast<std::size_t>(g.n_vertices * g.alphabet), Rat(0));
  const int vb = g.vertex_bits();
  for (const auto& [x, c] : psi.coeff) {
    const int v = static_cast<int>(get_field(x, 0, vb));
    const int a = static_cast<int>(get_field(x, vb, g.label_bits()));
    if (v >= g.n_vertices || a >= g.alphabet)
      throw std::invalid_argument("witness support outside V x Sigma");
    d.p[static_cast<std::size_t>(v * g.alphabet + a)] += psi.scale2 * c * c;
  }
  d.validate();
  return d;
}

std::vector<double> BranchDistribution::to_double() const {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = stoqlab::to_double(p[i]);
  return out;
}

states::SubsetState honest_witness(const GapCGInstance& g, const std::vector<int>& labeling) {
  g.validate();
  if (static_cast<int>(labeling.size()) != g.n_vertices)
    throw std::invalid_argument("labeling size mismatch");
  for (const auto& e : g.edges) {
    const int a = labeling[static_cast<std::size_t>(e.u)];
    const int b = labeling[static_cast<std::size_t>(e.v)];
    if (!e.relation.count({a, b}))
      throw std::invalid_argument("labeling violates edge (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + ")");
  }
  states::SubsetState s;
  s.width = g.pair_bits();
  const int vb = g.vertex_bits();
  for (int v = 0; v < g.n_vertices; ++v)
    s.support.insert(static_cast<Word>(v) |
                     (static_cast<Word>(labeling[static_cast<std::size_t>(v)]) << vb));
  return s;
}

double paninski_threshold(int K, int n, double delta) {
  return (static_cast<double>(K) * (K - 1) / (2.0 * n)) * (1.0 + delta * delta / 2.0);
}

bool paninski_predicate(const std::vector<int>& vertex_samples, int n, double delta) {
  std::map<int, int> counts;
  for (int v : vertex_samples) ++counts[v];
  double pairs = 0;
  for (const auto& [v, c] : counts) pairs += 0.5 * c * (c - 1);
  return pairs <= paninski_threshold(static_cast<int>(vertex_samples.size()), n, delta);
}

bool consistency_predicate(const std::vector<std::pair<int, int>>& branch,
                           const GapCGInstance& g) {
  for (std::size_t i = 0; i < branch.size(); ++i)
    for (std::size_t j = i + 1; j < branch.size(); ++j) {
      const auto& [vi, ai] = branch[i];
      const auto& [vj, aj] = branch[j];
      if (vi == vj && ai != aj) return false;
      if (g.edge_between(vi, vj) && !g.edge_allows(vi, vj, ai, aj)) return false;
    }
  return true;
}

namespace {

// Decode copy i of a K-copy branch word.
std::pair<int, int> decode_pair(const GapCGInstance& g, Word x, int copy) {
  const int pb = g.pair_bits();
  const int vb = g.vertex_bits();
  const Word w = get_field(x, copy * pb, pb);
  return {static_cast<int>(get_field(w, 0, vb)),
          static_cast<int>(get_field(w, vb, g.label_bits()))};
}

bool branch_rejects(const GapCGInstance& g, Word x, int K, double delta) {
  std::vector<std::pair<int, int>> branch;
  std::vector<int> vertices;
  for (int i = 0; i < K; ++i) {
    const auto [v, a] = decode_pair(g, x, i);
    if (v >= g.n_vertices || a >= g.alphabet) return true;  // outside V x Sigma
    branch.emplace_back(v, a);
    vertices.push_back(v);
  }
  if (!paninski_predicate(vertices, g.n_vertices, delta)) return true;
  return !consistency_predicate(branch, g);
}

}  // namespace

verifier::StoqVerifier build_protocol4_verifier(const GapCGInstance& g, int K, double delta) {
  g.validate();
  const int pb = g.pair_bits();
  const int wbits = K * pb;
  if (wbits > 12) throw std::invalid_argument("protocol 4 exact mode cap exceeded");

  verifier::VerifierLayout inner;
  inner.k = K;
  inner.ell = pb;
  const int pool = std::max(0, wbits - 2);
  inner.n0 = 1 + pool;  // flag + MCX ladder
  inner.nplus = 0;
  inner.output = 0;
  const int flag = inner.zero_offset();
  std::vector<int> pool_q(static_cast<std::size_t>(pool));
  std::iota(pool_q.begin(), pool_q.end(), flag + 1);
  std::vector<int> wq(static_cast<std::size_t>(wbits));
  std::iota(wq.begin(), wq.end(), 0);

  revsim::ReversibleCircuit gamma(inner.width());
  for (Word x = 0; x < (Word{1} << wbits); ++x)
    if (branch_rejects(g, x, K, delta)) revsim::append_pattern_flip(gamma, wq, x, flag, pool_q);

  revsim::ReversibleCircuit identity(inner.width());
  return verifier::build_branch_overlap_verifier(gamma, identity, inner);
}

namespace {

double wilson_low(double phat, std::uint64_t n, double z) {
  if (n == 0) return 0;
  const double nn = static_cast<double>(n);
  const double denom = 1 + z * z / nn;
  const double center = phat + z * z / (2 * nn);
  const double rad = z * std::sqrt(phat * (1 - phat) / nn + z * z / (4 * nn * nn));
  return std::max(0.0, (center - rad) / denom);
}

double wilson_high(double phat, std::uint64_t n, double z) {
  if (n == 0) return 1;
  const double nn = static_cast<double>(n);
  const double denom = 1 + z * z / nn;
  const double center = phat + z * z / (2 * nn);
  const double rad = z * std::sqrt(phat * (1 - phat) / nn + z * z / (4 * nn * nn));
  return std::min(1.0, (center + rad) / denom);
}

constexpr double kZ99 = 2.5758293035489004;

}  // namespace

namespace {

// Per-vertex adjacency with direct relation lookups; the edge scans inside
// the Monte Carlo loop must not be linear in |E|.
struct NeighborIndex {
  std::vector<std::vector<std::pair<int, const GapCGInstance::Edge*>>> nbrs;
  std::vector<char> oriented_as_u;  // parallel to nbrs: true if edge->u is the owner

  explicit NeighborIndex(const GapCGInstance& g) : nbrs(static_cast<std::size_t>(g.n_vertices)) {
    for (const auto& e : g.edges) {
      nbrs[static_cast<std::size_t>(e.u)].emplace_back(e.v, &e);
      if (e.u != e.v) nbrs[static_cast<std::size_t>(e.v)].emplace_back(e.u, &e);
    }
  }
  // does the edge relation allow labels (a at u, b at v)?
  static bool allows(const GapCGInstance::Edge& e, int u, int a, int b) {
    return u == e.u ? e.relation.count({a, b}) > 0 : e.relation.count({b, a}) > 0;
  }
};

// Collision counting plus consistency in O(K d) per trial using chained
// vertex buckets.
struct BranchChecker {
  const GapCGInstance& g;
  NeighborIndex idx;
  std::vector<int> head, next_in_bucket;
  std::vector<int> touched;

  explicit BranchChecker(const GapCGInstance& gg)
      : g(gg), idx(gg), head(static_cast<std::size_t>(gg.n_vertices), -1) {}

  bool accepts(const std::vector<std::pair<int, int>>& branch, double delta) {
    const int K = static_cast<int>(branch.size());
    next_in_bucket.assign(static_cast<std::size_t>(K), -1);
    touched.clear();
    for (int i = 0; i < K; ++i) {
      const int v = branch[static_cast<std::size_t>(i)].first;
      if (head[static_cast<std::size_t>(v)] < 0) touched.push_back(v);
      next_in_bucket[static_cast<std::size_t>(i)] = head[static_cast<std::size_t>(v)];
      head[static_cast<std::size_t>(v)] = i;
    }
    bool ok = true;
    // uniformity: colliding-pair count against the threshold
    double pairs = 0;
    for (int v : touched) {
      int c = 0;
      for (int i = head[static_cast<std::size_t>(v)]; i >= 0; i = next_in_bucket[static_cast<std::size_t>(i)]) ++c;
      pairs += 0.5 * c * (c - 1);
    }
    if (pairs > paninski_threshold(K, g.n_vertices, delta)) ok = false;
    // consistency (i): one label per vertex
    if (ok) {
      for (int v : touched) {
        const int first = head[static_cast<std::size_t>(v)];
        for (int i = next_in_bucket[static_cast<std::size_t>(first)]; i >= 0 && ok;
             i = next_in_bucket[static_cast<std::size_t>(i)])
          ok = branch[static_cast<std::size_t>(i)].second ==
               branch[static_cast<std::size_t>(first)].second;
        if (!ok) break;
      }
    }
    // consistency (ii): edge relations between sampled vertices
    if (ok) {
      for (int i = 0; i < K && ok; ++i) {
        const auto& [v, a] = branch[static_cast<std::size_t>(i)];
        for (const auto& [u, edge] : idx.nbrs[static_cast<std::size_t>(v)]) {
          for (int j = head[static_cast<std::size_t>(u)]; j >= 0;
               j = next_in_bucket[static_cast<std::size_t>(j)]) {
            if (u == v && j == i) continue;
            if (!NeighborIndex::allows(*edge, v, a, branch[static_cast<std::size_t>(j)].second)) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
        }
      }
    }
    for (int v : touched) head[static_cast<std::size_t>(v)] = -1;
    return ok;
  }
};

}  // namespace

AcceptanceEstimate protocol4_acceptance(const GapCGInstance& g, const BranchDistribution& p,
                                        int K, double delta, std::uint64_t trials,
                                        std::uint64_t seed) {
  g.validate();
  p.validate();
  const std::size_t dim = p.p.size();
  double exact_cost = 1;
  for (int i = 0; i < K && exact_cost <= 1e6; ++i) exact_cost *= static_cast<double>(dim);

  AcceptanceEstimate est;
  if (trials == 0 && exact_cost > 1e6)
    throw std::invalid_argument("exact enumeration cap exceeded; pass a trial count");
  if (trials == 0) {
    // exact enumeration over support^K
    std::vector<int> sup;
    for (std::size_t i = 0; i < dim; ++i)
      if (p.p[i] > 0) sup.push_back(static_cast<int>(i));
    Rat acc(0);
    std::vector<int> idx(static_cast<std::size_t>(K), 0);
    std::vector<std::pair<int, int>> branch(static_cast<std::size_t>(K));
    std::vector<int> vertices(static_cast<std::size_t>(K));
    std::function<void(int, Rat)> rec = [&](int d, Rat w) {
      if (d == K) {
        for (int i = 0; i < K; ++i) {
          branch[static_cast<std::size_t>(i)] = {idx[static_cast<std::size_t>(i)] / g.alphabet,
                                                 idx[static_cast<std::size_t>(i)] % g.alphabet};
          vertices[static_cast<std::size_t>(i)] = branch[static_cast<std::size_t>(i)].first;
        }
        if (paninski_predicate(vertices, g.n_vertices, delta) &&
            consistency_predicate(branch, g))
          acc += w;
        return;
      }
      for (int s : sup) {
        idx[static_cast<std::size_t>(d)] = s;
        rec(d + 1, w * p.p[static_cast<std::size_t>(s)]);
      }
    };
    rec(0, Rat(1));
    est.value = to_double(acc);
    est.ci_low = est.value;
    est.ci_high = est.value;
    est.exact = true;
    return est;
  }

  std::mt19937_64 rng(seed);
  const std::vector<double> pd = p.to_double();
  std::vector<double> cum(pd.size());
  std::partial_sum(pd.begin(), pd.end(), cum.begin());
  std::uniform_real_distribution<double> uni(0.0, cum.back());
  std::uint64_t accepted = 0;
  std::vector<std::pair<int, int>> branch(static_cast<std::size_t>(K));
  BranchChecker checker(g);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (int i = 0; i < K; ++i) {
      const auto it = std::lower_bound(cum.begin(), cum.end(), uni(rng));
      const int s = static_cast<int>(it - cum.begin());
      branch[static_cast<std::size_t>(i)] = {s / g.alphabet, s % g.alphabet};
    }
    if (checker.accepts(branch, delta)) ++accepted;
  }
  est.value = static_cast<double>(accepted) / static_cast<double>(trials);
  est.ci_low = wilson_low(est.value, trials, kZ99);
  est.ci_high = wilson_high(est.value, trials, kZ99);
  est.trials = trials;
  return est;
}

verifier::StoqVerifier build_protocol5_verifier(const GapCGInstance& g) {
  g.validate();
  const int pb = g.pair_bits();
  const int wbits = 2 * pb;
  if (wbits + 1 > 13) throw std::invalid_argument("protocol 5 width cap exceeded");

  verifier::VerifierLayout inner;
  inner.k = 2;
  inner.ell = pb;
  const int pool = std::max(0, wbits - 1);  // controls = witness + selector
  inner.n0 = 1 + pool;
  inner.nplus = 1;  // test selector
  inner.output = 0;
  const int flag = inner.zero_offset();
  const int sel = inner.plus_offset();
  std::vector<int> pool_q(static_cast<std::size_t>(pool));
  std::iota(pool_q.begin(), pool_q.end(), flag + 1);

  std::vector<int> ctrls(static_cast<std::size_t>(wbits));
  std::iota(ctrls.begin(), ctrls.end(), 0);
  ctrls.push_back(sel);

  revsim::ReversibleCircuit gamma(inner.width());
  for (Word x = 0; x < (Word{1} << wbits); ++x) {
    const auto [u, a] = decode_pair(g, x, 0);
    const auto [v, b] = decode_pair(g, x, 1);
    const bool invalid = u >= g.n_vertices || a >= g.alphabet || v >= g.n_vertices ||
                         b >= g.alphabet;
    const bool unif_rejects = invalid || u == v;
    const bool cons_rejects = invalid || !consistency_predicate({{u, a}, {v, b}}, g);
    if (unif_rejects) revsim::append_pattern_flip(gamma, ctrls, x, flag, pool_q);
    if (cons_rejects)
      revsim::append_pattern_flip(gamma, ctrls, x | (Word{1} << wbits), flag, pool_q);
  }

  revsim::ReversibleCircuit identity(inner.width());
  return verifier::build_branch_overlap_verifier(gamma, identity, inner);
}

Rat protocol5_rejection(const GapCGInstance& g, const BranchDistribution& p) {
  g.validate();
  p.validate();
  Rat unif(0);
  const auto q = p.vertex_marginal();
  for (const Rat& x : q) unif += x * x;
  Rat cons(0);
  for (int u = 0; u < g.n_vertices; ++u)
    for (int a = 0; a < g.alphabet; ++a) {
      const Rat pu = p.prob(u, a);
      if (pu == 0) continue;
      for (int v = 0; v < g.n_vertices; ++v)
        for (int b = 0; b < g.alphabet; ++b) {
          const Rat pv = p.prob(v, b);
          if (pv == 0) continue;
          const bool same_vertex_conflict = (u == v && a != b);
          const bool edge_conflict = g.edge_between(u, v) && !g.edge_allows(u, v, a, b);
          if (same_vertex_conflict || edge_conflict) cons += pu * pv;
        }
    }
  return unif / 2 + cons / 2;
}

namespace {

Eigen::MatrixXd rejection_matrix(const GapCGInstance& g) {
  const int dim = g.n_vertices * g.alphabet;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim, dim);
  for (int u = 0; u < g.n_vertices; ++u)
    for (int a = 0; a < g.alphabet; ++a)
      for (int v = 0; v < g.n_vertices; ++v)
        for (int b = 0; b < g.alphabet; ++b) {
          double val = 0;
          if (u == v) val += 0.5;  // uniformity collision
          const bool same_vertex_conflict = (u == v && a != b);
          const bool edge_conflict = g.edge_between(u, v) && !g.edge_allows(u, v, a, b);
          if (same_vertex_conflict || edge_conflict) val += 0.5;
          r(u * g.alphabet + a, v * g.alphabet + b) = val;
        }
  return r;
}

// Projected gradient descent on the simplex from a given start.
double pgd_minimize(const Eigen::MatrixXd& r, Eigen::VectorXd& p, int iters = 2000) {
  double step = 0.5;
  double value = p.dot(r * p);
  for (int it = 0; it < iters && step > 1e-14; ++it) {
    Eigen::VectorXd grad = 2.0 * r * p;
    Eigen::VectorXd cand = p - step * grad;
    // simplex projection (sorting-based)
    {
      const Eigen::Index n = cand.size();
      std::vector<double> u(cand.data(), cand.data() + n);
      std::sort(u.begin(), u.end(), std::greater<double>());
      double css = 0;
      double theta = 0;
      int rho = -1;
      for (int i = 0; i < static_cast<int>(n); ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (css - 1.0) / (i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0) {
          rho = i;
          theta = t;
        }
      }
      for (Eigen::Index i = 0; i < n; ++i) cand[i] = std::max(0.0, cand[i] - theta);
      (void)rho;
    }
    const double cv = cand.dot(r * cand);
    if (cv < value - 1e-15) {
      p = cand;
      value = cv;
    } else {
      step /= 2;
    }
  }
  return value;
}

}  // namespace

MinimizeResult minimize_protocol5_rejection(const GapCGInstance& g, int grid,
                                            std::uint64_t seed) {
  g.validate();
  const int dim = g.n_vertices * g.alphabet;
  if (dim > 64) throw std::invalid_argument("minimization dimension cap exceeded");
  const Eigen::MatrixXd r = rejection_matrix(g);

  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& p) {
    const double v = p.dot(r * p);
    if (v < best.value) {
      best.value = v;
      best.argmin.assign(p.data(), p.data() + p.size());
    }
  };

  // KKT stationary points by support enumeration (exact for small dims).
  if (dim <= 16) {
    best.certified = true;
    for (unsigned mask = 1; mask < (1u << dim); ++mask) {
      std::vector<int> sup;
      for (int i = 0; i < dim; ++i)
        if (mask >> i & 1u) sup.push_back(i);
      const int s = static_cast<int>(sup.size());
      Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(s + 1, s + 1);
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) sys(i, j) = 2.0 * r(sup[static_cast<std::size_t>(i)], sup[static_cast<std::size_t>(j)]);
      for (int i = 0; i < s; ++i) {
        sys(i, s) = -1.0;
        sys(s, i) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs[s] = 1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
      Eigen::VectorXd sol;
      if (lu.isInvertible()) {
        sol = lu.solve(rhs);
      } else {
        sol = sys.completeOrthogonalDecomposition().solve(rhs);
        if ((sys * sol - rhs).norm() > 1e-9) continue;
      }
      bool feasible = true;
      for (int i = 0; i < s; ++i) feasible &= sol[i] >= -1e-12;
      if (!feasible) continue;
      Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < s; ++i) p[sup[static_cast<std::size_t>(i)]] = std::max(0.0, sol[i]);
      const double tot = p.sum();
      if (tot <= 0) continue;
      p /= tot;
      consider(p);
    }
  }

  // Lattice grid plus projected-gradient polish.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 64; ++t) {
    Eigen::VectorXd p(dim);
    for (int i = 0; i < dim; ++i) p[i] = -std::log(uni(rng));
    p /= p.sum();
    pgd_minimize(r, p);
    consider(p);
  }
  // coarse lattice: mass split over at most 3 atoms
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      for (int gstep = 0; gstep <= grid; ++gstep) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
        const double w = static_cast<double>(gstep) / grid;
        p[i] = w;
        p[j] += 1.0 - w;
        pgd_minimize(r, p, 400);
        consider(p);
      }
  return best;
}

BirthdayResult birthday_mc(const std::vector<double>& mu,
                           const std::function<bool(int, int)>& bad_pair,
                           const std::vector<bool>& omega0, int K, std::uint64_t trials,
                           std::uint64_t seed) {
  if (mu.empty()) throw std::invalid_argument("empty distribution");
  std::vector<double> cum(mu.size());
  std::partial_sum(mu.begin(), mu.end(), cum.begin());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, cum.back());
  std::uint64_t hits = 0;
  std::vector<int> samples(static_cast<std::size_t>(K));
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (int i = 0; i < K; ++i) {
      const auto it = std::lower_bound(cum.begin(), cum.end(), uni(rng));
      samples[static_cast<std::size_t>(i)] = static_cast<int>(it - cum.begin());
    }
    bool found = false;
    for (int i = 0; i < K && !found; ++i) {
      if (!omega0[static_cast<std::size_t>(samples[static_cast<std::size_t>(i)])]) continue;
      for (int j = i + 1; j < K && !found; ++j) {
        if (!omega0[static_cast<std::size_t>(samples[static_cast<std::size_t>(j)])]) continue;
        found = bad_pair(samples[static_cast<std::size_t>(i)], samples[static_cast<std::size_t>(j)]);
      }
    }
    if (found) ++hits;
  }
  BirthdayResult r;
  r.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  r.ci_low = wilson_low(r.estimate, trials, kZ99);
  r.ci_high = wilson_high(r.estimate, trials, kZ99);
  return r;
}

double birthday_exact_uniform(int n, int K) {
  double no_collision = 1.0;
  for (int i = 1; i < K; ++i) no_collision *= 1.0 - static_cast<double>(i) / n;
  return 1.0 - no_collision;
}

nlohmann::json gapcg_to_json(const GapCGInstance& g) {
  nlohmann::json j;
  j["vertices"] = g.n_vertices;
  j["degree"] = g.degree;
  j["alphabet"] = g.alphabet;
  j["eta"] = g.eta;
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges) {
    nlohmann::json ej;
    ej["u"] = e.u;
    ej["v"] = e.v;
    ej["relation"] = nlohmann::json::array();
    for (const auto& [a, b] : e.relation) ej["relation"].push_back({a, b});
    j["edges"].push_back(ej);
  }
  return j;
}

GapCGInstance gapcg_from_json(const nlohmann::json& j) {
  GapCGInstance g;
  g.n_vertices = j.at("vertices").get<int>();
  g.degree = j.at("degree").get<int>();
  g.alphabet = j.at("alphabet").get<int>();
  g.eta = j.value("eta", 0.0);
  for (const auto& ej : j.at("edges")) {
    GapCGInstance::Edge e;
    e.u = ej.at("u").get<int>();
    e.v = ej.at("v").get<int>();
    for (const auto& p : ej.at("relation"))
      e.relation.insert({p.at(0).get<int>(), p.at(1).get<int>()});
    g.edges.push_back(std::move(e));
  }
  g.validate();
  return g;
}

GapCGInstance cycle_equality_instance(int n, int alphabet) {
  GapCGInstance g;
  g.n_vertices = n;
  g.alphabet = alphabet;
  g.eta = 0;
  std::set<std::pair<int, int>> eq;
  for (int a = 0; a < alphabet; ++a) eq.insert({a, a});
  if (n == 2) {
    g.degree = 1;
    g.edges.push_back({0, 1, eq});
  } else if (n >= 3) {
    g.degree = 2;
    for (int v = 0; v < n; ++v) g.edges.push_back({v, (v + 1) % n, eq});
  } else {
    g.degree = 0;
  }
  g.validate();
  return g;
}

GapCGInstance triangle_disequality_instance() {
  GapCGInstance g;
  g.n_vertices = 3;
  g.alphabet = 2;
  g.degree = 2;
  g.eta = 1.0 / 3.0;
  const std::set<std::pair<int, int>> neq{{0, 1}, {1, 0}};
  g.edges.push_back({0, 1, neq});
  g.edges.push_back({1, 2, neq});
  g.edges.push_back({0, 2, neq});
  g.validate();
  return g;
}

}  // namespace stoqlab::npcert
