#include "stoqlab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace stoqlab::protocols {

using revsim::Gate;
using revsim::ReversibleCircuit;
using verifier::StoqVerifier;
using verifier::VerifierLayout;

DyadicBranchPlan DyadicBranchPlan::make(int k, int b) {
  if (k < 1 || k > 8) throw std::invalid_argument("prover count out of range");
  if (b < 0 || b > 16) throw std::invalid_argument("precision bits out of range");
  DyadicBranchPlan p;
  p.k = k;
  p.K = 1;
  for (int i = 2; i <= k; ++i) p.K *= static_cast<std::uint64_t>(i);
  p.b = b;
  p.q = ceil_log2(p.K) + b;
  p.N = std::uint64_t{1} << p.q;
  p.a = p.N / p.K;
  p.r = p.N % p.K;
  p.zeta = Rat(static_cast<long>(p.r * (p.K - p.r)), 1) /
           Rat(static_cast<long>(p.K), 1) / Rat(static_cast<long>(p.N), 1);
  if (p.zeta > pow2_rat(-b - 2)) throw std::logic_error("dyadic plan violates zeta bound");
  return p;
}

CompressionParams CompressionParams::make(double delta, double c_prod, int bits) {
  if (delta <= 0 || delta > 1) throw std::invalid_argument("delta out of range");
  CompressionParams p;
  p.c_prod = c_prod;
  p.gamma = c_prod / 4.0;
  p.lambda = p.gamma * delta;
  if (p.lambda >= 0.5) throw std::invalid_argument("lambda must stay below 1/2");
  p.lambda_dyadic = dyadic_floor(p.lambda, bits);
  if (p.lambda_dyadic.num == 0) p.lambda_dyadic.num = 1;  // keep the V branch alive
  while (p.lambda_dyadic.num % 2 == 0 && p.lambda_dyadic.bits > 0) {
    p.lambda_dyadic.num /= 2;
    --p.lambda_dyadic.bits;
  }
  p.truncation_error = p.lambda - to_double(p.lambda_dyadic.value());
  return p;
}

SymmetrizationPlan SymmetrizationPlan::make(int k, int ell, double c, double delta) {
  SymmetrizationPlan p;
  p.k = k;
  p.r = std::max(1, static_cast<int>(std::ceil(12.0 * std::log(static_cast<double>(k)))));
  p.label_bits = ceil_log2(static_cast<std::uint64_t>(k));
  p.m = p.r * (ell + p.label_bits);
  p.dummy_acceptance = c - delta;
  return p;
}

namespace {

// Marginal matrix over the blocks selected by mask: rows indexed by the kept
// blocks, columns by the complement.
Eigen::MatrixXd reshape_blocks(const Eigen::VectorXd& v, int k, int ell, unsigned mask) {
  int kept_bits = 0;
  int dropped_bits = 0;
  for (int b = 0; b < k; ++b) (mask >> b & 1u ? kept_bits : dropped_bits) += ell;
  Eigen::MatrixXd m(Eigen::Index{1} << kept_bits, Eigen::Index{1} << dropped_bits);
  const Eigen::Index n = v.size();
  for (Eigen::Index x = 0; x < n; ++x) {
    Word kept = 0, dropped = 0;
    int kp = 0, dp = 0;
    for (int b = 0; b < k; ++b) {
      const Word blk = get_field(static_cast<Word>(x), b * ell, ell);
      if (mask >> b & 1u) {
        kept |= blk << kp;
        kp += ell;
      } else {
        dropped |= blk << dp;
        dp += ell;
      }
    }
    m(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(dropped)) = v[x];
  }
  return m;
}

}  // namespace

double product_test_value(const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma, int k,
                          int ell) {
  if (k < 1 || ell < 1 || k * ell > 20) throw std::invalid_argument("shape out of range");
  const Eigen::Index dim = Eigen::Index{1} << (k * ell);
  if (rho.size() != dim || sigma.size() != dim)
    throw std::invalid_argument("state shape mismatch");
  double total = 0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const Eigen::MatrixXd r = reshape_blocks(rho, k, ell, mask);
    const Eigen::MatrixXd s = reshape_blocks(sigma, k, ell, mask);
    const Eigen::MatrixXd rho_s = r * r.transpose();
    const Eigen::MatrixXd sig_s = s * s.transpose();
    total += rho_s.cwiseProduct(sig_s).sum();
  }
  return total / static_cast<double>(1u << k);
}

verifier::StoqVerifier build_product_test(int k, int ell) {
  if (k < 1 || ell < 1 || 2 * k * ell + k + 2 > 40)
    throw std::invalid_argument("product test size cap exceeded");
  VerifierLayout inner;
  inner.k = 2;
  inner.ell = k * ell;
  inner.n0 = 0;
  inner.nplus = k;
  inner.output = 0;  // placeholder; wrapper sets the real output
  ReversibleCircuit gamma(inner.width());
  const int a_off = 0;
  const int b_off = k * ell;
  const int j_off = inner.plus_offset();
  for (int i = 0; i < k; ++i)
    for (int t = 0; t < ell; ++t)
      revsim::append_fredkin(gamma, j_off + i, a_off + i * ell + t, b_off + i * ell + t);
  ReversibleCircuit identity(inner.width());
  return verifier::build_branch_overlap_verifier(gamma, identity, inner);
}

double eta(const Eigen::VectorXd& rho, int k, int ell, int restarts, std::uint64_t seed) {
  const Eigen::Index dim = Eigen::Index{1} << (k * ell);
  if (rho.size() != dim) throw std::invalid_argument("state shape mismatch");
  if (k == 1) return 0.0;
  if (k == 2) {
    const Eigen::MatrixXd m = reshape_blocks(rho, 2, ell, 0b01u);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double s1 = svd.singularValues()[0];
    return std::max(0.0, 1.0 - s1 * s1);
  }
  // alternating maximization of <rho | phi_1 ... phi_k>
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Eigen::Index bd = Eigen::Index{1} << ell;
  double best = 0;
  for (int t = 0; t < restarts; ++t) {
    std::vector<Eigen::VectorXd> phi(static_cast<std::size_t>(k));
    for (auto& p : phi) {
      p = Eigen::VectorXd::NullaryExpr(bd, [&](Eigen::Index) { return gauss(rng); });
      p.normalize();
    }
    double ov = 0;
    for (int it = 0; it < 200; ++it) {
      for (int b = 0; b < k; ++b) {
        Eigen::VectorXd contracted = Eigen::VectorXd::Zero(bd);
        for (Eigen::Index x = 0; x < dim; ++x) {
          double w = rho[x];
          if (w == 0) continue;
          for (int b2 = 0; b2 < k; ++b2) {
            if (b2 == b) continue;
            w *= phi[static_cast<std::size_t>(b2)][static_cast<Eigen::Index>(
                get_field(static_cast<Word>(x), b2 * ell, ell))];
          }
          contracted[static_cast<Eigen::Index>(get_field(static_cast<Word>(x), b * ell, ell))] += w;
        }
        const double n = contracted.norm();
        if (n > 0) phi[static_cast<std::size_t>(b)] = contracted / n;
      }
      double cur = 0;
      for (Eigen::Index x = 0; x < dim; ++x) {
        double w = rho[x];
        for (int b2 = 0; b2 < k; ++b2)
          w *= phi[static_cast<std::size_t>(b2)][static_cast<Eigen::Index>(
              get_field(static_cast<Word>(x), b2 * ell, ell))];
        cur += w;
      }
      cur = std::abs(cur);
      if (cur <= ov + 1e-14) {
        ov = std::max(ov, cur);
        break;
      }
      ov = cur;
    }
    best = std::max(best, ov);
  }
  return std::max(0.0, 1.0 - best * best);
}

namespace {

// Dyadic cube decomposition of [0, num) over `bits` selector bits: list of
// (pattern over the high bits, number of high bits).
std::vector<std::pair<Word, int>> range_cubes(Word num, int bits) {
  std::vector<std::pair<Word, int>> cubes;
  for (int b = bits - 1; b >= 0; --b) {
    if (!get_bit(num, b)) continue;
    // high bits above b equal num's, bit b = 0
    const int plen = bits - b;
    const Word pat = (num >> b) & ~Word{1};  // num's bits [bits-1..b] with bit b cleared
    cubes.emplace_back(pat, plen);
  }
  return cubes;
}

std::vector<std::pair<Word, int>> complement_cubes(Word num, int bits) {
  std::vector<std::pair<Word, int>> cubes;
  for (int b = bits - 1; b >= 0; --b) {
    if (get_bit(num, b)) continue;
    const int plen = bits - b;
    const Word pat = (num >> b) | Word{1};
    cubes.emplace_back(pat, plen);
  }
  // the value num itself belongs to [num, 2^bits) and no cube above covers it
  if (num < (Word{1} << bits)) cubes.emplace_back(num, bits);
  return cubes;
}

// Maximal aligned dyadic blocks covering [lo, hi).
std::vector<std::pair<Word, int>> interval_cubes(Word lo, Word hi, int bits) {
  std::vector<std::pair<Word, int>> cubes;
  Word cur = lo;
  while (cur < hi) {
    int s = 0;
    while (s < bits && (cur & ((Word{1} << (s + 1)) - 1)) == 0 &&
           cur + (Word{1} << (s + 1)) <= hi)
      ++s;
    cubes.emplace_back(cur >> s, bits - s);
    cur += Word{1} << s;
  }
  return cubes;
}

// Controls over the HIGH plen bits of the selector for one cube.
std::pair<std::vector<int>, Word> cube_controls(const std::vector<int>& selector, Word pat,
                                                int plen) {
  const int bits = static_cast<int>(selector.size());
  std::vector<int> ctrls;
  Word pattern = 0;
  for (int i = 0; i < plen; ++i) {
    ctrls.push_back(selector[static_cast<std::size_t>(bits - 1 - i)]);
    if (get_bit(pat, plen - 1 - i)) pattern |= Word{1} << (static_cast<int>(ctrls.size()) - 1);
  }
  return {ctrls, pattern};
}

// Append `sub` controlled on the selector qubits matching each cube of the
// range. Cube patterns refer to the HIGH bits of the selector.
void append_range_controlled(ReversibleCircuit& c, const ReversibleCircuit& sub,
                             const std::vector<int>& selector,
                             const std::vector<std::pair<Word, int>>& cubes,
                             const std::vector<int>& anc) {
  for (const auto& [pat, plen] : cubes) {
    const auto [ctrls, pattern] = cube_controls(selector, pat, plen);
    revsim::append_controlled_on_pattern(c, sub, ctrls, pattern, anc);
  }
}

// Flip `target` exactly when the selector value lies in [lo, hi).
void append_interval_flip(ReversibleCircuit& c, const std::vector<int>& selector, Word lo,
                          Word hi, int target, const std::vector<int>& ladder) {
  const int bits = static_cast<int>(selector.size());
  for (const auto& [pat, plen] : interval_cubes(lo, hi, bits)) {
    const auto [ctrls, pattern] = cube_controls(selector, pat, plen);
    revsim::append_pattern_flip(c, ctrls, pattern, target, ladder);
  }
}

// Preimage of permutation index t under the balanced map is contiguous.
std::pair<Word, Word> balanced_preimage(std::uint64_t t, std::uint64_t K, std::uint64_t N) {
  const std::uint64_t a = N / K;
  const std::uint64_t r = N % K;
  if (t < r) return {t * (a + 1), (t + 1) * (a + 1)};
  const std::uint64_t lo = r * (a + 1) + (t - r) * a;
  return {lo, lo + a};
}

}  // namespace

CompressedVerifier build_prover_compression(const verifier::StoqVerifier& v,
                                            const verifier::Thresholds& th, int lambda_bits) {
  v.validate();
  if (!v.gate_level()) throw std::invalid_argument("compression needs a gate-level verifier");
  if (v.layout.k <= 2) throw std::invalid_argument("prover compression needs k > 2");
  const int k = v.layout.k;
  const int ell = v.layout.ell;
  CompressionParams params = CompressionParams::make(th.delta(), 1.0 / 3.0, lambda_bits);
  const int bits = params.lambda_dyadic.bits;
  const Word num = static_cast<Word>(params.lambda_dyadic.num);

  // Inner registers: A = proofs for V, B = product-test partner, then V's zero
  // ancillas, the MCX pool, V's plus ancillas, the k-qubit product-test branch
  // register, and the selector.
  VerifierLayout inner;
  inner.k = 2;
  inner.ell = k * ell;
  const int pool = std::max(3, bits + 1);
  inner.n0 = v.layout.n0 + pool;
  inner.nplus = v.layout.nplus + k + bits;
  inner.output = 0;

  const int a_off = 0;
  const int b_off = k * ell;
  const int vz_off = inner.zero_offset();
  const int pool_off = vz_off + v.layout.n0;
  const int vp_off = inner.plus_offset();
  const int j_off = vp_off + v.layout.nplus;
  const int sel_off = j_off + k;

  std::vector<int> pool_q(static_cast<std::size_t>(pool));
  std::iota(pool_q.begin(), pool_q.end(), pool_off);
  std::vector<int> selector(static_cast<std::size_t>(bits));
  std::iota(selector.begin(), selector.end(), sel_off);

  // Gamma_V on the A block.
  std::vector<int> vmap(static_cast<std::size_t>(v.layout.width()));
  for (int i = 0; i < k * ell; ++i) vmap[static_cast<std::size_t>(i)] = a_off + i;
  for (int i = 0; i < v.layout.n0; ++i)
    vmap[static_cast<std::size_t>(v.layout.zero_offset() + i)] = vz_off + i;
  for (int i = 0; i < v.layout.nplus; ++i)
    vmap[static_cast<std::size_t>(v.layout.plus_offset() + i)] = vp_off + i;
  StoqVerifier vr = v;
  const ReversibleCircuit gamma_v =
      revsim::remap(gamma_form(vr), vmap, inner.width());

  // Product-test permutation on (A, B) driven by the J register.
  ReversibleCircuit gamma_pt(inner.width());
  for (int i = 0; i < k; ++i)
    for (int t = 0; t < ell; ++t)
      revsim::append_fredkin(gamma_pt, j_off + i, a_off + i * ell + t, b_off + i * ell + t);

  ReversibleCircuit gamma_w(inner.width());
  append_range_controlled(gamma_w, gamma_v, selector, range_cubes(num, bits), pool_q);
  append_range_controlled(gamma_w, gamma_pt, selector, complement_cubes(num, bits), pool_q);

  ReversibleCircuit identity(inner.width());
  CompressedVerifier out{verifier::build_branch_overlap_verifier(gamma_w, identity, inner),
                         params};
  return out;
}

std::uint64_t balanced_map(std::uint64_t j, std::uint64_t K, std::uint64_t N) {
  if (K < 1 || N < K || j >= N) throw std::invalid_argument("balanced_map: range error");
  const std::uint64_t a = N / K;
  const std::uint64_t r = N % K;
  if (j < r * (a + 1)) return j / (a + 1);
  return r + (j - r * (a + 1)) / a;
}

std::vector<int> permutation_lex(int k, std::uint64_t t) {
  std::vector<int> avail(static_cast<std::size_t>(k));
  std::iota(avail.begin(), avail.end(), 0);
  std::vector<std::uint64_t> fact(static_cast<std::size_t>(k) + 1, 1);
  for (int i = 1; i <= k; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * static_cast<std::uint64_t>(i);
  if (t >= fact[static_cast<std::size_t>(k)]) throw std::invalid_argument("permutation index out of range");
  std::vector<int> out;
  for (int i = k - 1; i >= 0; --i) {
    const std::uint64_t f = fact[static_cast<std::size_t>(i)];
    const std::size_t idx = static_cast<std::size_t>(t / f);
    t %= f;
    out.push_back(avail[idx]);
    avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return out;
}

namespace {

std::vector<std::pair<int, int>> cycle_transpositions(const std::vector<int>& pi) {
  // Swap sequence moving block content j to pi[j].
  const int k = static_cast<int>(pi.size());
  std::vector<std::pair<int, int>> swaps;
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (int s = 0; s < k; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<int> cyc;
    int cur = s;
    while (!seen[static_cast<std::size_t>(cur)]) {
      seen[static_cast<std::size_t>(cur)] = true;
      cyc.push_back(cur);
      cur = pi[static_cast<std::size_t>(cur)];
    }
    for (int i = static_cast<int>(cyc.size()) - 2; i >= 0; --i)
      swaps.emplace_back(cyc[static_cast<std::size_t>(i)], cyc[static_cast<std::size_t>(i + 1)]);
  }
  return swaps;
}

}  // namespace

SymProjectorVerifier build_sym_projector(int k, int ell, int b) {
  const DyadicBranchPlan plan = DyadicBranchPlan::make(k, b);
  const int q = plan.q;

  VerifierLayout inner;
  inner.k = k;
  inner.ell = ell;
  const int ladder = std::max(0, q - 2);
  inner.n0 = 1 + ladder;  // indicator + MCX ladder
  inner.nplus = q;
  inner.output = 0;

  const int ind = inner.zero_offset();
  std::vector<int> ladder_q(static_cast<std::size_t>(ladder));
  std::iota(ladder_q.begin(), ladder_q.end(), ind + 1);
  const int j_off = inner.plus_offset();
  std::vector<int> j_q(static_cast<std::size_t>(q));
  std::iota(j_q.begin(), j_q.end(), j_off);

  ReversibleCircuit gamma(inner.width());
  for (std::uint64_t t = 0; t < plan.K; ++t) {
    const std::vector<int> pi = permutation_lex(k, t);
    const auto swaps = cycle_transpositions(pi);
    if (swaps.empty()) continue;  // identity permutation: branch acts trivially
    const auto [lo, hi] = balanced_preimage(t, plan.K, plan.N);
    append_interval_flip(gamma, j_q, lo, hi, ind, ladder_q);  // indicator <- [f_q(j) = t]
    for (const auto& [b1, b2] : swaps)
      for (int t2 = 0; t2 < ell; ++t2)
        revsim::append_fredkin(gamma, ind, b1 * ell + t2, b2 * ell + t2);
    append_interval_flip(gamma, j_q, lo, hi, ind, ladder_q);
  }

  ReversibleCircuit identity(inner.width());
  SymProjectorVerifier out{verifier::build_branch_overlap_verifier(gamma, identity, inner), plan};
  return out;
}

double symmetric_overlap(const Eigen::VectorXd& phi, int k, int ell) {
  const Eigen::Index dim = Eigen::Index{1} << (k * ell);
  if (phi.size() != dim) throw std::invalid_argument("state shape mismatch");
  std::uint64_t K = 1;
  for (int i = 2; i <= k; ++i) K *= static_cast<std::uint64_t>(i);
  double total = 0;
  for (std::uint64_t t = 0; t < K; ++t) {
    const std::vector<int> pi = permutation_lex(k, t);
    double ov = 0;
    for (Eigen::Index x = 0; x < dim; ++x) {
      if (phi[x] == 0) continue;
      Word y = 0;
      for (int bk = 0; bk < k; ++bk) {
        const Word blk = get_field(static_cast<Word>(x), bk * ell, ell);
        y = set_field(y, pi[static_cast<std::size_t>(bk)] * ell, ell, blk);
      }
      ov += phi[x] * phi[static_cast<Eigen::Index>(y)];
    }
    total += ov;
  }
  return total / static_cast<double>(K);
}

SymCloseness symmetric_closeness_bound(const Eigen::VectorXd& phi, int k, int ell, int restarts,
                                       std::uint64_t seed) {
  const Eigen::Index dim = Eigen::Index{1} << (k * ell);
  if (phi.size() != dim) throw std::invalid_argument("state shape mismatch");
  SymCloseness out;
  const double s_sym = symmetric_overlap(phi, k, ell);
  out.bound = 2.0 * std::sqrt(std::max(0.0, 1.0 - s_sym));

  // best tensor power: higher-order power iteration with restarts
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Eigen::Index bd = Eigen::Index{1} << ell;
  double best_ov = -1;
  Eigen::VectorXd best_psi = Eigen::VectorXd::Zero(bd);
  for (int t = 0; t < restarts; ++t) {
    Eigen::VectorXd psi = Eigen::VectorXd::NullaryExpr(bd, [&](Eigen::Index) { return gauss(rng); });
    psi.normalize();
    double ov = 0;
    for (int it = 0; it < 300; ++it) {
      Eigen::VectorXd contracted = Eigen::VectorXd::Zero(bd);
      for (Eigen::Index x = 0; x < dim; ++x) {
        if (phi[x] == 0) continue;
        for (int b = 0; b < k; ++b) {
          double w = phi[x];
          for (int b2 = 0; b2 < k; ++b2) {
            if (b2 == b) continue;
            w *= psi[static_cast<Eigen::Index>(get_field(static_cast<Word>(x), b2 * ell, ell))];
          }
          contracted[static_cast<Eigen::Index>(get_field(static_cast<Word>(x), b * ell, ell))] += w;
        }
      }
      const double n = contracted.norm();
      if (n == 0) break;
      psi = contracted / n;
      double cur = 0;
      for (Eigen::Index x = 0; x < dim; ++x) {
        double w = phi[x];
        for (int b = 0; b < k; ++b)
          w *= psi[static_cast<Eigen::Index>(get_field(static_cast<Word>(x), b * ell, ell))];
        cur += w;
      }
      cur = std::abs(cur);
      if (cur <= ov + 1e-14) {
        ov = std::max(ov, cur);
        break;
      }
      ov = cur;
    }
    if (ov > best_ov) {
      best_ov = ov;
      best_psi = psi;
    }
  }
  out.best_power = best_psi;
  out.achieved_distance = std::sqrt(std::max(0.0, 1.0 - best_ov * best_ov));
  return out;
}

MatchingResult perfect_matching(const std::vector<std::vector<int>>& adj, int n_right) {
  const int n_left = static_cast<int>(adj.size());
  MatchingResult res;
  res.match.assign(static_cast<std::size_t>(n_right), -1);
  std::vector<int> owner = res.match;
  std::vector<char> visited_right(static_cast<std::size_t>(n_right));
  std::function<bool(int)> try_augment = [&](int u) -> bool {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (v < 0 || v >= n_right) throw std::invalid_argument("adjacency index out of range");
      if (visited_right[static_cast<std::size_t>(v)]) continue;
      visited_right[static_cast<std::size_t>(v)] = 1;
      if (owner[static_cast<std::size_t>(v)] < 0 || try_augment(owner[static_cast<std::size_t>(v)])) {
        owner[static_cast<std::size_t>(v)] = u;
        return true;
      }
    }
    return false;
  };
  for (int u = 0; u < n_left; ++u) {
    std::fill(visited_right.begin(), visited_right.end(), 0);
    if (!try_augment(u)) {
      // Hall violator: u plus owners of rights visited in the failed search.
      res.exists = false;
      res.hall_violator.push_back(u);
      for (int v = 0; v < n_right; ++v)
        if (visited_right[static_cast<std::size_t>(v)] && owner[static_cast<std::size_t>(v)] >= 0)
          res.hall_violator.push_back(owner[static_cast<std::size_t>(v)]);
      std::sort(res.hall_violator.begin(), res.hall_violator.end());
      return res;
    }
  }
  res.exists = true;
  res.match = owner;
  return res;
}

namespace {

// Lexicographically first perfect matching of roles to copies: roles in
// order, each taking the smallest available copy that still leaves a
// perfect matching for the rest.
std::optional<std::vector<int>> lex_first_matching(const std::vector<std::vector<int>>& copy_labels,
                                                   int k) {
  // adjacency: left = copies, right = roles; edge iff the copy contains a slot
  // with that role label.
  std::vector<std::vector<int>> adj(copy_labels.size());
  for (std::size_t i = 0; i < copy_labels.size(); ++i) {
    std::vector<char> has(static_cast<std::size_t>(k), 0);
    for (int lab : copy_labels[i])
      if (lab >= 0 && lab < k) has[static_cast<std::size_t>(lab)] = 1;
    for (int a = 0; a < k; ++a)
      if (has[static_cast<std::size_t>(a)]) adj[i].push_back(a);
  }
  if (!perfect_matching(adj, k).exists) return std::nullopt;
  // greedy lexicographic assignment: role a gets the smallest copy such that
  // the remainder still has a perfect matching
  std::vector<int> assign(static_cast<std::size_t>(k), -1);
  std::vector<char> used(copy_labels.size(), 0);
  for (int a = 0; a < k; ++a) {
    for (std::size_t i = 0; i < copy_labels.size(); ++i) {
      if (used[i]) continue;
      bool edge = false;
      for (int lab : copy_labels[i]) edge |= (lab == a);
      if (!edge) continue;
      // tentative: do the remaining roles still match into unused copies?
      used[i] = 1;
      std::vector<int> rest_roles;
      for (int a2 = a + 1; a2 < k; ++a2) rest_roles.push_back(a2);
      std::vector<std::vector<int>> role_adj(rest_roles.size());
      int free_copies = 0;
      for (std::size_t i2 = 0; i2 < copy_labels.size(); ++i2) {
        if (used[i2]) continue;
        for (std::size_t ri = 0; ri < rest_roles.size(); ++ri) {
          bool e = false;
          for (int lab : copy_labels[i2]) e |= (lab == rest_roles[ri]);
          if (e) role_adj[ri].push_back(free_copies);
        }
        ++free_copies;
      }
      if (perfect_matching(role_adj, free_copies).exists) {
        assign[static_cast<std::size_t>(a)] = static_cast<int>(i);
        break;
      }
      used[i] = 0;
    }
    if (assign[static_cast<std::size_t>(a)] < 0) return std::nullopt;  // should not happen
  }
  return assign;
}

struct DummyPlan {
  int w = 0;        // dummy plus qubits
  Word flips = 0;   // patterns [0, flips) flip the flag
  double actual = 1.0;
};

DummyPlan plan_dummy(double target_acceptance) {
  // acceptance = 1 - flips / 2^{w+1}
  DummyPlan p;
  for (int w = 0; w <= 16; ++w) {
    const double flips = (1.0 - target_acceptance) * std::pow(2.0, w + 1);
    const double rounded = std::round(flips);
    if (std::abs(flips - rounded) < 1e-12 && rounded <= std::pow(2.0, w)) {
      p.w = w;
      p.flips = static_cast<Word>(rounded);
      p.actual = 1.0 - static_cast<double>(p.flips) / std::pow(2.0, w + 1);
      return p;
    }
  }
  p.w = 16;
  p.flips = static_cast<Word>(std::ceil((1.0 - target_acceptance) * std::pow(2.0, 17)));
  p.actual = 1.0 - static_cast<double>(p.flips) / std::pow(2.0, 17);
  return p;
}

}  // namespace

SymmetrizedVerifier build_length_efficient_symmetrization(const verifier::StoqVerifier& v,
                                                          const verifier::Thresholds& th) {
  v.validate();
  if (!v.gate_level()) throw std::invalid_argument("symmetrization needs a gate-level verifier");
  const int k = v.layout.k;
  const int ell = v.layout.ell;
  SymmetrizationPlan plan = SymmetrizationPlan::make(k, ell, th.c, th.delta());
  const DummyPlan dummy = plan_dummy(plan.dummy_acceptance);
  plan.dummy_acceptance = dummy.actual;

  const int slot_bits = plan.label_bits + ell;
  const int m = plan.r * slot_bits;

  VerifierLayout lay;
  lay.k = k;
  lay.ell = m;
  lay.n0 = v.layout.n0 + 1;  // flag after V's zeros
  lay.nplus = v.layout.nplus + dummy.w;
  lay.output = 0;

  const int vz_off = lay.zero_offset();
  const int flag = vz_off + v.layout.n0;
  const int vp_off = lay.plus_offset();
  const int dum_off = vp_off + v.layout.nplus;

  const ReversibleCircuit gamma_v = gamma_form(v);
  const int r_bundles = plan.r;
  const int label_bits = plan.label_bits;

  auto oracle = [=](Word x) -> Word {
    // decode the label table
    std::vector<std::vector<int>> copy_labels(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      for (int h = 0; h < r_bundles; ++h) {
        const int slot_off = i * m + h * slot_bits;
        copy_labels[static_cast<std::size_t>(i)].push_back(
            static_cast<int>(get_field(x, slot_off, label_bits)));
      }
    const auto assign = lex_first_matching(copy_labels, k);
    if (!assign) {
      // dummy branch: flip the flag on the first `flips` dummy patterns
      const Word u = get_field(x, dum_off, dummy.w);
      if (u < dummy.flips) x = flip_bit(x, flag);
      return x;
    }
    // route data registers into V's witness slots
    std::vector<int> data_off(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
      const int copy = (*assign)[static_cast<std::size_t>(a)];
      int h_first = -1;
      for (int h = 0; h < r_bundles; ++h) {
        if (copy_labels[static_cast<std::size_t>(copy)][static_cast<std::size_t>(h)] == a) {
          h_first = h;
          break;
        }
      }
      data_off[static_cast<std::size_t>(a)] = copy * m + h_first * slot_bits + label_bits;
    }
    Word xv = 0;
    for (int a = 0; a < k; ++a)
      xv = set_field(xv, a * ell, ell, get_field(x, data_off[static_cast<std::size_t>(a)], ell));
    xv = set_field(xv, v.layout.zero_offset(), v.layout.n0, get_field(x, vz_off, v.layout.n0));
    xv = set_field(xv, v.layout.plus_offset(), v.layout.nplus,
                   get_field(x, vp_off, v.layout.nplus));
    const Word yv = gamma_v.apply_word(xv);
    Word y = x;
    for (int a = 0; a < k; ++a)
      y = set_field(y, data_off[static_cast<std::size_t>(a)], ell, get_field(yv, a * ell, ell));
    y = set_field(y, vz_off, v.layout.n0, get_field(yv, v.layout.zero_offset(), v.layout.n0));
    y = set_field(y, vp_off, v.layout.nplus, get_field(yv, v.layout.plus_offset(), v.layout.nplus));
    return y;
  };

  SymmetrizedVerifier out{
      verifier::make_gamma_oracle_verifier(lay, oracle, "length-efficient-symmetrization"), plan};
  return out;
}

double symmetrization_direct_acceptance(const SymmetrizedVerifier& sv,
                                        const verifier::StoqVerifier& v,
                                        const std::vector<states::NonNegativeState>& data_states) {
  const int k = sv.plan.k;
  const int r = sv.plan.r;
  if (static_cast<int>(data_states.size()) != k)
    throw std::invalid_argument("need one data state per label");
  // witness acceptance per role-routing is V on (psi_1,...,psi_k); enumerate
  // label tables J in [k]^{k r}
  states::NonNegativeState routed = data_states[0];
  for (int a = 1; a < k; ++a) routed = states::tensor(routed, data_states[static_cast<std::size_t>(a)]);
  const double acc_v = verifier::acceptance_probability(v, routed);

  const std::uint64_t tables = [&] {
    std::uint64_t t = 1;
    for (int i = 0; i < k * r; ++i) t *= static_cast<std::uint64_t>(k);
    return t;
  }();
  double total = 0;
  std::vector<std::vector<int>> copy_labels(static_cast<std::size_t>(k),
                                            std::vector<int>(static_cast<std::size_t>(r)));
  for (std::uint64_t idx = 0; idx < tables; ++idx) {
    std::uint64_t rest = idx;
    for (int i = 0; i < k; ++i)
      for (int h = 0; h < r; ++h) {
        copy_labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)] =
            static_cast<int>(rest % static_cast<std::uint64_t>(k));
        rest /= static_cast<std::uint64_t>(k);
      }
    const bool match = lex_first_matching(copy_labels, k).has_value();
    total += match ? acc_v : sv.plan.dummy_acceptance;
  }
  return total / static_cast<double>(tables);
}

SymToStoqVerifier build_sym_to_stoq(const verifier::StoqVerifier& v,
                                    const verifier::Thresholds& th) {
  v.validate();
  if (!v.gate_level()) throw std::invalid_argument("needs a gate-level verifier");
  const int k = v.layout.k;
  const int ell = v.layout.ell;
  const double delta = th.delta();
  const int b = std::max(0, static_cast<int>(std::ceil(std::log2(16.0 / (delta * delta)))));
  const DyadicBranchPlan plan = DyadicBranchPlan::make(k, b);

  Dyadic lam = dyadic_floor(delta / 8.0, 16);
  if (lam.num == 0) lam.num = 1;
  while (lam.num % 2 == 0 && lam.bits > 0) {
    lam.num /= 2;
    --lam.bits;
  }
  const int bits = lam.bits;
  const Word num = static_cast<Word>(lam.num);

  const int q = plan.q;
  VerifierLayout inner;
  inner.k = k;
  inner.ell = ell;
  // two disjoint ancilla pools: one for the cube controls of the selector,
  // one for the projector's own branch indicator and MCX ladder
  const int cube_pool = 1 + std::max(bits - 2, 1);
  const int sym_pool = 1 + std::max(q - 2, 0);
  inner.n0 = v.layout.n0 + cube_pool + sym_pool;
  inner.nplus = v.layout.nplus + q + bits;
  inner.output = 0;

  const int vz_off = inner.zero_offset();
  const int cube_off = vz_off + v.layout.n0;
  const int sym_off = cube_off + cube_pool;
  const int vp_off = inner.plus_offset();
  const int j_off = vp_off + v.layout.nplus;
  const int sel_off = j_off + q;

  std::vector<int> pool_q(static_cast<std::size_t>(cube_pool));
  std::iota(pool_q.begin(), pool_q.end(), cube_off);
  std::vector<int> selector(static_cast<std::size_t>(bits));
  std::iota(selector.begin(), selector.end(), sel_off);

  // V's gamma on the shared witness block.
  std::vector<int> vmap(static_cast<std::size_t>(v.layout.width()));
  for (int i = 0; i < k * ell; ++i) vmap[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < v.layout.n0; ++i)
    vmap[static_cast<std::size_t>(v.layout.zero_offset() + i)] = vz_off + i;
  for (int i = 0; i < v.layout.nplus; ++i)
    vmap[static_cast<std::size_t>(v.layout.plus_offset() + i)] = vp_off + i;
  const ReversibleCircuit gamma_v = revsim::remap(gamma_form(v), vmap, inner.width());

  // the symmetric-projector permutation on the witness block with the J
  // register; indicator and ladder live in the pool
  ReversibleCircuit gamma_sym(inner.width());
  {
    const int ind = sym_off;
    std::vector<int> ladder(static_cast<std::size_t>(sym_pool - 1));
    std::iota(ladder.begin(), ladder.end(), sym_off + 1);
    std::vector<int> j_q(static_cast<std::size_t>(q));
    std::iota(j_q.begin(), j_q.end(), j_off);
    for (std::uint64_t t = 0; t < plan.K; ++t) {
      const std::vector<int> pi = permutation_lex(k, t);
      const auto swaps = cycle_transpositions(pi);
      if (swaps.empty()) continue;
      const auto [lo, hi] = balanced_preimage(t, plan.K, plan.N);
      append_interval_flip(gamma_sym, j_q, lo, hi, ind, ladder);
      for (const auto& [b1, b2] : swaps)
        for (int t2 = 0; t2 < ell; ++t2)
          revsim::append_fredkin(gamma_sym, ind, b1 * ell + t2, b2 * ell + t2);
      append_interval_flip(gamma_sym, j_q, lo, hi, ind, ladder);
    }
  }

  ReversibleCircuit gamma_w(inner.width());
  append_range_controlled(gamma_w, gamma_v, selector, range_cubes(num, bits), pool_q);
  append_range_controlled(gamma_w, gamma_sym, selector, complement_cubes(num, bits), pool_q);

  ReversibleCircuit identity(inner.width());
  SymToStoqVerifier out{verifier::build_branch_overlap_verifier(gamma_w, identity, inner), plan,
                        lam};
  return out;
}

verifier::StoqVerifier build_weak_conjunction(const std::vector<verifier::StoqVerifier>& vs) {
  if (vs.empty()) throw std::invalid_argument("conjunction of zero verifiers");
  const int k = vs[0].layout.k;
  int ell_sum = 0, n0_sum = 0, nplus_sum = 0;
  for (const auto& v : vs) {
    v.validate();
    if (!v.gate_level()) throw std::invalid_argument("needs gate-level verifiers");
    if (v.layout.k != k) throw std::invalid_argument("prover counts must agree");
    ell_sum += v.layout.ell;
    n0_sum += v.layout.n0;
    nplus_sum += v.layout.nplus;
  }
  const int r = static_cast<int>(vs.size());

  VerifierLayout lay;
  lay.k = k;
  lay.ell = ell_sum;
  lay.n0 = n0_sum;
  lay.nplus = nplus_sum + r + 1;  // references and the swap control
  const int ref_off = lay.plus_offset() + nplus_sum;
  const int ctrl = lay.plus_offset() + nplus_sum + r;
  lay.output = ctrl;

  ReversibleCircuit c(lay.width());
  int ell_used = 0, n0_used = 0, nplus_used = 0;
  std::vector<int> outputs;
  for (const auto& v : vs) {
    std::vector<int> map(static_cast<std::size_t>(v.layout.width()));
    for (int p = 0; p < k; ++p)
      for (int t = 0; t < v.layout.ell; ++t)
        map[static_cast<std::size_t>(p * v.layout.ell + t)] = p * ell_sum + ell_used + t;
    for (int i = 0; i < v.layout.n0; ++i)
      map[static_cast<std::size_t>(v.layout.zero_offset() + i)] = lay.zero_offset() + n0_used + i;
    for (int i = 0; i < v.layout.nplus; ++i)
      map[static_cast<std::size_t>(v.layout.plus_offset() + i)] = lay.plus_offset() + nplus_used + i;
    c.append(revsim::remap(v.circuit, map, lay.width()));
    outputs.push_back(map[static_cast<std::size_t>(v.layout.output)]);
    ell_used += v.layout.ell;
    n0_used += v.layout.n0;
    nplus_used += v.layout.nplus;
  }
  for (int j = 0; j < r; ++j) revsim::append_fredkin(c, ctrl, outputs[static_cast<std::size_t>(j)], ref_off + j);

  StoqVerifier out;
  out.layout = lay;
  out.circuit = std::move(c);
  out.validate();
  return out;
}

verifier::StoqVerifier build_strong_conjunction(const std::vector<verifier::StoqVerifier>& vs) {
  if (vs.empty()) throw std::invalid_argument("conjunction of zero verifiers");
  const int k = vs[0].layout.k;
  int ell_sum = 0, n0_sum = 0, nplus_sum = 0;
  bool any_ccx = false;
  for (const auto& v : vs) {
    v.validate();
    if (!v.gate_level()) throw std::invalid_argument("needs gate-level verifiers");
    if (v.layout.k != k) throw std::invalid_argument("prover counts must agree");
    ell_sum += v.layout.ell;
    n0_sum += v.layout.n0;
    nplus_sum += v.layout.nplus;
    any_ccx |= std::any_of(v.circuit.gates.begin(), v.circuit.gates.end(),
                           [](const Gate& g) { return g.kind == revsim::GateKind::CCX; });
  }
  const int n_anc = any_ccx ? 1 : 0;

  VerifierLayout lay;
  lay.k = k;
  lay.ell = ell_sum;
  lay.n0 = n0_sum + n_anc;
  lay.nplus = nplus_sum + 1;
  const int ctrl = lay.width() - 1;
  lay.output = ctrl;
  const std::optional<int> anc =
      n_anc ? std::optional<int>(lay.zero_offset() + n0_sum) : std::nullopt;

  ReversibleCircuit c(lay.width());
  int ell_used = 0, n0_used = 0, nplus_used = 0;
  for (const auto& v : vs) {
    std::vector<int> map(static_cast<std::size_t>(v.layout.width()));
    for (int p = 0; p < k; ++p)
      for (int t = 0; t < v.layout.ell; ++t)
        map[static_cast<std::size_t>(p * v.layout.ell + t)] = p * ell_sum + ell_used + t;
    for (int i = 0; i < v.layout.n0; ++i)
      map[static_cast<std::size_t>(v.layout.zero_offset() + i)] = lay.zero_offset() + n0_used + i;
    for (int i = 0; i < v.layout.nplus; ++i)
      map[static_cast<std::size_t>(v.layout.plus_offset() + i)] = lay.plus_offset() + nplus_used + i;
    StoqVerifier vv = v;
    const ReversibleCircuit gm = revsim::remap(gamma_form(vv), map, lay.width());
    c.append(revsim::controlled(gm, ctrl, anc));
    ell_used += v.layout.ell;
    n0_used += v.layout.n0;
    nplus_used += v.layout.nplus;
  }

  StoqVerifier out;
  out.layout = lay;
  out.circuit = std::move(c);
  out.validate();
  return out;
}

std::int64_t repetition_count(std::int64_t n, double b) {
  if (b < 0 || b >= 1) throw std::invalid_argument("b must lie in [0,1)");
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  if (n == 0) return 0;
  const double denom = std::log2(2.0 / (1.0 + b));
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / denom));
}

}  // namespace stoqlab::protocols
