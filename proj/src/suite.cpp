#include "stoqlab/suite.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "stoqlab/cleancc.hpp"
#include "stoqlab/npcert.hpp"
#include "stoqlab/protocols.hpp"
#include "stoqlab/rectclosure.hpp"
#include "stoqlab/sepval.hpp"
#include "stoqlab/sosround.hpp"
#include "stoqlab/states.hpp"
#include "stoqlab/verifier.hpp"

namespace stoqlab::suite {

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

states::ExactState random_subset_witness(int width, std::mt19937_64& rng) {
  std::uniform_int_distribution<Word> pick(0, (Word{1} << width) - 1);
  std::uniform_int_distribution<int> size_dist(1, 1 << std::min(width, 4));
  std::set<Word> sup;
  const int target = size_dist(rng);
  while (static_cast<int>(sup.size()) < target) sup.insert(pick(rng));
  return states::ExactState::subset(width, sup);
}

states::NonNegativeState random_nonneg_state(int width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  states::NonNegativeState s;
  s.width = width;
  double norm2 = 0;
  for (Word x = 0; x < (Word{1} << width); ++x) {
    const double a = uni(rng);
    s.amp[x] = a;
    norm2 += a * a;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& [x, a] : s.amp) a *= inv;
  return s;
}

Eigen::VectorXd random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return gauss(rng); });
  v.normalize();
  return v;
}

revsim::ReversibleCircuit random_circuit(int width, int n_gates, std::mt19937_64& rng) {
  revsim::ReversibleCircuit c(width);
  std::uniform_int_distribution<int> q(0, width - 1);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < n_gates; ++i) {
    const int kk = kind(rng);
    if (kk == 0 || width < 2) {
      c.append(revsim::Gate::x(q(rng)));
    } else if (kk == 1 || width < 3) {
      int a = q(rng), b = q(rng);
      while (b == a) b = q(rng);
      c.append(revsim::Gate::cnot(a, b));
    } else {
      int a = q(rng), b = q(rng), t = q(rng);
      while (b == a) b = q(rng);
      while (t == a || t == b) t = q(rng);
      c.append(revsim::Gate::ccx(a, b, t));
    }
  }
  return c;
}

// ---------------------------------------------------------------- criterion 1
Check criterion_multiplicativity(std::uint64_t seed) {
  Check c;
  const sepval::PartitionedMatrix m = sepval::remark_counterexample();
  const sepval::HsepResult bf = sepval::hsep_bruteforce(m, 64);
  c.require(std::abs(bf.value - 0.5) <= 1e-6, "remark hsep != 0.5 (" + fmt(bf.value) + ")");
  const sepval::HsepResult alt = sepval::hsep_alternating(m, 20, 60, seed);
  c.require(std::abs(alt.value - 0.5) <= 1e-6,
            "alternating hsep != 0.5 (" + fmt(alt.value) + ")");

  // hsep(M (x) M) >= 0.5 - 1e-6 > 0.25; seed the bell pair explicitly
  const sepval::PartitionedMatrix big = sepval::tensor_blockwise(m, m);
  std::vector<std::vector<Eigen::VectorXd>> seeds;
  {
    Eigen::VectorXd bell(4);
    bell << 1.0 / std::numbers::sqrt2, 0, 0, 1.0 / std::numbers::sqrt2;
    seeds.push_back({bell, bell});
  }
  const sepval::HsepResult hb = sepval::hsep_alternating(big, 20, 60, seed + 1, seeds);
  c.require(hb.value >= 0.5 - 1e-6, "hsep(MxM) below 0.5 (" + fmt(hb.value) + ")");
  c.require(hb.value > 0.25, "hsep(MxM) not above hsep(M)^2");

  std::mt19937_64 rng(seed + 2);
  for (int i = 0; i < 50 && c.ok; ++i) {
    const auto a = sepval::random_nonneg_psd({2, 2}, rng);
    const auto b = sepval::random_nonneg_psd({2, 2}, rng);
    const auto rep = sepval::check_multiplicativity(a, b, 1e-4, seed + 100 + static_cast<std::uint64_t>(i));
    c.require(std::abs(rep.lhs - rep.rhs) <= 1e-4,
              "PSD pair " + std::to_string(i) + " gap " + fmt(rep.lhs - rep.rhs));
  }
  for (int i = 0; i < 50 && c.ok; ++i) {
    const auto a = sepval::random_product_form({2, 2}, rng);
    const auto b = sepval::random_product_form({2, 2}, rng);
    const auto rep = sepval::check_multiplicativity(a, b, 1e-4, seed + 200 + static_cast<std::uint64_t>(i));
    c.require(std::abs(rep.lhs - rep.rhs) <= 1e-4,
              "product pair " + std::to_string(i) + " gap " + fmt(rep.lhs - rep.rhs));
  }
  c.note("remark=" + fmt(bf.value) + " tensor=" + fmt(hb.value));
  return c;
}

// ---------------------------------------------------------------- criterion 2
Check criterion_branch_overlap(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ell_d(1, 3), n0_d(1, 2), np_d(1, 2);
  for (int i = 0; i < 50; ++i) {
    verifier::VerifierLayout lay;
    lay.k = 1;
    lay.ell = ell_d(rng);
    lay.n0 = n0_d(rng);
    lay.nplus = np_d(rng);
    std::uniform_int_distribution<int> out_d(0, lay.width() - 1);
    lay.output = out_d(rng);
    verifier::StoqVerifier v;
    v.layout = lay;
    v.circuit = random_circuit(lay.width(), 20, rng);
    const states::ExactState w = random_subset_witness(lay.witness_qubits(), rng);

    const Rat direct = verifier::acceptance_probability_exact(v, w);
    const verifier::StoqVerifier wrapped = verifier::build_branch_overlap_verifier(
        verifier::gamma_form(v), revsim::ReversibleCircuit(lay.width()), lay);
    const Rat via_wrap = verifier::acceptance_probability_exact(wrapped, w);
    if (direct != via_wrap) {
      c.require(false, "verifier " + std::to_string(i) + ": " + rat_str(direct) +
                           " != " + rat_str(via_wrap));
      break;
    }
  }
  c.note("50 verifiers, exact rational equality");
  return c;
}

// ---------------------------------------------------------------- criterion 3
Check criterion_product_test(std::uint64_t seed) {
  Check c;
  const verifier::StoqVerifier pt = protocols::build_product_test(2, 1);
  std::mt19937_64 rng(seed);

  // circuit acceptance equals 1/2 + P_prod/2 on a grid of pure inputs
  std::vector<states::NonNegativeState> grid;
  for (int i = 0; i < 12; ++i) grid.push_back(random_nonneg_state(2, rng));
  for (Word x = 0; x < 4; ++x) grid.push_back(states::NonNegativeState::basis(2, x));
  grid.push_back(states::NonNegativeState::subset(2, {0, 3}));
  grid.push_back(states::NonNegativeState::subset(2, {1, 2}));
  for (std::size_t i = 0; i < grid.size() && c.ok; ++i)
    for (std::size_t j = 0; j < grid.size() && c.ok; ++j) {
      const states::NonNegativeState witness = states::tensor(grid[i], grid[j]);
      const double acc = verifier::acceptance_probability(pt, witness);
      const double pp = protocols::product_test_value(states::dense_vector(grid[i]),
                                                      states::dense_vector(grid[j]), 2, 1);
      c.require(std::abs(acc - (0.5 + 0.5 * pp)) <= 1e-12,
                "grid (" + std::to_string(i) + "," + std::to_string(j) + ") mismatch " +
                    fmt(acc - (0.5 + 0.5 * pp)));
    }

  // Bell input: exactly 7/8 in rational arithmetic
  const states::ExactState bell = states::ExactState::subset(2, {0, 3});
  const states::ExactState witness = states::tensor(bell, bell);
  const Rat acc = verifier::acceptance_probability_exact(pt, witness);
  c.require(acc == Rat(7, 8), "bell acceptance " + rat_str(acc) + " != 7/8");

  // P_prod(rho, rho) <= 1 - eta/3 on 100 random states
  for (int i = 0; i < 100 && c.ok; ++i) {
    const Eigen::VectorXd rho = random_unit(4, rng);
    const double pp = protocols::product_test_value(rho, rho, 2, 1);
    const double e = protocols::eta(rho, 2, 1);
    c.require(pp <= 1.0 - e / 3.0 + 1e-12,
              "state " + std::to_string(i) + ": P=" + fmt(pp) + " eta=" + fmt(e));
  }
  return c;
}

// ---------------------------------------------------------------- criterion 4
Check criterion_sym_projector(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed);
  for (int k : {2, 3})
    for (int b : {0, 1, 2}) {
      const int ell = k == 2 ? 2 : 1;
      const protocols::SymProjectorVerifier sp = protocols::build_sym_projector(k, ell, b);

      // tensor powers accepted with probability exactly 1
      for (int rep = 0; rep < 3; ++rep) {
        const states::ExactState psi = random_subset_witness(ell, rng);
        states::ExactState power = psi;
        for (int i = 1; i < k; ++i) power = states::tensor(power, psi);
        const Rat acc = verifier::acceptance_probability_exact(sp.v, power);
        c.require(acc == 1, "tensor power not accepted exactly (k=" + std::to_string(k) +
                                ",b=" + std::to_string(b) + "): " + rat_str(acc));
      }

      // deviation bound zeta on 100 random non-negative inputs
      const double zeta = to_double(sp.plan.zeta);
      double worst = 0;
      for (int rep = 0; rep < 100; ++rep) {
        const states::NonNegativeState phi = random_nonneg_state(k * ell, rng);
        const double acc = verifier::acceptance_probability(sp.v, phi);
        const double ideal =
            0.5 + 0.5 * protocols::symmetric_overlap(states::dense_vector(phi), k, ell);
        worst = std::max(worst, std::abs(acc - ideal));
      }
      c.require(worst <= zeta + 1e-12, "deviation " + fmt(worst) + " above zeta " + fmt(zeta) +
                                           " (k=" + std::to_string(k) + ",b=" +
                                           std::to_string(b) + ")");
      if (k == 3 && b == 0) c.note("k=3,b=0 worst dev " + fmt(worst) + " <= " + fmt(zeta));
    }
  return c;
}

// ---------------------------------------------------------------- criterion 5
Check criterion_protocol5(std::uint64_t) {
  Check c;
  for (int n : {2, 3, 4}) {
    const npcert::GapCGInstance g = npcert::cycle_equality_instance(n, 2);
    const std::vector<int> labeling(static_cast<std::size_t>(n), 0);
    const npcert::BranchDistribution honest = npcert::BranchDistribution::honest(g, labeling);
    const Rat rej = npcert::protocol5_rejection(g, honest);
    c.require(rej == Rat(1, 2 * n),
              "honest rejection at n=" + std::to_string(n) + " is " + rat_str(rej));
  }
  const npcert::GapCGInstance tri = npcert::triangle_disequality_instance();
  const npcert::MinimizeResult min = npcert::minimize_protocol5_rejection(tri);
  const double floor = 1.0 / 6.0;
  c.require(min.certified, "triangle minimization not certified");
  c.require(min.value >= floor + 0.01 / 3.0,
            "triangle minimum " + fmt(min.value) + " not above 1/(2n) + 0.01/n");
  c.note("triangle min " + fmt(min.value) + " vs floor " + fmt(floor));
  return c;
}

// ---------------------------------------------------------------- criterion 6
Check criterion_protocol4(std::uint64_t seed) {
  Check c;
  const int n = 400;
  const double calibrated_c = 20.0;
  const double delta = 0.5;
  const int K = static_cast<int>(std::ceil(calibrated_c * std::sqrt(static_cast<double>(n))));
  const std::uint64_t trials = 10000;

  const npcert::GapCGInstance g = npcert::cycle_equality_instance(n, 2);
  const std::vector<int> labeling(static_cast<std::size_t>(n), 0);
  const npcert::BranchDistribution honest = npcert::BranchDistribution::honest(g, labeling);
  const npcert::AcceptanceEstimate est_honest =
      npcert::protocol4_acceptance(g, honest, K, delta, trials, seed);
  c.require(est_honest.value >= 0.9 && est_honest.ci_low >= 0.9,
            "honest acceptance " + fmt(est_honest.value) + " (ci_low " +
                fmt(est_honest.ci_low) + ")");

  // vertex marginal concentrated on n/2 vertices: TV = 1/2 from uniform
  npcert::BranchDistribution far;
  far.n_vertices = n;
  far.alphabet = 2;
  far.p.assign(static_cast<std::size_t>(2 * n), Rat(0));
  for (int v = 0; v < n / 2; ++v) far.p[static_cast<std::size_t>(v * 2)] = rat(2, n);
  const npcert::AcceptanceEstimate est_far =
      npcert::protocol4_acceptance(g, far, K, delta, trials, seed + 1);
  c.require(est_far.value <= 0.1 && est_far.ci_high <= 0.1,
            "far acceptance " + fmt(est_far.value) + " (ci_high " + fmt(est_far.ci_high) + ")");
  c.note("honest " + fmt(est_honest.value) + ", far " + fmt(est_far.value) + ", K=" +
         std::to_string(K));
  return c;
}

// ---------------------------------------------------------------- criterion 7
Check criterion_birthday(std::uint64_t seed) {
  Check c;
  const int n = 365, K = 23;
  const double exact = npcert::birthday_exact_uniform(n, K);
  std::vector<double> mu(static_cast<std::size_t>(n), 1.0 / n);
  std::vector<bool> omega0(static_cast<std::size_t>(n), true);
  const npcert::BirthdayResult r = npcert::birthday_mc(
      mu, [](int a, int b) { return a == b; }, omega0, K, 100000, seed);
  c.require(std::abs(r.estimate - exact) <= 0.01,
            "estimate " + fmt(r.estimate) + " vs exact " + fmt(exact));
  c.note("estimate " + fmt(r.estimate) + " exact " + fmt(exact));
  return c;
}

// ---------------------------------------------------------------- criterion 8
Check criterion_rect_closure(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed);
  const double gamma = 0.5;

  // perfectly agreeing instances accept at ell in {1,2,3}
  for (int ell : {1, 2, 3}) {
    const rectclosure::SepRcdInstance inst =
        rectclosure::build_pointwise_fixed_instance(ell, 2, 2, 30, rng);
    const rectclosure::RectClosureVerdict v = rectclosure::rect_closure_test(inst, gamma);
    c.require(v.accept, "pointwise-fixed instance at ell=" + std::to_string(ell) + " rejected");
  }

  // certified no instances at ell=2: lambda_max certificate for hsep <= 1-gamma
  int no_found = 0;
  int growth_ok = 0;
  for (int attempt = 0; attempt < 400 && no_found < 5; ++attempt) {
    const rectclosure::SepRcdInstance inst =
        rectclosure::build_random_instance(2, 2, 2, 25, rng);
    const Eigen::MatrixXd m = rectclosure::effective_overlap_matrix(inst);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() > 1.0 - gamma) continue;
    ++no_found;
    const rectclosure::RectClosureVerdict v = rectclosure::rect_closure_test(inst, gamma);
    c.require(!v.accept, "certified no instance accepted");
    bool all_growth = true;
    for (const auto& log : v.seed_logs) {
      c.require(log.rounds_completed < v.params.L, "no instance survived to round L");
      for (std::size_t t = 0; t + 1 < log.rect_sizes.size(); ++t)
        all_growth &= static_cast<double>(log.rect_sizes[t + 1]) >=
                      (1.0 + gamma) * static_cast<double>(log.rect_sizes[t]);
    }
    if (all_growth) ++growth_ok;
  }
  c.require(no_found == 5, "only " + std::to_string(no_found) + " certified no instances found");
  c.require(growth_ok == no_found, "per-round growth violated");

  // recursive and table implementations agree on 20 random ell=2 instances
  int agreements = 0;
  for (int i = 0; i < 20; ++i) {
    const rectclosure::SepRcdInstance inst =
        rectclosure::build_random_instance(2, 1, 1, i % 3 == 0 ? 4 : 12, rng);
    const int budget = 3;  // formula L is out of reach for the memoless recursion
    const auto tv = rectclosure::rect_closure_test(inst, gamma, budget);
    const auto rv = rectclosure::rect_closure_test_recursive(inst, gamma, budget);
    if (tv.accept == rv.accept) ++agreements;
  }
  c.require(agreements == 20, "implementations disagree on " + std::to_string(20 - agreements) +
                                  " instances");

  // parameter formulas
  c.require(rectclosure::round_bound(2, 0.5) == 10, "L(ell=2,gamma=0.5) != 10");
  c.require(rectclosure::completeness_log_eps(1, 0, 1) == -15.0, "log2 eps(1,0,1) != -15");
  for (int ell : {1, 2, 3})
    for (int L = 1; L <= 20; ++L) {
      double lt = -static_cast<double>(ell);
      for (int t = 0; t < L; ++t) lt = 2 * lt - 4;
      c.require(std::abs(lt - rectclosure::log2_tau_closed_form(ell, L)) < 1e-9,
                "tau closed form mismatch");
    }
  return c;
}

// ---------------------------------------------------------------- criterion 9
Check criterion_cleancc(std::uint64_t) {
  Check c;
  // yes instance: unmarked path component 0-1, marked isolated vertices
  {
    const cleancc::CleanCcInstance inst =
        cleancc::make_instance(2, 2, {{0, 1}}, {0, 0, 1, 1});
    const Rat acc = cleancc::acceptance_exact_subset(inst, {0, 1});
    c.require(acc == 1, "clean-component witness acceptance " + rat_str(acc));
    const cleancc::MaxAcceptance mx = cleancc::max_acceptance(inst);
    c.require(std::abs(mx.value - 1.0) <= 1e-10, "max acceptance " + fmt(mx.value));
  }

  // K2 with one marked endpoint
  {
    const cleancc::CleanCcInstance inst = cleancc::make_instance(1, 1, {{0, 1}}, {0, 1});
    const cleancc::MaxAcceptance mx = cleancc::max_acceptance(inst);
    const double expected = 0.5 + 0.5 * (1.0 + std::sqrt(5.0)) / 4.0;
    c.require(std::abs(mx.value - expected) <= 1e-10,
              "K2 value " + fmt(mx.value) + " vs " + fmt(expected));
  }

  // exhaustive no instances at n <= 3, dG <= 2: every connected shape with
  // max degree <= dG is a path or cycle; check every marking with >= 1 mark
  for (int n = 1; n <= 3; ++n) {
    const int nv = 1 << n;
    for (int dG = 1; dG <= 2; ++dG) {
      const double bound = cleancc::soundness_bound(n, dG);
      // paths P_m (m >= 1) and cycles C_m (m >= 3, dG = 2 only)
      for (int m = 1; m <= nv; ++m) {
        std::vector<std::vector<std::pair<int, int>>> shapes;
        if (m == 1 || dG >= (m == 2 ? 1 : 2)) {
          std::vector<std::pair<int, int>> path;
          for (int i = 0; i + 1 < m; ++i) path.emplace_back(i, i + 1);
          shapes.push_back(path);
        }
        if (m >= 3 && dG >= 2) {
          std::vector<std::pair<int, int>> cyc;
          for (int i = 0; i + 1 < m; ++i) cyc.emplace_back(i, i + 1);
          cyc.emplace_back(0, m - 1);
          shapes.push_back(cyc);
        }
        for (const auto& shape : shapes) {
          for (unsigned marking = 1; marking < (1u << m); ++marking) {
            std::vector<int> marked(static_cast<std::size_t>(nv), 1);
            for (int i = 0; i < m; ++i) marked[static_cast<std::size_t>(i)] = (marking >> i) & 1u;
            const cleancc::CleanCcInstance inst = cleancc::make_instance(n, dG, shape, marked);
            const cleancc::MaxAcceptance mx = cleancc::max_acceptance(inst);
            if (mx.value > bound + 1e-12) {
              c.require(false, "no instance above bound: n=" + std::to_string(n) + " dG=" +
                                   std::to_string(dG) + " m=" + std::to_string(m) + " value " +
                                   fmt(mx.value) + " bound " + fmt(bound));
              return c;
            }
          }
        }
      }
    }
  }

  // formula agrees with the branch-overlap simulation exactly at n <= 3
  for (int n = 1; n <= 3; ++n) {
    const int nv = 1 << n;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < nv; i += 2) edges.emplace_back(i, i + 1);
    std::vector<int> marked(static_cast<std::size_t>(nv), 0);
    marked[0] = 1;
    const cleancc::CleanCcInstance inst = cleancc::make_instance(n, 2, edges, marked);
    const cleancc::GammaMap gm = cleancc::build_gamma(inst);
    const int q = gm.q;
    verifier::VerifierLayout lay;
    lay.k = 1;
    lay.ell = n;
    lay.n0 = 1;
    lay.nplus = q;
    lay.output = 0;
    auto oracle = [gm, q, n](Word x) -> Word {
      const Word v = get_field(x, 0, n);
      const Word cbit = get_field(x, n, 1);
      const Word j = get_field(x, n + 1, q);
      const Word g = gm.apply(j | (v << q) | (cbit << (q + n)));
      return get_field(g, q, n) | (get_field(g, q + n, 1) << n) |
             (get_field(g, 0, q) << (n + 1));
    };
    const verifier::StoqVerifier v =
        verifier::make_gamma_oracle_verifier(lay, oracle, "cleancc");
    for (int subset = 1; subset < (1 << std::min(nv, 4)); ++subset) {
      std::vector<int> support;
      std::set<Word> sup;
      for (int i = 0; i < nv && i < 4; ++i)
        if (subset >> i & 1) {
          support.push_back(i);
          sup.insert(static_cast<Word>(i));
        }
      const Rat formula = cleancc::acceptance_exact_subset(inst, support);
      const Rat sim = verifier::acceptance_probability_exact(
          v, states::ExactState::subset(n, sup));
      if (formula != sim) {
        c.require(false, "formula vs simulation mismatch at n=" + std::to_string(n) + ": " +
                             rat_str(formula) + " vs " + rat_str(sim));
        return c;
      }
    }
  }
  return c;
}

// --------------------------------------------------------------- criterion 10
Check criterion_bks(std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed);

  // direct-rounding guarantee on 100 random (oracle, M) pairs
  for (int i = 0; i < 100 && c.ok; ++i) {
    sosround::MomentOracle o;
    o.d = 2 + static_cast<int>(rng() % 3);
    o.t = 2 + static_cast<int>(rng() % 2);
    const int comps = 2 + static_cast<int>(rng() % 3);
    std::vector<double> w(static_cast<std::size_t>(comps));
    double tot = 0;
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    for (auto& x : w) {
      x = uni(rng);
      tot += x;
    }
    for (auto& x : w) x /= tot;
    o.weights = w;
    for (int m = 0; m < comps; ++m) o.vectors.push_back(random_unit(o.d, rng));
    o.validate();

    const std::uint64_t dim = [&] {
      std::uint64_t r = 1;
      for (int j = 0; j < o.t; ++j) r *= static_cast<std::uint64_t>(o.d);
      return r;
    }();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    std::uniform_real_distribution<double> mu(0.0, 1.0);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index cc2 = 0; cc2 <= r; ++cc2) {
        m(r, cc2) = mu(rng);
        m(cc2, r) = m(r, cc2);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    m /= es.eigenvalues().cwiseAbs().maxCoeff();

    const double dh = sosround::hellinger_joint_product(o, o.t);
    const Eigen::VectorXd x = sosround::direct_round(o);
    const double mx = sosround::tensor_value(m, x, o.d, o.t);
    const double ev = sosround::oracle_value(o, m);
    c.require(mx >= ev - 2.0 * std::numbers::sqrt2 * dh - 1e-9,
              "direct rounding failed at trial " + std::to_string(i) + ": M(x*)=" + fmt(mx) +
                  " E[M]=" + fmt(ev) + " dH=" + fmt(dh));
  }

  // entropy decrement on correlated mixtures, t in {2,3}, d <= 4
  for (int t : {2, 3})
    for (int d : {2, 3, 4}) {
      sosround::MomentOracle o;
      o.d = d;
      o.t = t;
      for (int i = 0; i < d; ++i) {
        o.weights.push_back(1.0 / d);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e[i] = 1.0;
        o.vectors.push_back(e);
      }
      o.validate();
      const double dh = sosround::hellinger_joint_product(o, t);
      const double eps = 0.9 * dh;
      const sosround::EntropyDecrement dec = sosround::entropy_decrement_check(o, t, eps);
      c.require(dec.holds, "entropy decrement fails at t=" + std::to_string(t) + ",d=" +
                               std::to_string(d) + " (decrement " + fmt(dec.decrement) +
                               " required " + fmt(dec.required) + ")");
      c.require(!dec.pinning.empty(), "no pinning tuple located");
    }

  // chain rule identity at t <= 3, d <= 4
  for (int trial = 0; trial < 20 && c.ok; ++trial) {
    sosround::MomentOracle o;
    o.d = 2 + static_cast<int>(rng() % 3);
    o.t = 2 + static_cast<int>(rng() % 2);
    const int comps = 2 + static_cast<int>(rng() % 3);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    double tot = 0;
    std::vector<double> w(static_cast<std::size_t>(comps));
    for (auto& x : w) {
      x = uni(rng);
      tot += x;
    }
    for (auto& x : w) x /= tot;
    o.weights = w;
    for (int m = 0; m < comps; ++m) o.vectors.push_back(random_unit(o.d, rng));
    o.validate();
    const double lhs = sosround::kl_joint_product(o, o.t);
    const double rhs = sosround::chain_rule_mutual_information(o, o.t);
    c.require(std::abs(lhs - rhs) <= 1e-10,
              "chain rule mismatch " + fmt(lhs) + " vs " + fmt(rhs));
  }

  // worked example: half e1 + half e2
  {
    sosround::MomentOracle o;
    o.d = 2;
    o.t = 2;
    o.weights = {0.5, 0.5};
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2), e2 = Eigen::VectorXd::Zero(2);
    e1[0] = 1;
    e2[1] = 1;
    o.vectors = {e1, e2};
    const double dh = sosround::hellinger_joint_product(o, 2);
    c.require(std::abs(dh * dh - (1.0 - 1.0 / std::numbers::sqrt2)) <= 1e-12,
              "worked example Hellinger^2 " + fmt(dh * dh));
    const sosround::EntropyDecrement dec = sosround::entropy_decrement_check(o, 2, 0.54);
    c.require(std::abs(dec.decrement - 1.0) <= 1e-12,
              "worked example decrement " + fmt(dec.decrement));
  }
  return c;
}

// --------------------------------------------------------------- criterion 11
Check criterion_conjunctions(std::uint64_t) {
  Check c;

  // toy verifiers with rational acceptance probabilities
  verifier::StoqVerifier v_one;  // p = 1: empty circuit, output a plus ancilla
  v_one.layout = {1, 1, 0, 1, 1};
  v_one.circuit = revsim::ReversibleCircuit(2);

  verifier::StoqVerifier v_half;  // p = 1/2: output a zero ancilla
  v_half.layout = {1, 1, 1, 0, 1};
  v_half.circuit = revsim::ReversibleCircuit(2);

  verifier::StoqVerifier v_34;  // p = 3/4 on every witness
  {
    verifier::VerifierLayout lay{1, 1, 1, 1, 0};
    revsim::ReversibleCircuit r1(lay.width());
    r1.append(revsim::Gate::cnot(lay.plus_offset(), lay.zero_offset()));
    v_34 = verifier::build_branch_overlap_verifier(revsim::ReversibleCircuit(lay.width()), r1,
                                                   lay);
  }

  const states::ExactState w1 = states::ExactState::basis(1, 0);
  auto rational_acc = [&](const verifier::StoqVerifier& v) {
    return verifier::acceptance_probability_exact(v, w1);
  };
  c.require(rational_acc(v_one) == 1, "toy p=1 verifier");
  c.require(rational_acc(v_half) == Rat(1, 2), "toy p=1/2 verifier");
  c.require(rational_acc(v_34) == Rat(3, 4), "toy p=3/4 verifier");

  auto product_witness = [&](const std::vector<verifier::StoqVerifier>& vs) {
    states::ExactState w = states::ExactState::basis(vs[0].layout.ell, 0);
    for (std::size_t i = 1; i < vs.size(); ++i)
      w = states::tensor(w, states::ExactState::basis(vs[i].layout.ell, 0));
    return w;
  };

  {
    const std::vector<verifier::StoqVerifier> vs{v_one, v_half};
    const verifier::StoqVerifier weak = protocols::build_weak_conjunction(vs);
    const Rat acc = verifier::acceptance_probability_exact(weak, product_witness(vs));
    const Rat expected = Rat(1, 2) + Rat(1, 2) * Rat(1) * Rat(1, 2);
    c.require(acc == expected, "weak (1, 1/2): " + rat_str(acc) + " != " + rat_str(expected));
  }
  {
    const std::vector<verifier::StoqVerifier> vs{v_34, v_34};
    const verifier::StoqVerifier weak = protocols::build_weak_conjunction(vs);
    const Rat acc = verifier::acceptance_probability_exact(weak, product_witness(vs));
    const Rat expected = Rat(1, 2) + Rat(1, 2) * Rat(3, 4) * Rat(3, 4);
    c.require(acc == expected, "weak (3/4)^2: " + rat_str(acc) + " != " + rat_str(expected));
  }
  {
    const std::vector<verifier::StoqVerifier> vs{v_one, v_half};
    const verifier::StoqVerifier strong = protocols::build_strong_conjunction(vs);
    const Rat acc = verifier::acceptance_probability_exact(strong, product_witness(vs));
    const Rat expected = Rat(1, 2) + Rat(1, 2) * Rat(1) * Rat(0);
    c.require(acc == expected, "strong (1, 1/2): " + rat_str(acc) + " != " + rat_str(expected));
  }
  {
    const std::vector<verifier::StoqVerifier> vs{v_34, v_34};
    const verifier::StoqVerifier strong = protocols::build_strong_conjunction(vs);
    const Rat acc = verifier::acceptance_probability_exact(strong, product_witness(vs));
    const Rat expected = Rat(1, 2) + Rat(1, 2) * Rat(1, 2) * Rat(1, 2);
    c.require(acc == expected, "strong (3/4)^2: " + rat_str(acc) + " != " + rat_str(expected));
  }
  {
    // single verifier: strong conjunction coincides with the gamma-form value
    const std::vector<verifier::StoqVerifier> vs{v_34};
    const verifier::StoqVerifier strong = protocols::build_strong_conjunction(vs);
    const Rat acc = verifier::acceptance_probability_exact(strong, product_witness(vs));
    c.require(acc == Rat(3, 4), "strong single: " + rat_str(acc));
  }
  return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(const SuiteConfig& cfg, std::ostream& out) {
  struct Entry {
    int id;
    const char* name;
    std::function<Check(std::uint64_t)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "multiplicativity-counterexample", criterion_multiplicativity},
      {2, "branch-overlap-gamma-form", criterion_branch_overlap},
      {3, "product-test", criterion_product_test},
      {4, "dyadic-symmetric-projector", criterion_sym_projector},
      {5, "protocol5-exact-values", criterion_protocol5},
      {6, "protocol4-statistical", criterion_protocol4},
      {7, "birthday-paradox", criterion_birthday},
      {8, "rectangular-closure", criterion_rect_closure},
      {9, "cleancc", criterion_cleancc},
      {10, "bks-rounding", criterion_bks},
      {11, "conjunction-laws", criterion_conjunctions},
  };

  std::vector<CriterionResult> results;
  for (const Entry& e : entries) {
    if (!cfg.only.empty() && std::string(e.name).find(cfg.only) == std::string::npos) continue;
    const auto start = Clock::now();
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    try {
      const Check c = e.fn(cfg.seed + static_cast<std::uint64_t>(e.id) * 1000);
      r.pass = c.ok;
      r.detail = c.detail.str();
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << "  ("
        << fmt(r.seconds) << " s)";
    if (!r.detail.empty()) out << "  -- " << r.detail;
    out << "\n";
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace stoqlab::suite
