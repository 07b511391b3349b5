#include "stoqlab/rectclosure.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace stoqlab::rectclosure {

void SepRcdInstance::validate() const {
  if (ell < 1 || ell > 10 || m0 < 0 || r < 0 || r > 10)
    throw std::invalid_argument("instance shape out of range");
  gamma.validate();
  if (gamma.width != width()) throw std::invalid_argument("circuit width mismatch");
}

int round_bound(int ell, double gamma_sound) {
  if (gamma_sound <= 0 || gamma_sound >= 1) throw std::invalid_argument("gamma must be in (0,1)");
  return static_cast<int>(
      std::ceil((2.0 * ell * std::numbers::ln2 + 1.0) / std::log1p(gamma_sound)));
}

double log2_tau_closed_form(int ell, int t) {
  return -(static_cast<double>(ell) + 4.0) * std::ldexp(1.0, t) + 4.0;
}

double completeness_log_eps(int ell, int r, int L) {
  return 5.0 - static_cast<double>(r) - std::ldexp(static_cast<double>(ell) + 4.0, L + 1);
}

RectClosureParams RectClosureParams::make(int ell, int r, double gamma_sound) {
  RectClosureParams p;
  p.gamma_sound = gamma_sound;
  p.L = round_bound(ell, gamma_sound);
  p.log2_tau.resize(static_cast<std::size_t>(p.L) + 1);
  p.log2_tau[0] = -static_cast<double>(ell);
  for (int t = 0; t < p.L; ++t)
    p.log2_tau[static_cast<std::size_t>(t) + 1] = 2.0 * p.log2_tau[static_cast<std::size_t>(t)] - 4.0;
  p.log2_eps = completeness_log_eps(ell, r, p.L);
  return p;
}

Transition transition(const SepRcdInstance& inst, Word a, Word b, Word u) {
  const int ell = inst.ell;
  const Word x = a | (b << ell) | (u << (2 * ell + inst.m0));
  const Word y = inst.gamma.apply_word(x);
  const Word z = get_field(y, 2 * ell, inst.m0);
  if (z != 0) return BadTransition{z};
  return GoodTransition{get_field(y, 0, ell), get_field(y, ell, ell),
                        get_field(y, 2 * ell + inst.m0, inst.r)};
}

bool is_closed_rectangle(const SepRcdInstance& inst, const std::set<Word>& s,
                         const std::set<Word>& t) {
  if (s.empty() || t.empty()) throw std::invalid_argument("rectangle must be non-empty");
  for (Word a : s)
    for (Word b : t)
      for (Word u = 0; u < (Word{1} << inst.r); ++u) {
        const Transition tr = transition(inst, a, b, u);
        if (std::holds_alternative<BadTransition>(tr)) return false;
        const auto& g = std::get<GoodTransition>(tr);
        if (!s.count(g.a_out) || !t.count(g.b_out)) return false;
      }
  return true;
}

RoundOutcome closure_round(const SepRcdInstance& inst, const std::set<Word>& s,
                           const std::set<Word>& t) {
  if (s.empty() || t.empty()) throw std::invalid_argument("rectangle must be non-empty");
  RoundOutcome out;
  out.s_next = s;
  out.t_next = t;
  for (Word a : s)
    for (Word b : t)
      for (Word u = 0; u < (Word{1} << inst.r); ++u) {
        const Transition tr = transition(inst, a, b, u);
        if (std::holds_alternative<BadTransition>(tr)) {
          out.bad = true;
          return out;
        }
        const auto& g = std::get<GoodTransition>(tr);
        out.s_next.insert(g.a_out);
        out.t_next.insert(g.b_out);
      }
  return out;
}

namespace {

SeedLog run_seed(const SepRcdInstance& inst, Word a0, Word b0, int rounds) {
  SeedLog log;
  log.a0 = a0;
  log.b0 = b0;
  std::set<Word> s{a0}, t{b0};
  log.rect_sizes.push_back(1);
  for (int round = 0; round < rounds; ++round) {
    const RoundOutcome out = closure_round(inst, s, t);
    if (out.bad) {
      log.survived = false;
      return log;
    }
    s = out.s_next;
    t = out.t_next;
    log.rect_sizes.push_back(s.size() * t.size());
    ++log.rounds_completed;
  }
  log.survived = true;
  return log;
}

}  // namespace

RectClosureVerdict rect_closure_test(const SepRcdInstance& inst, double gamma_sound,
                                     int max_rounds, bool parallel_seeds, int workers) {
  inst.validate();
  RectClosureVerdict verdict;
  verdict.params = RectClosureParams::make(inst.ell, inst.r, gamma_sound);
  const int rounds = max_rounds >= 0 ? max_rounds : verdict.params.L;
  const Word n_side = Word{1} << inst.ell;
  const Word n_seeds = n_side * n_side;

  if (!parallel_seeds) {
    for (Word seed = 0; seed < n_seeds; ++seed) {
      const SeedLog log = run_seed(inst, seed % n_side, seed / n_side, rounds);
      verdict.seed_logs.push_back(log);
      if (log.survived) {
        verdict.accept = true;
        verdict.accepting_seed = log;
        return verdict;
      }
    }
    return verdict;
  }

  const int n_workers =
      workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  std::vector<SeedLog> logs(static_cast<std::size_t>(n_seeds));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      for (Word seed = static_cast<Word>(w); seed < n_seeds; seed += static_cast<Word>(n_workers))
        logs[static_cast<std::size_t>(seed)] = run_seed(inst, seed % n_side, seed / n_side, rounds);
    });
  }
  for (auto& th : pool) th.join();
  verdict.seed_logs = std::move(logs);
  for (const SeedLog& log : verdict.seed_logs)
    if (log.survived) {
      // lexicographically least surviving seed, so the parallel and serial
      // verdicts agree
      verdict.accept = true;
      verdict.accepting_seed = log;
      break;
    }
  return verdict;
}

RectClosureVerdict rect_closure_test_recursive(const SepRcdInstance& inst, double gamma_sound,
                                               int max_rounds) {
  inst.validate();
  if (inst.ell > 3) throw std::invalid_argument("recursive implementation: ell cap exceeded");
  RectClosureVerdict verdict;
  verdict.params = RectClosureParams::make(inst.ell, inst.r, gamma_sound);
  const int rounds = max_rounds >= 0 ? max_rounds : verdict.params.L;
  if (rounds > 6) throw std::invalid_argument("recursive implementation: round cap exceeded");
  const Word n_side = Word{1} << inst.ell;

  for (Word b0 = 0; b0 < n_side; ++b0)
    for (Word a0 = 0; a0 < n_side; ++a0) {
      // membership predicates, evaluated depth first with no tables
      std::function<bool(int, Word)> chi_s;
      std::function<bool(int, Word)> chi_t;
      chi_s = [&](int t, Word a) -> bool {
        if (t == 0) return a == a0;
        if (chi_s(t - 1, a)) return true;
        for (Word a2 = 0; a2 < n_side; ++a2) {
          if (!chi_s(t - 1, a2)) continue;
          for (Word b2 = 0; b2 < n_side; ++b2) {
            if (!chi_t(t - 1, b2)) continue;
            for (Word u = 0; u < (Word{1} << inst.r); ++u) {
              const Transition tr = transition(inst, a2, b2, u);
              if (const auto* g = std::get_if<GoodTransition>(&tr))
                if (g->a_out == a) return true;
            }
          }
        }
        return false;
      };
      chi_t = [&](int t, Word b) -> bool {
        if (t == 0) return b == b0;
        if (chi_t(t - 1, b)) return true;
        for (Word a2 = 0; a2 < n_side; ++a2) {
          if (!chi_s(t - 1, a2)) continue;
          for (Word b2 = 0; b2 < n_side; ++b2) {
            if (!chi_t(t - 1, b2)) continue;
            for (Word u = 0; u < (Word{1} << inst.r); ++u) {
              const Transition tr = transition(inst, a2, b2, u);
              if (const auto* g = std::get_if<GoodTransition>(&tr))
                if (g->b_out == b) return true;
            }
          }
        }
        return false;
      };
      auto bad_round = [&](int t) -> bool {
        for (Word a = 0; a < n_side; ++a) {
          if (!chi_s(t, a)) continue;
          for (Word b = 0; b < n_side; ++b) {
            if (!chi_t(t, b)) continue;
            for (Word u = 0; u < (Word{1} << inst.r); ++u)
              if (std::holds_alternative<BadTransition>(transition(inst, a, b, u))) return true;
          }
        }
        return false;
      };

      SeedLog log;
      log.a0 = a0;
      log.b0 = b0;
      log.survived = true;
      for (int t = 0; t < rounds; ++t) {
        if (bad_round(t)) {
          log.survived = false;
          break;
        }
        ++log.rounds_completed;
      }
      verdict.seed_logs.push_back(log);
      if (log.survived) {
        verdict.accept = true;
        verdict.accepting_seed = log;
        return verdict;
      }
    }
  return verdict;
}

nlohmann::json instance_to_json(const SepRcdInstance& inst) {
  nlohmann::json j = revsim::to_json(inst.gamma);
  j["ell"] = inst.ell;
  j["m0"] = inst.m0;
  j["r"] = inst.r;
  return j;
}

SepRcdInstance instance_from_json(const nlohmann::json& j) {
  SepRcdInstance inst;
  inst.gamma = revsim::circuit_from_json(j);
  inst.ell = j.at("ell").get<int>();
  inst.m0 = j.at("m0").get<int>();
  inst.r = j.at("r").get<int>();
  inst.validate();
  return inst;
}

nlohmann::json verdict_to_json(const RectClosureVerdict& v) {
  nlohmann::json j;
  j["accept"] = v.accept;
  j["L"] = v.params.L;
  j["gamma"] = v.params.gamma_sound;
  j["log2_eps"] = v.params.log2_eps;
  if (v.accepting_seed) {
    j["accepting_seed"] = {{"a0", v.accepting_seed->a0}, {"b0", v.accepting_seed->b0}};
  }
  j["seeds"] = nlohmann::json::array();
  for (const auto& log : v.seed_logs) {
    nlohmann::json sj;
    sj["a0"] = log.a0;
    sj["b0"] = log.b0;
    sj["rounds_completed"] = log.rounds_completed;
    sj["survived"] = log.survived;
    sj["rect_sizes"] = log.rect_sizes;
    j["seeds"].push_back(sj);
  }
  return j;
}

SepRcdInstance build_pointwise_fixed_instance(int ell, int m0, int r, int n_gates,
                                              std::mt19937_64& rng) {
  if (m0 < 1) throw std::invalid_argument("needs at least one zero ancilla");
  SepRcdInstance inst;
  inst.ell = ell;
  inst.m0 = m0;
  inst.r = r;
  inst.gamma = revsim::ReversibleCircuit(inst.width());
  const int zoff = 2 * ell;
  std::uniform_int_distribution<int> any_q(0, inst.width() - 1);
  std::uniform_int_distribution<int> z_q(zoff, zoff + m0 - 1);
  std::uniform_int_distribution<int> kind(0, 1);
  for (int i = 0; i < n_gates; ++i) {
    // every gate carries a positive control on a zero ancilla, so the
    // initialized sector over the full rectangle stays pointwise fixed
    const int zc = z_q(rng);
    if (kind(rng) == 0) {
      int t = any_q(rng);
      while (t == zc) t = any_q(rng);
      inst.gamma.append(revsim::Gate::cnot(zc, t));
    } else {
      int c2 = any_q(rng);
      while (c2 == zc) c2 = any_q(rng);
      int t = any_q(rng);
      while (t == zc || t == c2) t = any_q(rng);
      inst.gamma.append(revsim::Gate::ccx(zc, c2, t));
    }
  }
  inst.validate();
  return inst;
}

SepRcdInstance build_random_instance(int ell, int m0, int r, int n_gates, std::mt19937_64& rng) {
  SepRcdInstance inst;
  inst.ell = ell;
  inst.m0 = m0;
  inst.r = r;
  inst.gamma = revsim::ReversibleCircuit(inst.width());
  std::uniform_int_distribution<int> any_q(0, inst.width() - 1);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < n_gates; ++i) {
    const int kk = kind(rng);
    if (kk == 0) {
      inst.gamma.append(revsim::Gate::x(any_q(rng)));
    } else if (kk == 1) {
      int c = any_q(rng), t = any_q(rng);
      while (t == c) t = any_q(rng);
      inst.gamma.append(revsim::Gate::cnot(c, t));
    } else {
      int c1 = any_q(rng), c2 = any_q(rng), t = any_q(rng);
      while (c2 == c1) c2 = any_q(rng);
      while (t == c1 || t == c2) t = any_q(rng);
      inst.gamma.append(revsim::Gate::ccx(c1, c2, t));
    }
  }
  inst.validate();
  return inst;
}

Eigen::MatrixXd effective_overlap_matrix(const SepRcdInstance& inst) {
  inst.validate();
  const int side = 1 << inst.ell;
  const int dim = side * side;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const double w = std::ldexp(1.0, -inst.r);
  for (Word a = 0; a < static_cast<Word>(side); ++a)
    for (Word b = 0; b < static_cast<Word>(side); ++b)
      for (Word u = 0; u < (Word{1} << inst.r); ++u) {
        const Transition tr = transition(inst, a, b, u);
        if (const auto* g = std::get_if<GoodTransition>(&tr)) {
          const int col = static_cast<int>(a | (b << inst.ell));
          const int row = static_cast<int>(g->a_out | (g->b_out << inst.ell));
          m(row, col) += w;
        }
      }
  // the quadratic form only sees the symmetric part
  return (m + m.transpose()) / 2.0;
}

}  // namespace stoqlab::rectclosure
