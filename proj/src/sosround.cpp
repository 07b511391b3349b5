#include "stoqlab/sosround.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace stoqlab::sosround {

namespace {

double entropy_bits(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log2(x);
  return h;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

void MomentOracle::validate() const {
  if (d < 1 || t < 1) throw std::invalid_argument("oracle shape out of range");
  if (weights.size() != vectors.size() || weights.empty())
    throw std::invalid_argument("oracle needs matching weights and vectors");
  double s = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) throw std::invalid_argument("weights must be positive");
    s += weights[i];
    if (vectors[i].size() != d) throw std::invalid_argument("vector length mismatch");
    if (std::abs(vectors[i].norm() - 1.0) > 1e-12)
      throw std::invalid_argument("component vectors must be unit norm");
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
}

double MomentOracle::moment_sq(const std::vector<int>& idx) const {
  double out = 0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    double p = weights[m];
    for (int i : idx) p *= vectors[m][i] * vectors[m][i];
    out += p;
  }
  return out;
}

Eigen::VectorXd marginal(const MomentOracle& o) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(o.d);
  for (std::size_t m = 0; m < o.components(); ++m)
    p += o.weights[m] * o.vectors[m].cwiseAbs2();
  return p;
}

std::vector<double> joint_law(const MomentOracle& o, int t) {
  const std::uint64_t cells = ipow(static_cast<std::uint64_t>(o.d), t);
  if (cells > 1000000) throw std::invalid_argument("joint law cap exceeded");
  std::vector<double> joint(cells, 0.0);
  for (std::size_t m = 0; m < o.components(); ++m) {
    const Eigen::VectorXd sq = o.vectors[m].cwiseAbs2();
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
      double p = o.weights[m];
      std::uint64_t rest = cell;
      for (int r = 0; r < t; ++r) {
        p *= sq[static_cast<Eigen::Index>(rest % static_cast<std::uint64_t>(o.d))];
        rest /= static_cast<std::uint64_t>(o.d);
      }
      joint[cell] += p;
    }
  }
  return joint;
}

Eigen::VectorXd direct_round(const MomentOracle& o) {
  return marginal(o).cwiseSqrt();
}

double hellinger_joint_product(const MomentOracle& o, int t) {
  const std::vector<double> joint = joint_law(o, t);
  const Eigen::VectorXd marg = marginal(o);
  double bc = 0;  // Bhattacharyya coefficient
  for (std::uint64_t cell = 0; cell < joint.size(); ++cell) {
    double prod = 1;
    std::uint64_t rest = cell;
    for (int r = 0; r < t; ++r) {
      prod *= marg[static_cast<Eigen::Index>(rest % static_cast<std::uint64_t>(o.d))];
      rest /= static_cast<std::uint64_t>(o.d);
    }
    bc += std::sqrt(joint[cell] * prod);
  }
  return std::sqrt(std::max(0.0, 1.0 - bc));
}

MomentOracle condition(const MomentOracle& o, const std::vector<int>& indices) {
  for (int i : indices)
    if (i < 0 || i >= o.d) throw std::invalid_argument("pinned index out of range");
  MomentOracle out = o;
  double total = 0;
  for (std::size_t m = 0; m < o.components(); ++m) {
    double w = o.weights[m];
    for (int i : indices) w *= o.vectors[m][i] * o.vectors[m][i];
    out.weights[m] = w;
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("conditioning on zero-mass monomial");
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> vectors;
  for (std::size_t m = 0; m < o.components(); ++m) {
    if (out.weights[m] <= 0) continue;
    weights.push_back(out.weights[m] / total);
    vectors.push_back(o.vectors[m]);
  }
  out.weights = std::move(weights);
  out.vectors = std::move(vectors);
  out.validate();
  return out;
}

namespace {

// H(A_t | A_1..A_{t-1}) = H(joint over t) - H(joint over t-1), in bits.
double conditional_entropy(const MomentOracle& o, int t) {
  const double ht = entropy_bits(joint_law(o, t));
  if (t == 1) return ht;
  const double hprev = entropy_bits(joint_law(o, t - 1));
  return ht - hprev;
}

}  // namespace

EntropyDecrement entropy_decrement_check(const MomentOracle& o, int t, double epsilon) {
  o.validate();
  const double dh = hellinger_joint_product(o, t);
  if (dh <= epsilon)
    throw std::invalid_argument("premise violated: Hellinger distance is not above epsilon");
  EntropyDecrement out;
  const Eigen::VectorXd marg = marginal(o);
  std::vector<double> marg_v(marg.data(), marg.data() + marg.size());
  out.h_marginal = entropy_bits(marg_v);
  out.h_conditional = conditional_entropy(o, t);
  out.decrement = out.h_marginal - out.h_conditional;
  out.required = 2.0 * epsilon * epsilon / t;
  out.holds = out.decrement >= out.required - 1e-12;

  // locate the lexicographically least pinning achieving the decrement
  const std::uint64_t cells = ipow(static_cast<std::uint64_t>(o.d), t - 1);
  for (std::uint64_t cell = 0; cell < cells; ++cell) {
    std::vector<int> pin(static_cast<std::size_t>(t - 1));
    std::uint64_t rest = cell;
    // lexicographic order over tuples (i_1, i_2, ...): i_1 most significant
    for (int r = t - 2; r >= 0; --r) {
      pin[static_cast<std::size_t>(r)] = static_cast<int>(rest % static_cast<std::uint64_t>(o.d));
      rest /= static_cast<std::uint64_t>(o.d);
    }
    double mass = 1;
    {
      double w = 0;
      for (std::size_t m = 0; m < o.components(); ++m) {
        double p = o.weights[m];
        for (int i : pin) p *= o.vectors[m][i] * o.vectors[m][i];
        w += p;
      }
      mass = w;
    }
    if (mass <= 0) continue;
    const MomentOracle cond = condition(o, pin);
    const Eigen::VectorXd cm = marginal(cond);
    std::vector<double> cmv(cm.data(), cm.data() + cm.size());
    if (entropy_bits(cmv) <= out.h_marginal - out.required + 1e-12) {
      out.pinning = pin;
      break;
    }
  }
  return out;
}

double tensor_value(const Eigen::MatrixXd& m, const Eigen::VectorXd& x, int d, int t) {
  const std::uint64_t dim = ipow(static_cast<std::uint64_t>(d), t);
  if (m.rows() != static_cast<Eigen::Index>(dim) || m.cols() != static_cast<Eigen::Index>(dim))
    throw std::invalid_argument("matrix shape mismatch");
  if (x.size() != d) throw std::invalid_argument("vector shape mismatch");
  Eigen::VectorXd xt(static_cast<Eigen::Index>(dim));
  for (std::uint64_t cell = 0; cell < dim; ++cell) {
    double p = 1;
    std::uint64_t rest = cell;
    for (int r = 0; r < t; ++r) {
      p *= x[static_cast<Eigen::Index>(rest % static_cast<std::uint64_t>(d))];
      rest /= static_cast<std::uint64_t>(d);
    }
    xt[static_cast<Eigen::Index>(cell)] = p;
  }
  return xt.dot(m * xt);
}

double oracle_value(const MomentOracle& o, const Eigen::MatrixXd& m) {
  double v = 0;
  for (std::size_t c = 0; c < o.components(); ++c)
    v += o.weights[c] * tensor_value(m, o.vectors[c], o.d, o.t);
  return v;
}

RoundingResult bks_round_loop(const Eigen::MatrixXd& m_in, const MomentOracle& oracle,
                              double epsilon) {
  oracle.validate();
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  Eigen::MatrixXd m = m_in;
  if (m.minCoeff() < 0) throw std::invalid_argument("matrix must be entrywise non-negative");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double nrm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (nrm > 1.0) m /= nrm;
  }
  const int t = oracle.t;
  const double delta = epsilon / (2.0 * std::numbers::sqrt2);
  const int rounds_cap =
      static_cast<int>(std::ceil(t * std::log2(static_cast<double>(oracle.d)) /
                                 (2.0 * delta * delta))) + 1;

  RoundingResult out;
  MomentOracle cur = oracle;
  for (int round = 0; round <= rounds_cap; ++round) {
    const double dh = hellinger_joint_product(cur, t);
    if (dh <= delta) break;
    const EntropyDecrement dec = entropy_decrement_check(cur, t, delta);
    if (dec.pinning.empty()) break;  // cannot happen when the premise holds
    cur = condition(cur, dec.pinning);
    RoundingTraceEntry e;
    e.pinning = dec.pinning;
    e.hellinger = dh;
    const Eigen::VectorXd cm = marginal(cur);
    std::vector<double> cmv(cm.data(), cm.data() + cm.size());
    e.entropy = entropy_bits(cmv);
    out.trace.push_back(e);
  }
  out.x = direct_round(cur);
  out.value = tensor_value(m, out.x, oracle.d, t);
  out.final_oracle_value = oracle_value(cur, m);
  return out;
}

double kl_joint_product(const MomentOracle& o, int t) {
  const std::vector<double> joint = joint_law(o, t);
  const Eigen::VectorXd marg = marginal(o);
  double kl = 0;
  for (std::uint64_t cell = 0; cell < joint.size(); ++cell) {
    if (joint[cell] <= 0) continue;
    double prod = 1;
    std::uint64_t rest = cell;
    for (int r = 0; r < t; ++r) {
      prod *= marg[static_cast<Eigen::Index>(rest % static_cast<std::uint64_t>(o.d))];
      rest /= static_cast<std::uint64_t>(o.d);
    }
    kl += joint[cell] * std::log2(joint[cell] / prod);
  }
  return kl;
}

double chain_rule_mutual_information(const MomentOracle& o, int t) {
  // sum_j I(A_j; A_1..A_{j-1}) = sum_j [H(A) + H(A_1..A_{j-1}) - H(A_1..A_j)]
  const Eigen::VectorXd marg = marginal(o);
  std::vector<double> mv(marg.data(), marg.data() + marg.size());
  const double ha = entropy_bits(mv);
  double total = 0;
  double h_prev = 0;  // H of the empty tuple
  for (int j = 1; j <= t; ++j) {
    const double h_cur = entropy_bits(joint_law(o, j));
    total += ha + h_prev - h_cur;
    h_prev = h_cur;
  }
  return total;
}

nlohmann::json oracle_to_json(const MomentOracle& o) {
  nlohmann::json j;
  j["d"] = o.d;
  j["t"] = o.t;
  j["components"] = nlohmann::json::array();
  for (std::size_t m = 0; m < o.components(); ++m) {
    nlohmann::json cj;
    cj["w"] = o.weights[m];
    std::vector<double> v(o.vectors[m].data(), o.vectors[m].data() + o.vectors[m].size());
    cj["v"] = v;
    j["components"].push_back(cj);
  }
  return j;
}

MomentOracle oracle_from_json(const nlohmann::json& j) {
  MomentOracle o;
  o.d = j.at("d").get<int>();
  o.t = j.at("t").get<int>();
  for (const auto& cj : j.at("components")) {
    o.weights.push_back(cj.at("w").get<double>());
    const std::vector<double> v = cj.at("v").get<std::vector<double>>();
    Eigen::VectorXd ev(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) ev[static_cast<Eigen::Index>(i)] = v[i];
    o.vectors.push_back(ev);
  }
  o.validate();
  return o;
}

}  // namespace stoqlab::sosround
