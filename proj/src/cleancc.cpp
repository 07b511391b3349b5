#include "stoqlab/cleancc.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace stoqlab::cleancc {

void CleanCcInstance::validate() const {
  if (n < 0 || n > 12) throw std::invalid_argument("vertex-bit count out of range");
  if (dG < 1) throw std::invalid_argument("degree bound must be positive");
  const int nv = n_vertices();
  if (static_cast<int>(neighbor.size()) != nv || static_cast<int>(marked.size()) != nv)
    throw std::invalid_argument("table sizes must match 2^n");
  for (int v = 0; v < nv; ++v) {
    if (static_cast<int>(neighbor[static_cast<std::size_t>(v)].size()) != dG)
      throw std::invalid_argument("neighbor list must have dG slots");
    if (marked[static_cast<std::size_t>(v)] != 0 && marked[static_cast<std::size_t>(v)] != 1)
      throw std::invalid_argument("marking must be 0/1");
    std::vector<int> seen;
    for (int j = 0; j < dG; ++j) {
      const int u = neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
      if (u < 0 || u >= nv) throw std::invalid_argument("neighbor out of range");
      if (u == v) continue;  // self-loop padding
      for (int s : seen)
        if (s == u) throw std::invalid_argument("neighbor appears more than once");
      seen.push_back(u);
    }
  }
  // symmetry: u in nbrs(v)  <=>  v in nbrs(u)
  for (int v = 0; v < nv; ++v)
    for (int j = 0; j < dG; ++j) {
      const int u = neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
      if (u == v) continue;
      bool back = false;
      for (int j2 = 0; j2 < dG; ++j2)
        back |= neighbor[static_cast<std::size_t>(u)][static_cast<std::size_t>(j2)] == v;
      if (!back) throw std::invalid_argument("neighbor relation is not symmetric");
    }
}

std::vector<std::pair<int, int>> CleanCcInstance::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < n_vertices(); ++v)
    for (int j = 0; j < dG; ++j) {
      const int u = neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
      if (u > v) edges.emplace_back(v, u);
    }
  return edges;
}

std::vector<std::vector<int>> CleanCcInstance::components() const {
  const int nv = n_vertices();
  std::vector<int> comp(static_cast<std::size_t>(nv), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < nv; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    std::vector<int> cur;
    comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      cur.push_back(v);
      for (int j = 0; j < dG; ++j) {
        const int u = neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
        if (comp[static_cast<std::size_t>(u)] < 0) {
          comp[static_cast<std::size_t>(u)] = comp[static_cast<std::size_t>(s)];
          stack.push_back(u);
        }
      }
    }
    out.push_back(std::move(cur));
  }
  return out;
}

void CleanCcWitness::validate() const {
  double s = 0;
  for (double a : alpha) {
    if (a < 0) throw std::invalid_argument("witness amplitudes must be non-negative");
    s += a * a;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("witness is not normalized");
}

int return_index(const CleanCcInstance& inst, int v, int j) {
  if (j < 0 || j >= inst.dG) throw std::invalid_argument("slot index out of range");
  const int u = inst.neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
  if (u == v) return j;  // padded self-loop
  int found = -1;
  for (int j2 = 0; j2 < inst.dG; ++j2)
    if (inst.neighbor[static_cast<std::size_t>(u)][static_cast<std::size_t>(j2)] == v) {
      if (found >= 0) throw std::invalid_argument("return index is not unique");
      found = j2;
    }
  if (found < 0) throw std::invalid_argument("missing return edge");
  return found;
}

GammaMap build_gamma(const CleanCcInstance& inst) {
  inst.validate();
  GammaMap g;
  g.q = inst.q();
  g.n = inst.n;
  const int q = g.q;
  const int n = g.n;
  g.apply = [inst, q, n](Word x) -> Word {
    const int j = static_cast<int>(get_field(x, 0, q));
    const int v = static_cast<int>(get_field(x, q, n));
    const int c = static_cast<int>(get_field(x, q + n, 1));
    if (j < inst.dG) {
      const int u = inst.neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
      const int jr = return_index(inst, v, j);
      Word y = static_cast<Word>(jr);
      y |= static_cast<Word>(u) << q;
      y |= static_cast<Word>(c) << (q + n);
      return y;
    }
    if (j == inst.dG) {
      const int c2 = c ^ inst.marked[static_cast<std::size_t>(v)];
      Word y = static_cast<Word>(j);
      y |= static_cast<Word>(v) << q;
      y |= static_cast<Word>(c2) << (q + n);
      return y;
    }
    return x;
  };
  return g;
}

double acceptance(const CleanCcInstance& inst, const CleanCcWitness& w) {
  inst.validate();
  w.validate();
  if (static_cast<int>(w.alpha.size()) != inst.n_vertices())
    throw std::invalid_argument("witness size mismatch");
  double loss = 0;
  for (const auto& [u, v] : inst.edge_list()) {
    const double d = w.alpha[static_cast<std::size_t>(u)] - w.alpha[static_cast<std::size_t>(v)];
    loss += d * d;
  }
  for (int v = 0; v < inst.n_vertices(); ++v)
    if (inst.marked[static_cast<std::size_t>(v)])
      loss += w.alpha[static_cast<std::size_t>(v)] * w.alpha[static_cast<std::size_t>(v)];
  return 1.0 - loss / (2.0 * inst.J());
}

Rat acceptance_exact_subset(const CleanCcInstance& inst, const std::vector<int>& support) {
  inst.validate();
  if (support.empty()) throw std::invalid_argument("empty support");
  std::vector<char> in(static_cast<std::size_t>(inst.n_vertices()), 0);
  for (int v : support) in[static_cast<std::size_t>(v)] = 1;
  const Rat a2 = Rat(1, static_cast<long>(support.size()));  // alpha^2 on the support
  Rat loss(0);
  for (const auto& [u, v] : inst.edge_list()) {
    // (alpha_u - alpha_v)^2 is a2 when exactly one endpoint is inside
    const int cnt = in[static_cast<std::size_t>(u)] + in[static_cast<std::size_t>(v)];
    if (cnt == 1) loss += a2;
  }
  for (int v = 0; v < inst.n_vertices(); ++v)
    if (inst.marked[static_cast<std::size_t>(v)] && in[static_cast<std::size_t>(v)]) loss += a2;
  return Rat(1) - loss / (2 * inst.J());
}

MaxAcceptance max_acceptance(const CleanCcInstance& inst) {
  inst.validate();
  const int nv = inst.n_vertices();
  if (nv > (1 << 12)) throw std::invalid_argument("vertex cap exceeded");
  const double J = inst.J();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nv, nv);
  for (int v = 0; v < nv; ++v) {
    for (int j = 0; j < inst.dG; ++j) {
      const int u = inst.neighbor[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
      q(u, v) += 1.0;  // includes self-loop padding on the diagonal
    }
    if (!inst.marked[static_cast<std::size_t>(v)]) q(v, v) += 1.0;
    q(v, v) += J - inst.dG - 1;
  }
  q /= J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  const Eigen::Index top = es.eigenvalues().size() - 1;
  MaxAcceptance out;
  out.value = 0.5 + 0.5 * es.eigenvalues()[top];
  Eigen::VectorXd vec = es.eigenvectors().col(top);
  if (vec.sum() < 0) vec = -vec;
  for (Eigen::Index i = 0; i < vec.size(); ++i) vec[i] = std::max(0.0, vec[i]);
  vec.normalize();
  out.witness.alpha.assign(vec.data(), vec.data() + vec.size());
  return out;
}

double soundness_bound(int n, int dG) {
  return 1.0 - 1.0 / (std::ldexp(1.0, 2 * n + 2) * (dG + 1));
}

nlohmann::json cleancc_to_json(const CleanCcInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["dG"] = inst.dG;
  j["neighbors"] = inst.neighbor;
  j["marked"] = inst.marked;
  return j;
}

CleanCcInstance cleancc_from_json(const nlohmann::json& j) {
  CleanCcInstance inst;
  inst.n = j.at("n").get<int>();
  inst.dG = j.at("dG").get<int>();
  inst.neighbor = j.at("neighbors").get<std::vector<std::vector<int>>>();
  inst.marked = j.at("marked").get<std::vector<int>>();
  inst.validate();
  return inst;
}

CleanCcInstance make_instance(int n, int dG, const std::vector<std::pair<int, int>>& edges,
                              const std::vector<int>& marked) {
  CleanCcInstance inst;
  inst.n = n;
  inst.dG = dG;
  const int nv = inst.n_vertices();
  inst.neighbor.assign(static_cast<std::size_t>(nv),
                       std::vector<int>());
  for (const auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("self loops are padding, not edges");
    inst.neighbor[static_cast<std::size_t>(u)].push_back(v);
    inst.neighbor[static_cast<std::size_t>(v)].push_back(u);
  }
  for (int v = 0; v < nv; ++v) {
    if (static_cast<int>(inst.neighbor[static_cast<std::size_t>(v)].size()) > dG)
      throw std::invalid_argument("vertex degree exceeds dG");
    while (static_cast<int>(inst.neighbor[static_cast<std::size_t>(v)].size()) < dG)
      inst.neighbor[static_cast<std::size_t>(v)].push_back(v);
  }
  inst.marked = marked;
  inst.validate();
  return inst;
}

}  // namespace stoqlab::cleancc
