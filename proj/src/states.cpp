#include "stoqlab/states.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace stoqlab::states {

void NonNegativeState::validate() const {
  double s = 0;
  for (const auto& [x, a] : amp) {
    if (a < 0) throw std::invalid_argument("amplitudes must be non-negative");
    if (x >= (Word{1} << width)) throw std::invalid_argument("basis string out of range");
    s += a * a;
  }
  if (std::abs(s - 1.0) > kNormTol) throw std::invalid_argument("state is not normalized");
}

NonNegativeState NonNegativeState::basis(int width, Word x) {
  NonNegativeState s;
  s.width = width;
  s.amp[x] = 1.0;
  return s;
}

NonNegativeState NonNegativeState::subset(int width, const std::set<Word>& support) {
  if (support.empty()) throw std::invalid_argument("subset state needs non-empty support");
  NonNegativeState s;
  s.width = width;
  const double a = 1.0 / std::sqrt(static_cast<double>(support.size()));
  for (Word x : support) s.amp[x] = a;
  return s;
}

NonNegativeState NonNegativeState::plus_all(int width) {
  std::set<Word> all;
  for (Word x = 0; x < (Word{1} << width); ++x) all.insert(x);
  return subset(width, all);
}

void ExactState::validate() const {
  Rat s = 0;
  for (const auto& [x, c] : coeff) {
    if (c < 0) throw std::invalid_argument("coefficients must be non-negative");
    if (x >= (Word{1} << width)) throw std::invalid_argument("basis string out of range");
    s += c * c;
  }
  if (scale2 * s != 1) throw std::invalid_argument("exact state is not normalized");
}

ExactState ExactState::basis(int width, Word x) {
  ExactState s;
  s.width = width;
  s.scale2 = 1;
  s.coeff[x] = 1;
  return s;
}

ExactState ExactState::subset(int width, const std::set<Word>& support) {
  if (support.empty()) throw std::invalid_argument("subset state needs non-empty support");
  ExactState s;
  s.width = width;
  s.scale2 = Rat(1, static_cast<long>(support.size()));
  for (Word x : support) s.coeff[x] = 1;
  return s;
}

NonNegativeState ExactState::to_double() const {
  NonNegativeState s;
  s.width = width;
  const double sc = std::sqrt(stoqlab::to_double(scale2));
  for (const auto& [x, c] : coeff) s.amp[x] = stoqlab::to_double(c) * sc;
  return s;
}

NonNegativeState tensor(const NonNegativeState& a, const NonNegativeState& b) {
  NonNegativeState r;
  r.width = a.width + b.width;
  for (const auto& [xa, va] : a.amp)
    for (const auto& [xb, vb] : b.amp) r.amp[xa | (xb << a.width)] = va * vb;
  return r;
}

ExactState tensor(const ExactState& a, const ExactState& b) {
  ExactState r;
  r.width = a.width + b.width;
  r.scale2 = a.scale2 * b.scale2;
  for (const auto& [xa, va] : a.coeff)
    for (const auto& [xb, vb] : b.coeff) r.coeff[xa | (xb << a.width)] = va * vb;
  return r;
}

double inner_product(const NonNegativeState& a, const NonNegativeState& b) {
  if (a.width != b.width) throw std::invalid_argument("inner_product: width mismatch");
  const auto& small = a.amp.size() <= b.amp.size() ? a : b;
  const auto& big = a.amp.size() <= b.amp.size() ? b : a;
  double s = 0;
  for (const auto& [x, v] : small.amp) s += v * big.amplitude(x);
  return s;
}

NonNegativeState absolutize(int width, const std::vector<double>& signed_amps) {
  if (signed_amps.size() != (std::size_t{1} << width))
    throw std::invalid_argument("absolutize: vector length must be 2^width");
  NonNegativeState r;
  r.width = width;
  for (std::size_t x = 0; x < signed_amps.size(); ++x)
    if (signed_amps[x] != 0) r.amp[x] = std::abs(signed_amps[x]);
  r.validate();
  return r;
}

void Distribution::validate() const {
  double s = 0;
  for (const auto& [x, v] : p) {
    if (v < -kNormTol) throw std::invalid_argument("negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > kNormTol) throw std::invalid_argument("probabilities must sum to 1");
}

Distribution squared_distribution(const NonNegativeState& a) {
  Distribution d;
  for (const auto& [x, v] : a.amp) d.p[x] = v * v;
  return d;
}

std::map<Word, Rat> squared_distribution(const ExactState& a) {
  std::map<Word, Rat> d;
  for (const auto& [x, c] : a.coeff) d[x] = a.scale2 * c * c;
  return d;
}

namespace {
template <typename F>
void for_union(const Distribution& p, const Distribution& q, F&& f) {
  auto ip = p.p.begin();
  auto iq = q.p.begin();
  while (ip != p.p.end() || iq != q.p.end()) {
    if (iq == q.p.end() || (ip != p.p.end() && ip->first < iq->first)) {
      f(ip->second, 0.0);
      ++ip;
    } else if (ip == p.p.end() || iq->first < ip->first) {
      f(0.0, iq->second);
      ++iq;
    } else {
      f(ip->second, iq->second);
      ++ip;
      ++iq;
    }
  }
}
}  // namespace

double tv(const Distribution& p, const Distribution& q) {
  double s = 0;
  for_union(p, q, [&](double a, double b) { s += std::abs(a - b); });
  return s / 2;
}

double hellinger2(const Distribution& p, const Distribution& q) {
  double s = 0;
  for_union(p, q, [&](double a, double b) { s += std::sqrt(a * b); });
  return 1.0 - s;
}

double kl(const Distribution& p, const Distribution& q) {
  double s = 0;
  bool violated = false;
  for_union(p, q, [&](double a, double b) {
    if (a <= 0) return;
    if (b <= 0) {
      violated = true;
      return;
    }
    s += a * std::log2(a / b);
  });
  return violated ? std::numeric_limits<double>::infinity() : s;
}

double entropy(const Distribution& p) {
  double s = 0;
  for (const auto& [x, v] : p.p)
    if (v > 0) s -= v * std::log2(v);
  return s;
}

void DensityMatrix::validate() const {
  if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kNormTol)
    throw std::invalid_argument("density matrix must be symmetric");
  if (std::abs(m.trace() - 1.0) > kNormTol)
    throw std::invalid_argument("density matrix must have trace 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kNormTol)
    throw std::invalid_argument("density matrix must be PSD");
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXd& psi) {
  DensityMatrix d;
  d.m = psi * psi.transpose();
  return d;
}

double fidelity_pure_mixed(const NonNegativeState& pure, const DensityMatrix& rho) {
  const auto dim = static_cast<Eigen::Index>(Word{1} << pure.width);
  if (rho.m.rows() != dim) throw std::invalid_argument("fidelity: dimension mismatch");
  const Eigen::VectorXd v = dense_vector(pure);
  return v.dot(rho.m * v);
}

double trace_distance_pure(const NonNegativeState& a, const NonNegativeState& b) {
  const double ov = inner_product(a, b);
  return std::sqrt(std::max(0.0, 1.0 - ov * ov));
}

Eigen::VectorXd dense_vector(const NonNegativeState& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(Word{1} << a.width));
  for (const auto& [x, amp] : a.amp) v[static_cast<Eigen::Index>(x)] = amp;
  return v;
}

nlohmann::json state_to_json(const NonNegativeState& s) {
  nlohmann::json j;
  j["width"] = s.width;
  nlohmann::json amps = nlohmann::json::object();
  for (const auto& [x, a] : s.amp) amps[string_from_word(x, s.width)] = a;
  j["amplitudes"] = amps;
  return j;
}

bool json_is_subset_state(const nlohmann::json& j) { return j.contains("subset"); }

NonNegativeState state_from_json(const nlohmann::json& j) {
  const int width = j.at("width").get<int>();
  if (json_is_subset_state(j)) {
    std::set<Word> sup;
    for (const auto& s : j.at("subset")) sup.insert(word_from_string(s.get<std::string>()));
    return NonNegativeState::subset(width, sup);
  }
  NonNegativeState s;
  s.width = width;
  for (const auto& [k, v] : j.at("amplitudes").items())
    s.amp[word_from_string(k)] = v.get<double>();
  s.validate();
  return s;
}

ExactState exact_state_from_json(const nlohmann::json& j) {
  const int width = j.at("width").get<int>();
  if (json_is_subset_state(j)) {
    std::set<Word> sup;
    for (const auto& s : j.at("subset")) sup.insert(word_from_string(s.get<std::string>()));
    return ExactState::subset(width, sup);
  }
  throw std::invalid_argument("rational mode needs a subset-state witness");
}

}  // namespace stoqlab::states
