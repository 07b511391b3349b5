#include "stoqlab/sepval.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace stoqlab::sepval {

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

// Full index from per-block digits, block 1 least significant.
int assemble_index(const std::vector<int>& dims, const std::vector<int>& digits) {
  int idx = 0;
  for (int b = static_cast<int>(dims.size()) - 1; b >= 0; --b)
    idx = idx * dims[static_cast<std::size_t>(b)] + digits[static_cast<std::size_t>(b)];
  return idx;
}

std::vector<int> split_index(const std::vector<int>& dims, int idx) {
  std::vector<int> digits(dims.size());
  for (std::size_t b = 0; b < dims.size(); ++b) {
    digits[b] = idx % dims[b];
    idx /= dims[b];
  }
  return digits;
}

Eigen::VectorXd product_vector(const std::vector<int>& dims,
                               const std::vector<Eigen::VectorXd>& psi) {
  int total = 1;
  for (int d : dims) total *= d;
  Eigen::VectorXd v(total);
  for (int i = 0; i < total; ++i) {
    const std::vector<int> dg = split_index(dims, i);
    double p = 1;
    for (std::size_t b = 0; b < dims.size(); ++b) p *= psi[b][dg[b]];
    v[i] = p;
  }
  return v;
}

}  // namespace

int PartitionedMatrix::total_dim() const {
  int t = 1;
  for (int d : dims) t *= d;
  return t;
}

void PartitionedMatrix::validate() const {
  if (dims.empty()) throw std::invalid_argument("matrix needs at least one block");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("block dimension must be positive");
  if (m.rows() != total_dim() || m.cols() != total_dim())
    throw std::invalid_argument("matrix dimension does not match block dims");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("matrix must be symmetric");
}

PartitionedMatrix PartitionedMatrix::make(std::vector<int> dims, Eigen::MatrixXd mat,
                                          std::optional<std::vector<Eigen::MatrixXd>> factors) {
  PartitionedMatrix p;
  p.dims = std::move(dims);
  p.m = std::move(mat);
  p.validate();
  p.entrywise_nonneg = p.m.minCoeff() >= 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.m, Eigen::EigenvaluesOnly);
  p.psd = es.eigenvalues().minCoeff() >= -1e-9;
  if (factors) {
    if (factors->size() != p.dims.size())
      throw std::invalid_argument("product form needs one factor per block");
    Eigen::MatrixXd re = Eigen::MatrixXd::Identity(1, 1);
    // block 1 least significant: assemble as kron(F_k, ..., F_1)
    for (auto it = factors->rbegin(); it != factors->rend(); ++it) re = kron(re, *it);
    if ((re - p.m).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("factors do not reassemble to the matrix");
    p.factors = std::move(factors);
  }
  return p;
}

PartitionedMatrix tensor_blockwise(const PartitionedMatrix& a, const PartitionedMatrix& b) {
  if (a.dims.size() != b.dims.size())
    throw std::invalid_argument("blockwise tensor needs equal block counts");
  std::vector<int> dims(a.dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = a.dims[i] * b.dims[i];
  const int total = [&] {
    int t = 1;
    for (int d : dims) t *= d;
    return t;
  }();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(total, total);
  const int ta = a.total_dim();
  const int tb = b.total_dim();
  auto merge = [&](int ia, int ib) {
    const std::vector<int> da = split_index(a.dims, ia);
    const std::vector<int> db = split_index(b.dims, ib);
    std::vector<int> dg(dims.size());
    for (std::size_t t2 = 0; t2 < dims.size(); ++t2) dg[t2] = da[t2] + a.dims[t2] * db[t2];
    return assemble_index(dims, dg);
  };
  for (int ra = 0; ra < ta; ++ra)
    for (int rb = 0; rb < tb; ++rb) {
      const int row = merge(ra, rb);
      for (int ca = 0; ca < ta; ++ca)
        for (int cb = 0; cb < tb; ++cb) m(row, merge(ca, cb)) = a.m(ra, ca) * b.m(rb, cb);
    }
  std::optional<std::vector<Eigen::MatrixXd>> factors;
  if (a.factors && b.factors) {
    std::vector<Eigen::MatrixXd> fs;
    for (std::size_t i = 0; i < dims.size(); ++i) fs.push_back(kron((*b.factors)[i], (*a.factors)[i]));
    factors = std::move(fs);
  }
  return PartitionedMatrix::make(std::move(dims), std::move(m), std::move(factors));
}

double product_form_value(const PartitionedMatrix& m, const std::vector<Eigen::VectorXd>& psi) {
  if (psi.size() != m.dims.size()) throw std::invalid_argument("wrong number of blocks");
  const Eigen::VectorXd v = product_vector(m.dims, psi);
  return v.dot(m.m * v);
}

namespace {

// Effective matrix on block b with all other blocks fixed.
Eigen::MatrixXd effective_matrix(const PartitionedMatrix& m,
                                 const std::vector<Eigen::VectorXd>& psi, std::size_t b) {
  const int d = m.dims[b];
  Eigen::MatrixXd eff = Eigen::MatrixXd::Zero(d, d);
  const int total = m.total_dim();
  for (int r = 0; r < total; ++r) {
    const std::vector<int> dr = split_index(m.dims, r);
    double wr = 1;
    for (std::size_t t = 0; t < m.dims.size(); ++t)
      if (t != b) wr *= psi[t][dr[t]];
    if (wr == 0) continue;
    for (int c = 0; c < total; ++c) {
      const std::vector<int> dc = split_index(m.dims, c);
      double wc = 1;
      for (std::size_t t = 0; t < m.dims.size(); ++t)
        if (t != b) wc *= psi[t][dc[t]];
      if (wc == 0) continue;
      eff(dr[b], dc[b]) += wr * wc * m.m(r, c);
    }
  }
  return eff;
}

Eigen::VectorXd clamp_unit_nonneg(Eigen::VectorXd v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i]);
  const double n = v.norm();
  if (n == 0) {
    v.setConstant(1.0 / std::sqrt(static_cast<double>(v.size())));
    return v;
  }
  return v / n;
}

// Local ascent: projected gradient on the product of spheres, clamped to the
// non-negative orthant unless signed_mode.
double local_ascent(const PartitionedMatrix& m, std::vector<Eigen::VectorXd>& psi,
                    bool signed_mode) {
  double value = product_form_value(m, psi);
  double step = 0.25;
  for (int it = 0; it < 400 && step > 1e-12; ++it) {
    bool improved = false;
    for (std::size_t b = 0; b < m.dims.size(); ++b) {
      const Eigen::MatrixXd eff = effective_matrix(m, psi, b);
      Eigen::VectorXd grad = 2.0 * eff * psi[b];
      Eigen::VectorXd cand = psi[b] + step * grad;
      if (!signed_mode) cand = clamp_unit_nonneg(cand);
      else {
        const double n = cand.norm();
        if (n > 0) cand /= n;
      }
      std::vector<Eigen::VectorXd> trial = psi;
      trial[b] = cand;
      const double tv = product_form_value(m, trial);
      if (tv > value + 1e-15) {
        psi = trial;
        value = tv;
        improved = true;
      }
    }
    if (!improved) step /= 2;
  }
  return value;
}

// Enumerate per-block grids recursively.
void enumerate_grid(const PartitionedMatrix& m, std::size_t b, std::vector<Eigen::VectorXd>& cur,
                    const std::vector<std::vector<Eigen::VectorXd>>& block_grids, double& best,
                    std::vector<Eigen::VectorXd>& best_psi) {
  if (b == m.dims.size()) {
    const double v = product_form_value(m, cur);
    if (v > best) {
      best = v;
      best_psi = cur;
    }
    return;
  }
  for (const Eigen::VectorXd& cand : block_grids[b]) {
    cur[b] = cand;
    enumerate_grid(m, b + 1, cur, block_grids, best, best_psi);
  }
}

void simplex_lattice(int d, int m, std::vector<int>& cur, int left, std::size_t pos,
                     std::vector<Eigen::VectorXd>& out) {
  if (pos + 1 == static_cast<std::size_t>(d)) {
    cur[pos] = left;
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = std::sqrt(static_cast<double>(cur[static_cast<std::size_t>(i)]) / m);
    out.push_back(v);
    return;
  }
  for (int t = 0; t <= left; ++t) {
    cur[pos] = t;
    simplex_lattice(d, m, cur, left - t, pos + 1, out);
  }
}

std::vector<Eigen::VectorXd> block_grid(int d, int grid, bool signed_mode) {
  std::vector<Eigen::VectorXd> out;
  if (d == 2) {
    const double lo = 0.0;
    const double hi = signed_mode ? 2.0 * std::numbers::pi : std::numbers::pi / 2.0;
    const int n = signed_mode ? 4 * grid : grid;
    for (int i = 0; i <= n; ++i) {
      const double th = lo + (hi - lo) * i / n;
      Eigen::VectorXd v(2);
      v << std::cos(th), std::sin(th);
      out.push_back(v);
    }
    return out;
  }
  if (signed_mode) throw std::invalid_argument("signed grid only supported for 2-dim blocks");
  const int lattice_m = std::max(4, grid * 2 / std::max(1, d));
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  simplex_lattice(d, lattice_m, cur, lattice_m, 0, out);
  return out;
}

}  // namespace

HsepResult hsep_bruteforce(const PartitionedMatrix& m, int grid, bool signed_mode) {
  m.validate();
  if (m.total_dim() > 256) throw std::invalid_argument("hsep_bruteforce: dimension cap exceeded");
  if (m.dims.size() > 3) throw std::invalid_argument("hsep_bruteforce: at most 3 blocks");
  std::vector<std::vector<Eigen::VectorXd>> grids;
  double covering = 0;
  for (int d : m.dims) {
    grids.push_back(block_grid(d, grid, signed_mode));
    if (d == 2) {
      const double h = (signed_mode ? 2.0 * std::numbers::pi : std::numbers::pi / 2.0) /
                       (signed_mode ? 4 * grid : grid);
      covering += h / 2.0;  // chord <= arc
    } else {
      const int lattice_m = std::max(4, grid * 2 / std::max(1, d));
      covering += std::sqrt(static_cast<double>(d) / lattice_m);
    }
  }
  std::vector<Eigen::VectorXd> cur(m.dims.size());
  std::vector<Eigen::VectorXd> best_psi;
  double best = -std::numeric_limits<double>::infinity();
  enumerate_grid(m, 0, cur, grids, best, best_psi);
  best = local_ascent(m, best_psi, signed_mode);

  const PerronResult nrm = lambda_max_nonneg(m.m.cwiseAbs());
  HsepResult r;
  r.value = best;
  r.grid_error = 2.0 * nrm.value * covering;
  r.argmax = best_psi;
  return r;
}

HsepResult hsep_alternating(const PartitionedMatrix& m, int restarts, int iters,
                            std::uint64_t seed,
                            const std::vector<std::vector<Eigen::VectorXd>>& extra_seeds) {
  m.validate();
  if (!m.entrywise_nonneg)
    throw std::invalid_argument("hsep_alternating needs an entrywise non-negative matrix");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  std::vector<std::vector<Eigen::VectorXd>> starts = extra_seeds;
  {
    std::vector<Eigen::VectorXd> uniform;
    for (int d : m.dims) {
      Eigen::VectorXd v = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
      uniform.push_back(v);
    }
    starts.push_back(uniform);
  }
  for (int t = 0; t < restarts; ++t) {
    std::vector<Eigen::VectorXd> s;
    for (int d : m.dims) {
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v[i] = uni(rng);
      s.push_back(clamp_unit_nonneg(v));
    }
    starts.push_back(s);
  }

  HsepResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (auto psi : starts) {
    double value = product_form_value(m, psi);
    for (int it = 0; it < iters; ++it) {
      const double before = value;
      for (std::size_t b = 0; b < m.dims.size(); ++b) {
        const Eigen::MatrixXd eff = effective_matrix(m, psi, b);
        const PerronResult pr = lambda_max_nonneg(eff);
        psi[b] = clamp_unit_nonneg(pr.vector);
      }
      value = product_form_value(m, psi);
      if (value <= before + 1e-13) break;
    }
    if (value > best.value) {
      best.value = value;
      best.argmax = psi;
    }
  }
  best.grid_error = 0;
  return best;
}

namespace {

double best_hsep(const PartitionedMatrix& m, std::uint64_t seed,
                 const std::vector<std::vector<Eigen::VectorXd>>& extra_seeds = {},
                 double* grid_error = nullptr) {
  double best = -std::numeric_limits<double>::infinity();
  if (m.entrywise_nonneg) {
    const HsepResult a = hsep_alternating(m, 20, 60, seed, extra_seeds);
    best = a.value;
  }
  if (m.total_dim() <= 16) {
    const HsepResult b = hsep_bruteforce(m, 64, false);
    if (grid_error) *grid_error = b.grid_error;
    best = std::max(best, b.value);
  }
  return best;
}

}  // namespace

ShiftCheckReport hsep_shift_check(const PartitionedMatrix& m, double a, double b) {
  if (a < 0 || b < 0) throw std::invalid_argument("shift check needs a,b >= 0");
  const PartitionedMatrix shifted = PartitionedMatrix::make(
      m.dims, a * m.m + b * Eigen::MatrixXd::Identity(m.total_dim(), m.total_dim()));
  ShiftCheckReport rep;
  const double h = best_hsep(m, 7);
  rep.lhs = best_hsep(shifted, 7);
  rep.rhs = a * h + b;
  rep.tolerance = 1e-6 * (1.0 + std::abs(a) + std::abs(b));
  rep.pass = std::abs(rep.lhs - rep.rhs) <= rep.tolerance;
  return rep;
}

MultiplicativityReport check_multiplicativity(const PartitionedMatrix& m,
                                              const PartitionedMatrix& mp, double tol,
                                              std::uint64_t seed) {
  if (!m.entrywise_nonneg || !mp.entrywise_nonneg)
    throw std::invalid_argument("multiplicativity check needs entrywise non-negative matrices");
  const PartitionedMatrix big = tensor_blockwise(m, mp);
  if (big.total_dim() > 4096) throw std::invalid_argument("tensor dimension cap exceeded");

  const HsepResult ha = hsep_alternating(m, 20, 60, seed);
  const HsepResult hb = hsep_alternating(mp, 20, 60, seed + 1);
  double ga = 0, gb = 0;
  double va = ha.value, vb = hb.value;
  if (m.total_dim() <= 16) {
    const HsepResult r = hsep_bruteforce(m, 64);
    va = std::max(va, r.value);
    ga = r.grid_error;
  }
  if (mp.total_dim() <= 16) {
    const HsepResult r = hsep_bruteforce(mp, 64);
    vb = std::max(vb, r.value);
    gb = r.grid_error;
  }

  // Product of the factor optimizers is feasible for the tensor problem.
  std::vector<std::vector<Eigen::VectorXd>> seeds;
  if (!ha.argmax.empty() && !hb.argmax.empty()) {
    std::vector<Eigen::VectorXd> s;
    for (std::size_t i = 0; i < m.dims.size(); ++i) {
      Eigen::VectorXd v(m.dims[i] * mp.dims[i]);
      for (int x = 0; x < m.dims[i]; ++x)
        for (int y = 0; y < mp.dims[i]; ++y) v[x + m.dims[i] * y] = ha.argmax[i][x] * hb.argmax[i][y];
      s.push_back(v);
    }
    seeds.push_back(s);
  }
  const HsepResult hbig = hsep_alternating(big, 24, 80, seed + 2, seeds);

  MultiplicativityReport rep;
  rep.lhs = hbig.value;
  rep.rhs = va * vb;
  rep.tolerance = tol + ga + gb;
  if (std::abs(rep.lhs - rep.rhs) <= rep.tolerance)
    rep.verdict = "EQUAL";
  else if (rep.lhs > rep.rhs + rep.tolerance)
    rep.verdict = "EXCESS";
  else
    rep.verdict = "UNRESOLVED";
  return rep;
}

PerronResult lambda_max_nonneg(const Eigen::MatrixXd& m, double tol, int max_iters) {
  if (m.rows() != m.cols()) throw std::invalid_argument("lambda_max_nonneg: square matrix needed");
  if (m.minCoeff() < 0) throw std::invalid_argument("lambda_max_nonneg: negative entry");
  const Eigen::Index d = m.rows();
  // Shift so the Perron eigenvalue dominates in absolute value.
  const double shift = m.rowwise().sum().maxCoeff() + 1.0;
  const Eigen::MatrixXd a = m + shift * Eigen::MatrixXd::Identity(d, d);

  PerronResult r;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd y = a * x;
    const double n = y.norm();
    if (n == 0) break;
    x = y / n;
    const double lam = x.dot(m * x);
    const double res = (m * x - lam * x).norm();
    if (res <= tol) {
      r.value = lam;
      r.vector = clamp_unit_nonneg(x);
      r.residual = res;
      r.converged = true;
      return r;
    }
  }
  const double lam = x.dot(m * x);
  r.value = lam;
  r.vector = clamp_unit_nonneg(x);
  r.residual = (m * x - lam * x).norm();
  r.converged = false;
  return r;
}

nlohmann::json matrix_to_json(const PartitionedMatrix& m) {
  nlohmann::json j;
  j["dims"] = m.dims;
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < m.m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.m.cols()));
    for (Eigen::Index c = 0; c < m.m.cols(); ++c) row[static_cast<std::size_t>(c)] = m.m(r, c);
    rows.push_back(row);
  }
  j["entries"] = rows;
  j["flags"] = {{"entrywise_nonneg", m.entrywise_nonneg}, {"psd", m.psd},
                {"product_form", m.factors.has_value()}};
  return j;
}

PartitionedMatrix matrix_from_json(const nlohmann::json& j) {
  const std::vector<int> dims = j.at("dims").get<std::vector<int>>();
  const auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n)
      throw std::invalid_argument("matrix JSON is not square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  std::optional<std::vector<Eigen::MatrixXd>> factors;
  if (j.contains("factors")) {
    std::vector<Eigen::MatrixXd> fs;
    for (const auto& fj : j.at("factors")) {
      const auto frows = fj.get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd f(frows.size(), frows.size());
      for (std::size_t r = 0; r < frows.size(); ++r)
        for (std::size_t c = 0; c < frows.size(); ++c) f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = frows[r][c];
      fs.push_back(f);
    }
    factors = std::move(fs);
  }
  return PartitionedMatrix::make(dims, std::move(m), std::move(factors));
}

PartitionedMatrix random_nonneg(std::vector<int> dims, std::mt19937_64& rng) {
  int total = 1;
  for (int d : dims) total *= d;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd r(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) r(i, j) = uni(rng);
  Eigen::MatrixXd sym = (r + r.transpose()) / 2.0;
  return PartitionedMatrix::make(std::move(dims), std::move(sym));
}

PartitionedMatrix random_nonneg_psd(std::vector<int> dims, std::mt19937_64& rng) {
  int total = 1;
  for (int d : dims) total *= d;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd b(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) b(i, j) = uni(rng);
  Eigen::MatrixXd m = b.transpose() * b;
  m /= lambda_max_nonneg(m).value;  // operator norm about 1
  return PartitionedMatrix::make(std::move(dims), std::move(m));
}

PartitionedMatrix random_product_form(std::vector<int> dims, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Eigen::MatrixXd> factors;
  for (int d : dims) {
    Eigen::MatrixXd f(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) f(i, j) = uni(rng);
    factors.push_back((f + f.transpose()) / 2.0);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(1, 1);
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) m = kron(m, *it);
  return PartitionedMatrix::make(std::move(dims), std::move(m), factors);
}

PartitionedMatrix remark_counterexample() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 3) = 1.0;
  m(3, 0) = 1.0;
  return PartitionedMatrix::make({2, 2}, std::move(m));
}

}  // namespace stoqlab::sepval
