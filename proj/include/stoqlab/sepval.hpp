#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace stoqlab::sepval {

// Real symmetric matrix on a tensor product of blocks. Block 1 corresponds to
// the least-significant digits of the row index, matching the qubit order of
// the circuit simulator.
struct PartitionedMatrix {
  std::vector<int> dims;
  Eigen::MatrixXd m;
  bool entrywise_nonneg = false;
  bool psd = false;
  std::optional<std::vector<Eigen::MatrixXd>> factors;  // product form when known

  int total_dim() const;
  void validate() const;  // symmetry; flags re-verified on construction
  static PartitionedMatrix make(std::vector<int> dims, Eigen::MatrixXd m,
                                std::optional<std::vector<Eigen::MatrixXd>> factors = {});
};

// Blockwise tensor product: blocks of `a` and `b` are merged pairwise, so the
// result is partitioned with dims[i] = a.dims[i] * b.dims[i].
PartitionedMatrix tensor_blockwise(const PartitionedMatrix& a, const PartitionedMatrix& b);

// Quadratic form <psi_1 ... psi_k| M |psi_1 ... psi_k>.
double product_form_value(const PartitionedMatrix& m, const std::vector<Eigen::VectorXd>& psi);

struct HsepResult {
  double value = 0;              // certified lower bound (value at the returned point)
  double grid_error = 0;         // Lipschitz-based upper error estimate
  std::vector<Eigen::VectorXd> argmax;
};

// Grid + local ascent over non-negative product unit vectors. signed_mode
// additionally searches signed vectors (2-dimensional blocks only).
HsepResult hsep_bruteforce(const PartitionedMatrix& m, int grid = 64, bool signed_mode = false);

// Alternating maximization: each sweep fixes all blocks but one and takes the
// Perron vector of the effective non-negative matrix. Monotone per sweep.
HsepResult hsep_alternating(const PartitionedMatrix& m, int restarts = 20, int iters = 60,
                            std::uint64_t seed = 1,
                            const std::vector<std::vector<Eigen::VectorXd>>& extra_seeds = {});

struct ShiftCheckReport {
  double lhs = 0;  // hsep(aM + bI)
  double rhs = 0;  // a hsep(M) + b
  double tolerance = 0;
  bool pass = false;
};
ShiftCheckReport hsep_shift_check(const PartitionedMatrix& m, double a, double b);

struct MultiplicativityReport {
  double lhs = 0;  // hsep(M (x) M')
  double rhs = 0;  // hsep(M) hsep(M')
  double tolerance = 0;
  std::string verdict;  // EQUAL | EXCESS
};
MultiplicativityReport check_multiplicativity(const PartitionedMatrix& m,
                                              const PartitionedMatrix& mp, double tol = 1e-4,
                                              std::uint64_t seed = 1);

struct PerronResult {
  double value = 0;
  Eigen::VectorXd vector;
  double residual = 0;
  bool converged = false;
};
// Largest eigenvalue of an entrywise non-negative symmetric matrix by power
// iteration from the all-ones vector.
PerronResult lambda_max_nonneg(const Eigen::MatrixXd& m, double tol = 1e-10,
                               int max_iters = 200000);

nlohmann::json matrix_to_json(const PartitionedMatrix& m);
PartitionedMatrix matrix_from_json(const nlohmann::json& j);

// Random instances for tests and the CLI demo paths.
PartitionedMatrix random_nonneg(std::vector<int> dims, std::mt19937_64& rng);
PartitionedMatrix random_nonneg_psd(std::vector<int> dims, std::mt19937_64& rng);
PartitionedMatrix random_product_form(std::vector<int> dims, std::mt19937_64& rng);
// The 4x4 product-convex matrix |00><11| + |11><00| on dims (2,2).
PartitionedMatrix remark_counterexample();

}  // namespace stoqlab::sepval
