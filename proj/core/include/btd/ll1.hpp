#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "btd/block_structure.hpp"
#include "btd/multilinear.hpp"
#include "btd/tensor.hpp"

namespace btd {

enum class InitKind { gevd, random };

std::string to_string(InitKind kind);

/// One term of the rank-(Lr, Lr, 1) model: the tensor contribution is
/// (A * B^T) outer c.
struct Ll1Block {
  Matrix A;          // I x L_r
  Matrix B;          // J x L_r
  Vector c;          // K
};

struct FitInfo {
  double final_cost = 0.0;      // ||t - reconstruct(model)||_F
  double relative_error = 0.0;  // final_cost / ||t||_F
  int iterations = 0;
  InitKind init = InitKind::random;
  bool converged = false;
  bool pinv_fallback = false;   // an ALS subproblem was rank deficient
  bool gevd_fallback = false;   // gevd init failed or was infeasible, random used
  std::vector<std::string> warnings;
};

struct Ll1Model {
  std::vector<Ll1Block> blocks;
  BlockStructure structure;
  FitInfo fit;

  int dim_i() const { return static_cast<int>(blocks.front().A.rows()); }
  int dim_j() const { return static_cast<int>(blocks.front().B.rows()); }
  int dim_k() const { return static_cast<int>(blocks.front().c.size()); }

  /// Throws DimensionError if block shapes disagree with the structure or
  /// with each other.
  void validate() const;
};

/// Horizontal concatenations of the per-block factors: A is I x sum(Lr),
/// B is J x sum(Lr), C has one column per block (K x R).
struct ExpandedFactors {
  Matrix A;
  Matrix B;
  Matrix C;
};

struct FitOptions {
  double tol = 1e-8;       // relative cost change that counts as converged
  int max_iter = 500;      // ALS sweeps per restart
  int restarts = 5;        // best final cost is kept
  InitKind init = InitKind::gevd;
  std::uint64_t seed = 0;
  /// Stop restarting once a converged fit reaches this relative error;
  /// further restarts cannot improve a near-exact fit.
  double target_relative_error = 1e-9;
};

/// Sum over blocks of (A_r * B_r^T) outer c_r.
DenseTensor3 reconstruct(const Ll1Model& model);

ExpandedFactors expand_factors(const Ll1Model& model);

/// The R x sum(Lr) 0/1 matrix Psi with Psi(r, c) = 1 iff expanded column c
/// belongs to block r; C * Psi repeats each block's c-vector L_r times.
Matrix expansion_matrix(const BlockStructure& structure);

/// Model with standard-normal factors; used for restarts and synthetic data.
Ll1Model random_init(int dim_i, int dim_j, int dim_k, const BlockStructure& structure,
                     std::uint64_t seed);

/// Seeds the factors from a generalized eigendecomposition of two random
/// pseudo-slices t x_3 w1 and t x_3 w2. Eigenvectors are grouped by sorted
/// eigenvalue magnitude into consecutive runs of sizes L_1..L_R; A and B are
/// read off the grouped pencil, C from one least-squares step.
/// Requires min(I, J) >= sum(Lr) and K >= 2; throws NumericalError when the
/// pencil is too close to singular to invert.
Ll1Model gevd_init(const DenseTensor3& t, const BlockStructure& structure,
                   std::uint64_t seed = 0);

/// One ALS pass (A, then B, then C, each an exact least-squares update).
/// The cost never increases.
Ll1Model als_sweep(const DenseTensor3& t, const Ll1Model& model);

/// Unfoldings and compression bases that repeated fits of one tensor share.
struct FitContext {
  std::array<int, 3> dims{0, 0, 0};
  Matrix x1t, x2t, x3t;  // transposed mode-n unfoldings
  Matrix u1, u2;         // left singular bases of the mode-1/mode-2 unfoldings
  double norm_t = 0.0;   // ||t||_F
};

FitContext make_fit_context(const DenseTensor3& t);

/// Block-wise alternating least squares with restarts. Never throws on
/// non-convergence; the returned fit metadata says what happened. Throws
/// DimensionError when sum(Lr) > I*J (the subproblems would be structurally
/// underdetermined).
Ll1Model fit_ll1(const DenseTensor3& t, const BlockStructure& structure,
                 const FitOptions& opts = {});
Ll1Model fit_ll1(const FitContext& ctx, const BlockStructure& structure,
                 const FitOptions& opts = {});

/// Fixes the scaling indeterminacy in place: unit-norm columns of each A_r
/// (scale moved into B_r, sign pinned by A_r's largest entry), then unit
/// Frobenius norm of each B_r with the magnitude absorbed into c_r.
void normalize_blocks(Ll1Model& model);

} // namespace btd
