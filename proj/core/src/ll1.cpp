#include "btd/ll1.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "btd/linalg.hpp"
#include "btd/rng.hpp"

namespace btd {

namespace {

constexpr std::uint64_t kRestartStream = 0x72657374;
constexpr std::uint64_t kGevdStream = 0x67657664;

struct Factors {
  Matrix A; // I x sum(Lr)
  Matrix B; // J x sum(Lr)
  Matrix C; // K x R
};

Matrix expand_c(const Matrix& c, const BlockStructure& s) {
  Matrix ce(c.rows(), s.total());
  for (int r = 0; r < s.num_blocks(); ++r)
    for (int l = 0; l < s.rank(r); ++l)
      ce.col(s.offset(r) + l) = c.col(r);
  return ce;
}

/// Design matrix of the mode-3 subproblem: column r is vec(A_r * B_r^T),
/// i.e. khatri_rao(B, A) * Psi^T without materializing the Khatri-Rao.
Matrix mode3_design(const Matrix& a, const Matrix& b, const BlockStructure& s) {
  const Eigen::Index ij = a.rows() * b.rows();
  Matrix m(ij, s.num_blocks());
  for (int r = 0; r < s.num_blocks(); ++r) {
    Matrix p = a.middleCols(s.offset(r), s.rank(r)) *
               b.middleCols(s.offset(r), s.rank(r)).transpose();
    m.col(r) = Eigen::Map<const Vector>(p.data(), ij);
  }
  return m;
}

double cost_of(const FitContext& ctx, const BlockStructure& s, const Factors& f) {
  Matrix m3 = mode3_design(f.A, f.B, s);
  return (m3 * f.C.transpose() - ctx.x3t).norm();
}

/// One A,B,C pass of exact least-squares updates; returns the cost afterwards.
double sweep_exact(const FitContext& ctx, const BlockStructure& s, Factors& f,
                   bool& rank_deficient) {
  bool rd = false;
  Matrix ce = expand_c(f.C, s);
  f.A = linalg::solve_least_squares(khatri_rao(ce, f.B), ctx.x1t, rd).transpose();
  rank_deficient |= rd;
  f.B = linalg::solve_least_squares(khatri_rao(ce, f.A), ctx.x2t, rd).transpose();
  rank_deficient |= rd;
  Matrix m3 = mode3_design(f.A, f.B, s);
  f.C = linalg::solve_least_squares(m3, ctx.x3t, rd).transpose();
  rank_deficient |= rd;
  return (m3 * f.C.transpose() - ctx.x3t).norm();
}

/// The R x R Gram of C blown up to expanded-column indexing, so the design
/// Gram of the A and B subproblems is an elementwise product.
Matrix expand_gram(const Matrix& c_gram, const BlockStructure& s) {
  Matrix g(s.total(), s.total());
  for (int r = 0; r < s.num_blocks(); ++r)
    for (int q = 0; q < s.num_blocks(); ++q)
      g.block(s.offset(r), s.offset(q), s.rank(r), s.rank(q)).setConstant(c_gram(r, q));
  return g;
}

/// Normal-equation solve of gram * x = rhs; refuses near-singular systems so
/// the caller can take the pseudoinverse path instead.
bool solve_normal(const Matrix& gram, const Matrix& rhs, Matrix& out) {
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return false;
  const Vector d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  if (!std::isfinite(dmax) || dmax <= 0.0 || d.minCoeff() <= 1e-12 * dmax) return false;
  out = ldlt.solve(rhs);
  return out.allFinite();
}

/// The ALS pass the fitting loop runs: same subproblems as sweep_exact but
/// solved through the Gram normal equations, falling back per update to the
/// exact minimum-norm solver when a Gram is near singular.
double sweep_fast(const FitContext& ctx, const BlockStructure& s, Factors& f,
                  bool& rank_deficient) {
  Matrix ce = expand_c(f.C, s);
  Matrix ce_gram = expand_gram(Matrix(f.C.transpose() * f.C), s);

  Matrix m1 = khatri_rao(ce, f.B);
  Matrix g1 = ce_gram.cwiseProduct(f.B.transpose() * f.B);
  Matrix rhs1, sol;
  rhs1.noalias() = m1.transpose() * ctx.x1t;
  if (solve_normal(g1, rhs1, sol)) {
    f.A = sol.transpose();
  } else {
    f.A = linalg::solve_least_squares(m1, ctx.x1t).transpose();
    rank_deficient = true;
  }

  Matrix m2 = khatri_rao(ce, f.A);
  Matrix g2 = ce_gram.cwiseProduct(f.A.transpose() * f.A);
  Matrix rhs2;
  rhs2.noalias() = m2.transpose() * ctx.x2t;
  if (solve_normal(g2, rhs2, sol)) {
    f.B = sol.transpose();
  } else {
    f.B = linalg::solve_least_squares(m2, ctx.x2t).transpose();
    rank_deficient = true;
  }

  Matrix m3 = mode3_design(f.A, f.B, s);
  Matrix g3, rhs3;
  g3.noalias() = m3.transpose() * m3;
  rhs3.noalias() = m3.transpose() * ctx.x3t;
  if (solve_normal(g3, rhs3, sol)) {
    f.C = sol.transpose();
  } else {
    f.C = linalg::solve_least_squares(m3, ctx.x3t).transpose();
    rank_deficient = true;
  }
  return (m3 * f.C.transpose() - ctx.x3t).norm();
}

Factors to_factors(const Ll1Model& model) {
  ExpandedFactors e = expand_factors(model);
  return Factors{std::move(e.A), std::move(e.B), std::move(e.C)};
}

Ll1Model to_model(const Factors& f, const BlockStructure& s) {
  Ll1Model model;
  model.structure = s;
  model.blocks.reserve(static_cast<std::size_t>(s.num_blocks()));
  for (int r = 0; r < s.num_blocks(); ++r) {
    Ll1Block blk;
    blk.A = f.A.middleCols(s.offset(r), s.rank(r));
    blk.B = f.B.middleCols(s.offset(r), s.rank(r));
    blk.c = f.C.col(r);
    model.blocks.push_back(std::move(blk));
  }
  return model;
}

FitContext make_context_impl(const DenseTensor3& t, bool with_bases) {
  FitContext ctx;
  ctx.dims = t.dims();
  Matrix x1 = unfold(t, 1);
  ctx.x1t = x1.transpose();
  Matrix x2 = unfold(t, 2);
  ctx.x2t = x2.transpose();
  ctx.x3t = unfold(t, 3).transpose();
  ctx.norm_t = std::sqrt(frobenius_norm_sq(t));
  if (with_bases) {
    ctx.u1 = Eigen::BDCSVD<Matrix>(x1, Eigen::ComputeThinU).matrixU();
    ctx.u2 = Eigen::BDCSVD<Matrix>(x2, Eigen::ComputeThinU).matrixU();
  }
  return ctx;
}

/// Sorted order of generalized eigenvalues by magnitude |alpha/beta|;
/// beta near zero sorts last (infinite eigenvalue).
std::vector<Eigen::Index> magnitude_order(const linalg::GevdValues& g) {
  const Eigen::Index n = g.alphas.size();
  std::vector<double> mag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(g.alphas(i));
    const double b = std::abs(g.betas(i));
    mag[static_cast<std::size_t>(i)] =
        (b <= 1e-300 * a || b == 0.0) ? std::numeric_limits<double>::infinity() : a / b;
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index p, Eigen::Index q) {
    return mag[static_cast<std::size_t>(p)] < mag[static_cast<std::size_t>(q)];
  });
  return idx;
}

/// Basis for one block's eigenspace: the run of eigenvalues at `order[off..]`
/// identifies a cluster; its span is read off as the trailing right singular
/// vectors of the shifted pencil beta*p1 - alpha*p2. This stays exact for the
/// repeated eigenvalues an exact block tensor produces, where per-eigenvector
/// extraction is numerically ill-posed.
Matrix run_null_basis(const Matrix& p1, const Matrix& p2, const linalg::GevdValues& g,
                      const std::vector<Eigen::Index>& order, int off, int len) {
  Eigen::Index rep = order[static_cast<std::size_t>(off)];
  for (int m = 1; m < len; ++m) {
    const Eigen::Index cand = order[static_cast<std::size_t>(off + m)];
    if (std::abs(g.betas(cand)) > std::abs(g.betas(rep))) rep = cand;
  }
  const double alpha = g.alphas(rep).real();
  const double beta = g.betas(rep);
  const double scale = std::max(std::hypot(alpha, beta), 1e-300);
  Matrix shifted = (beta / scale) * p1 - (alpha / scale) * p2;
  Eigen::JacobiSVD<Matrix> dec(shifted, Eigen::ComputeFullV);
  return dec.matrixV().rightCols(len);
}

void normalize_columns(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double n = m.col(c).norm();
    if (n > 0.0) m.col(c) /= n;
  }
}

Ll1Model gevd_init_impl(const FitContext& ctx, const BlockStructure& s, std::uint64_t seed) {
  const int I = ctx.dims[0], J = ctx.dims[1], K = ctx.dims[2];
  const int n = s.total();
  if (std::min(I, J) < n) {
    throw DimensionError("gevd_init: min(I,J) = " + std::to_string(std::min(I, J)) +
                         " is smaller than sum(Lr) = " + std::to_string(n));
  }
  if (K < 2) {
    throw DimensionError("gevd_init: needs K >= 2 to form two pseudo-slices");
  }

  auto rng = make_rng(derive_seed(seed, kGevdStream));
  Vector w1 = random_unit_vector(K, rng);
  Vector w2 = random_unit_vector(K, rng);
  Vector y1 = ctx.x3t * w1; // vec of the pseudo-slice t x_3 w1, i fastest
  Vector y2 = ctx.x3t * w2;
  Eigen::Map<const Matrix> y1m(y1.data(), I, J);
  Eigen::Map<const Matrix> y2m(y2.data(), I, J);

  const Matrix u = ctx.u1.leftCols(n);
  const Matrix v = ctx.u2.leftCols(n);
  Matrix p1 = u.transpose() * y1m * v; // compressed n x n pencil
  Matrix p2 = u.transpose() * y2m * v;

  linalg::GevdValues g = linalg::gevd_eigenvalues(p1, p2);
  std::vector<Eigen::Index> order = magnitude_order(g);
  Matrix w(n, n);
  for (int r = 0; r < s.num_blocks(); ++r) {
    w.middleCols(s.offset(r), s.rank(r)) =
        run_null_basis(p1, p2, g, order, s.offset(r), s.rank(r));
  }

  Eigen::JacobiSVD<Matrix> wsvd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = wsvd.singularValues();
  if (sv(0) <= 0.0 || sv(sv.size() - 1) < 1e-10 * sv(0)) {
    throw NumericalError("gevd_init: eigenvector matrix of the pencil is numerically singular");
  }
  // W^{-T} from the already-computed SVD
  Matrix winv_t =
      (wsvd.matrixV() * sv.cwiseInverse().asDiagonal() * wsvd.matrixU().transpose()).transpose();

  Factors f;
  f.A.resize(I, n);
  f.B.resize(J, n);
  for (int r = 0; r < s.num_blocks(); ++r) {
    const int off = s.offset(r), lr = s.rank(r);
    Matrix s1 = p1 * w.middleCols(off, lr);
    Matrix s2 = p2 * w.middleCols(off, lr);
    f.A.middleCols(off, lr) = u * (s2.norm() >= s1.norm() ? s2 : s1);
    f.B.middleCols(off, lr) = v * winv_t.middleCols(off, lr);
  }
  normalize_columns(f.A);
  normalize_columns(f.B);

  Matrix m3 = mode3_design(f.A, f.B, s);
  f.C = linalg::solve_least_squares(m3, ctx.x3t).transpose();

  Ll1Model model = to_model(f, s);
  model.fit.init = InitKind::gevd;
  return model;
}

struct RestartResult {
  Factors factors;
  double cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool pinv_fallback = false;
  bool gevd_fallback = false;
  InitKind init = InitKind::random;
};

RestartResult run_restart(const FitContext& ctx, const BlockStructure& s, const FitOptions& opts,
                          InitKind init, std::uint64_t restart_seed) {
  const int I = ctx.dims[0], J = ctx.dims[1], K = ctx.dims[2];
  RestartResult res;
  res.init = init;
  if (init == InitKind::gevd) {
    try {
      res.factors = to_factors(gevd_init_impl(ctx, s, restart_seed));
    } catch (const NumericalError&) {
      res.init = InitKind::random;
      res.gevd_fallback = true;
    }
  }
  if (res.init == InitKind::random) {
    res.factors = to_factors(random_init(I, J, K, s, restart_seed));
  }

  const double floor_cost = 1e-14 * std::max(ctx.norm_t, 1.0);
  double prev = cost_of(ctx, s, res.factors);
  if (prev <= floor_cost) {
    res.cost = prev;
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= opts.max_iter; ++it) {
    Factors backup = res.factors;
    double cost = sweep_fast(ctx, s, res.factors, res.pinv_fallback);
    if (!(cost <= prev + 1e-12 * std::max(1.0, prev))) {
      // the Gram route lost the guaranteed descent to rounding; redo this
      // pass with the exact least-squares solver
      res.factors = std::move(backup);
      cost = sweep_exact(ctx, s, res.factors, res.pinv_fallback);
    }
    res.iterations = it;
    res.cost = cost;
    if (cost <= floor_cost || std::abs(prev - cost) < opts.tol * std::max(prev, 1e-300)) {
      res.converged = true;
      break;
    }
    prev = cost;
  }
  return res;
}

} // namespace

std::string to_string(InitKind kind) {
  return kind == InitKind::gevd ? "gevd" : "random";
}

void Ll1Model::validate() const {
  if (blocks.empty() || static_cast<int>(blocks.size()) != structure.num_blocks()) {
    throw DimensionError("model has " + std::to_string(blocks.size()) + " blocks but structure " +
                         structure.to_string());
  }
  const int I = dim_i(), J = dim_j(), K = dim_k();
  for (int r = 0; r < structure.num_blocks(); ++r) {
    const Ll1Block& blk = blocks[static_cast<std::size_t>(r)];
    const int lr = structure.rank(r);
    if (blk.A.rows() != I || blk.A.cols() != lr || blk.B.rows() != J || blk.B.cols() != lr ||
        blk.c.size() != K) {
      throw DimensionError("block " + std::to_string(r + 1) + " shapes disagree with structure " +
                           structure.to_string());
    }
  }
}

DenseTensor3 reconstruct(const Ll1Model& model) {
  model.validate();
  const int I = model.dim_i(), J = model.dim_j(), K = model.dim_k();
  DenseTensor3 t(I, J, K);
  for (const Ll1Block& blk : model.blocks) {
    const Matrix p = blk.A * blk.B.transpose();
    for (int k = 0; k < K; ++k) {
      Eigen::Map<Matrix>(t.values().data() + static_cast<std::size_t>(I) * J * k, I, J) +=
          blk.c(k) * p;
    }
  }
  return t;
}

ExpandedFactors expand_factors(const Ll1Model& model) {
  model.validate();
  const BlockStructure& s = model.structure;
  ExpandedFactors e;
  e.A.resize(model.dim_i(), s.total());
  e.B.resize(model.dim_j(), s.total());
  e.C.resize(model.dim_k(), s.num_blocks());
  for (int r = 0; r < s.num_blocks(); ++r) {
    const Ll1Block& blk = model.blocks[static_cast<std::size_t>(r)];
    e.A.middleCols(s.offset(r), s.rank(r)) = blk.A;
    e.B.middleCols(s.offset(r), s.rank(r)) = blk.B;
    e.C.col(r) = blk.c;
  }
  return e;
}

Matrix expansion_matrix(const BlockStructure& structure) {
  Matrix psi = Matrix::Zero(structure.num_blocks(), structure.total());
  for (int r = 0; r < structure.num_blocks(); ++r)
    for (int l = 0; l < structure.rank(r); ++l)
      psi(r, structure.offset(r) + l) = 1.0;
  return psi;
}

Ll1Model random_init(int dim_i, int dim_j, int dim_k, const BlockStructure& structure,
                     std::uint64_t seed) {
  auto rng = make_rng(seed);
  Ll1Model model;
  model.structure = structure;
  model.blocks.reserve(static_cast<std::size_t>(structure.num_blocks()));
  for (int r = 0; r < structure.num_blocks(); ++r) {
    Ll1Block blk;
    blk.A = random_gaussian(dim_i, structure.rank(r), rng);
    blk.B = random_gaussian(dim_j, structure.rank(r), rng);
    blk.c = random_gaussian(dim_k, 1, rng);
    model.blocks.push_back(std::move(blk));
  }
  model.fit.init = InitKind::random;
  return model;
}

Ll1Model gevd_init(const DenseTensor3& t, const BlockStructure& structure, std::uint64_t seed) {
  FitContext ctx = make_context_impl(t, /*with_bases=*/true);
  return gevd_init_impl(ctx, structure, seed);
}

Ll1Model als_sweep(const DenseTensor3& t, const Ll1Model& model) {
  model.validate();
  if (t.dim(0) != model.dim_i() || t.dim(1) != model.dim_j() || t.dim(2) != model.dim_k()) {
    throw DimensionError("als_sweep: tensor dims do not match the model");
  }
  FitContext ctx = make_context_impl(t, /*with_bases=*/false);
  Factors f = to_factors(model);
  bool rank_deficient = false;
  const double cost = sweep_exact(ctx, model.structure, f, rank_deficient);
  Ll1Model out = to_model(f, model.structure);
  out.fit = model.fit;
  out.fit.final_cost = cost;
  out.fit.relative_error = ctx.norm_t > 0.0 ? cost / ctx.norm_t : 0.0;
  out.fit.pinv_fallback = model.fit.pinv_fallback || rank_deficient;
  return out;
}

FitContext make_fit_context(const DenseTensor3& t) {
  return make_context_impl(t, /*with_bases=*/true);
}

Ll1Model fit_ll1(const DenseTensor3& t, const BlockStructure& structure, const FitOptions& opts) {
  const int n = structure.total();
  const bool gevd_feasible =
      opts.init == InitKind::gevd && std::min({t.dim(0), t.dim(1), t.dim(2)}) >= n;
  FitContext ctx = make_context_impl(t, gevd_feasible);
  return fit_ll1(ctx, structure, opts);
}

Ll1Model fit_ll1(const FitContext& ctx, const BlockStructure& structure, const FitOptions& opts) {
  const int I = ctx.dims[0], J = ctx.dims[1], K = ctx.dims[2];
  const int n = structure.total();
  if (static_cast<std::int64_t>(n) > static_cast<std::int64_t>(I) * J) {
    throw DimensionError("fit_ll1: sum(Lr) = " + std::to_string(n) + " exceeds I*J = " +
                         std::to_string(static_cast<std::int64_t>(I) * J) +
                         "; the normal equations are necessarily underdetermined");
  }

  std::vector<std::string> warnings;
  InitKind effective_init = opts.init;
  bool infeasible_gevd = false;
  if (opts.init == InitKind::gevd && std::min({I, J, K}) < n) {
    warnings.push_back("smallest tensor side " + std::to_string(std::min({I, J, K})) +
                       " is below sum(Lr) = " + std::to_string(n) +
                       "; gevd init unavailable, using random init");
    effective_init = InitKind::random;
    infeasible_gevd = true;
  }

  RestartResult best;
  bool have_best = false;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    RestartResult res =
        run_restart(ctx, structure, opts, effective_init, derive_seed(opts.seed, kRestartStream, static_cast<std::uint64_t>(r)));
    if (!have_best || res.cost < best.cost) {
      best = std::move(res);
      have_best = true;
    }
    if (best.converged && ctx.norm_t > 0.0 &&
        best.cost / ctx.norm_t <= opts.target_relative_error) {
      break;
    }
    if (best.converged && ctx.norm_t == 0.0) break;
  }

  Ll1Model model = to_model(best.factors, structure);
  normalize_blocks(model);
  model.fit.final_cost = best.cost;
  model.fit.relative_error = ctx.norm_t > 0.0 ? best.cost / ctx.norm_t : 0.0;
  model.fit.iterations = best.iterations;
  model.fit.init = best.init;
  model.fit.converged = best.converged;
  model.fit.pinv_fallback = best.pinv_fallback;
  model.fit.gevd_fallback = best.gevd_fallback || infeasible_gevd;
  model.fit.warnings = std::move(warnings);
  return model;
}

void normalize_blocks(Ll1Model& model) {
  for (Ll1Block& blk : model.blocks) {
    for (Eigen::Index l = 0; l < blk.A.cols(); ++l) {
      const double n = blk.A.col(l).norm();
      if (n > 0.0) {
        blk.A.col(l) /= n;
        blk.B.col(l) *= n;
      }
      Eigen::Index imax = 0;
      blk.A.col(l).cwiseAbs().maxCoeff(&imax);
      if (blk.A(imax, l) < 0.0) {
        blk.A.col(l) = -blk.A.col(l);
        blk.B.col(l) = -blk.B.col(l);
      }
    }
    const double m = blk.B.norm();
    if (m > 0.0) {
      blk.B /= m;
      blk.c *= m;
    }
  }
}

} // namespace btd
