#include "btd/corcondia.hpp"

#include <algorithm>
#include <cmath>

#include "btd/linalg.hpp"
#include "btd/multilinear.hpp"

namespace btd {

namespace {

// Above this many design entries the explicit Kronecker system is not
// materialized: pinv(C (x) B (x) A) = pinv(C) (x) pinv(B) (x) pinv(A), so the
// mode-wise pseudoinverse route is the same minimum-norm solution at a
// fraction of the cost.
constexpr std::int64_t kMaxKroneckerEntries = 200'000;

bool factor_rank_deficient(const Matrix& m) {
  return linalg::numerical_rank(m, linalg::default_rank_tol(m)) < m.cols();
}

DenseTensor3 core_via_kronecker(const DenseTensor3& t, const ExpandedFactors& f,
                                const BlockStructure& s) {
  // vec(t) ~= kron(C, kron(B, A)) vec(core) in first-index-fastest layout
  Matrix design = kronecker(f.C, kronecker(f.B, f.A));
  Matrix rhs(t.size(), 1);
  rhs.col(0) = t.as_vector();
  Matrix g = linalg::solve_least_squares(design, rhs);
  std::vector<double> values(g.data(), g.data() + g.size());
  return DenseTensor3(s.total(), s.total(), s.num_blocks(), std::move(values));
}

} // namespace

CoreTensor ideal_core(const BlockStructure& structure) {
  const int n = structure.total();
  DenseTensor3 t(n, n, structure.num_blocks());
  for (int r = 0; r < structure.num_blocks(); ++r) {
    const int off = structure.offset(r);
    for (int l = 0; l < structure.rank(r); ++l) t(off + l, off + l, r) = 1.0;
  }
  return CoreTensor{std::move(t), structure, false};
}

CoreTensor compute_core(const DenseTensor3& t, const Ll1Model& model) {
  model.validate();
  if (t.dim(0) != model.dim_i() || t.dim(1) != model.dim_j() || t.dim(2) != model.dim_k()) {
    throw DimensionError("compute_core: tensor dims do not match the model");
  }
  const BlockStructure& s = model.structure;
  ExpandedFactors f = expand_factors(model);

  const bool deficient =
      factor_rank_deficient(f.A) || factor_rank_deficient(f.B) || factor_rank_deficient(f.C);

  const std::int64_t kron_entries = t.size() * s.total() * s.total() * s.num_blocks();
  if (deficient && kron_entries <= kMaxKroneckerEntries) {
    return CoreTensor{core_via_kronecker(t, f, s), s, true};
  }

  DenseTensor3 core = mode_n_product(t, linalg::pseudoinverse(f.A), 1);
  core = mode_n_product(core, linalg::pseudoinverse(f.B), 2);
  core = mode_n_product(core, linalg::pseudoinverse(f.C), 3);
  return CoreTensor{std::move(core), s, deficient};
}

ConsistencyResult consistency(const CoreTensor& core) {
  const CoreTensor ideal = ideal_core(core.structure);
  if (!ideal.values.same_dims(core.values)) {
    throw DimensionError("consistency: core dims do not match the structure");
  }
  double dev = 0.0;
  const std::vector<double>& g = core.values.values();
  const std::vector<double>& ii = ideal.values.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = ii[i] - g[i];
    dev += d * d;
  }
  const double denom = static_cast<double>(core.structure.total()); // ||ideal||^2 exactly
  const double pct = (1.0 - dev / denom) * 100.0;
  ConsistencyResult res;
  res.percentage = std::min(100.0, pct);
  res.core = core;
  res.structure = core.structure;
  return res;
}

ConsistencyResult btd_corcondia(const DenseTensor3& t, const Ll1Model& model) {
  return consistency(compute_core(t, model));
}

} // namespace btd
