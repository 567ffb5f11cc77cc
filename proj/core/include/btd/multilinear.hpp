#pragma once

#include "btd/tensor.hpp"

namespace btd {

/// Mode-n matricization. Mode 1 gives I x (J*K), mode 2 gives J x (I*K),
/// mode 3 gives K x (I*J). Columns are ordered with the lower-numbered
/// remaining mode varying fastest, so unfold(t, 1) has column index j + J*k.
/// `mode` is 1-based, matching the usual tensor notation.
Matrix unfold(const DenseTensor3& t, int mode);

/// Exact inverse of unfold for the given mode and target dims.
DenseTensor3 fold(const Matrix& m, int mode, const std::array<int, 3>& dims);

/// Tensor-matrix product in the given mode: replaces dims[mode] with m.rows().
/// Equals fold(m * unfold(t, mode), mode, new_dims).
DenseTensor3 mode_n_product(const DenseTensor3& t, const Matrix& m, int mode);

/// Column-wise Kronecker product. Requires a.cols() == b.cols(); column c of
/// the result is kron(a.col(c), b.col(c)), with b's index varying fastest.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// Standard Kronecker product, (a.rows*b.rows) x (a.cols*b.cols).
Matrix kronecker(const Matrix& a, const Matrix& b);

/// Sum of squared entries.
double frobenius_norm_sq(const DenseTensor3& t);

} // namespace btd
