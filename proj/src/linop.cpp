#include "fpgm/linop.hpp"

#include <string>

namespace fpgm {

Vec LinearOperator::apply(ConstSpan x) const {
    require_size(x, ncols(), "LinearOperator::apply");
    Vec out(nrows(), 0.0);
    apply_into(x, out);
    return out;
}

Vec LinearOperator::apply_adjoint(ConstSpan y) const {
    require_size(y, nrows(), "LinearOperator::apply_adjoint");
    Vec out(ncols(), 0.0);
    apply_adjoint_into(y, out);
    return out;
}

SparseRow LinearOperator::row(std::size_t i) const {
    if (i >= nrows())
        throw ContractError("LinearOperator::row: index " + std::to_string(i) +
                            " out of range [0, " + std::to_string(nrows()) + ")");
    return row_unchecked(i);
}

DenseOperator::DenseOperator(std::size_t nrows, std::size_t ncols, Vec row_major)
    : rows_(nrows), cols_(ncols), data_(std::move(row_major)) {
    if (rows_ == 0 || cols_ == 0) throw ContractError("DenseOperator: empty shape");
    if (data_.size() != rows_ * cols_)
        throw ContractError("DenseOperator: data length does not match shape");
}

DenseOperator DenseOperator::identity(std::size_t n) {
    Vec d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
    return DenseOperator(n, n, std::move(d));
}

DenseOperator DenseOperator::materialize(const LinearOperator& op) {
    const std::size_t m = op.nrows();
    const std::size_t n = op.ncols();
    Vec d(m * n, 0.0);
    Vec e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const Vec col = op.apply(e);
        for (std::size_t i = 0; i < m; ++i) d[i * n + j] = col[i];
        e[j] = 0.0;
    }
    return DenseOperator(m, n, std::move(d));
}

void DenseOperator::apply_into(ConstSpan x, MutSpan out) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* r = data_.data() + i * cols_;
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
        out[i] = s;
    }
}

void DenseOperator::apply_adjoint_into(ConstSpan y, MutSpan out) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* r = data_.data() + i * cols_;
        const double yi = y[i];
        for (std::size_t j = 0; j < cols_; ++j) out[j] += r[j] * yi;
    }
}

SparseRow DenseOperator::row_unchecked(std::size_t i) const {
    SparseRow row;
    const double* r = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) {
        if (r[j] != 0.0) {
            row.indices.push_back(j);
            row.values.push_back(r[j]);
            row.squared_norm += r[j] * r[j];
        }
    }
    return row;
}

} // namespace fpgm
