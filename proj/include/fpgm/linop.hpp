#pragma once

#include <cstddef>
#include <vector>

#include "fpgm/vec.hpp"

namespace fpgm {

/// One row of a linear operator in compressed form. Indices are strictly
/// increasing; squared_norm caches the sum of squared values.
struct SparseRow {
    std::vector<std::size_t> indices;
    std::vector<double> values;
    double squared_norm = 0.0;

    double dot(ConstSpan x) const {
        double s = 0.0;
        for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * x[indices[k]];
        return s;
    }
};

/// Abstract linear map R : R^ncols -> R^nrows with its transpose and row
/// access for row-action methods. Implementations are immutable after
/// construction and safe to share between threads.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t nrows() const = 0;
    virtual std::size_t ncols() const = 0;

    Vec apply(ConstSpan x) const;
    Vec apply_adjoint(ConstSpan y) const;
    SparseRow row(std::size_t i) const;

protected:
    // Sizes are checked by the public wrappers before these are called.
    virtual void apply_into(ConstSpan x, MutSpan out) const = 0;
    virtual void apply_adjoint_into(ConstSpan y, MutSpan out) const = 0;
    virtual SparseRow row_unchecked(std::size_t i) const = 0;
};

/// Row-major dense matrix. Used as an oracle for the projector and for small
/// synthetic problems.
class DenseOperator final : public LinearOperator {
public:
    DenseOperator(std::size_t nrows, std::size_t ncols, Vec row_major);

    static DenseOperator identity(std::size_t n);
    /// Materializes any operator column by column (n applications).
    static DenseOperator materialize(const LinearOperator& op);

    std::size_t nrows() const override { return rows_; }
    std::size_t ncols() const override { return cols_; }

    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const Vec& data() const { return data_; }

protected:
    void apply_into(ConstSpan x, MutSpan out) const override;
    void apply_adjoint_into(ConstSpan y, MutSpan out) const override;
    SparseRow row_unchecked(std::size_t i) const override;

private:
    std::size_t rows_;
    std::size_t cols_;
    Vec data_;
};

} // namespace fpgm
