#pragma once

#include <cstddef>
#include <limits>
#include <memory>

#include "fpgm/linop.hpp"
#include "fpgm/tv.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SmoothEval {
    double value = 0.0;
    Vec grad;
    /// Model-specific by-product of the evaluation (R x for the models here),
    /// reused by SmoothPart::trial. May be empty.
    Vec aux;
};

/// f at a trial point z together with D_f(z, y) = f(z) - f(y) - <grad f(y), z - y>.
struct TrialEval {
    double value = 0.0;
    double bregman = 0.0;
};

/// Smooth convex part f of the composite objective.
class SmoothPart {
public:
    virtual ~SmoothPart() = default;
    virtual std::size_t dimension() const = 0;
    virtual double value(ConstSpan x) const = 0;
    virtual SmoothEval eval(ConstSpan x) const = 0;

    /// The default subtracts f(y) from f(z), which loses all accuracy once z
    /// is close to y. Models override it with a difference-based evaluation.
    virtual TrialEval trial(ConstSpan z, ConstSpan y, const SmoothEval& at_y) const;
};

/// f(x) = ||R x - b||^2 (no 1/2 factor), grad = 2 R^T (R x - b).
class LeastSquares final : public SmoothPart {
public:
    LeastSquares(std::shared_ptr<const LinearOperator> op, Vec b);

    std::size_t dimension() const override { return op_->ncols(); }
    double value(ConstSpan x) const override;
    SmoothEval eval(ConstSpan x) const override;
    /// D_f(z, y) = ||R (z - y)||^2.
    TrialEval trial(ConstSpan z, ConstSpan y, const SmoothEval& at_y) const override;

    const LinearOperator& op() const { return *op_; }
    const Vec& data() const { return b_; }
    /// ||R x - b||^2, identical to value() but named for readability at call sites.
    double squared_residual(ConstSpan x) const { return value(x); }

private:
    std::shared_ptr<const LinearOperator> op_;
    Vec b_;
};

/// Poisson transmission negative log-likelihood
///   f(x) = sum_i h_i((R x)_i),  h_i(s) = w_i e^{-s} + d_i - p_i log(w_i e^{-s} + d_i)
/// with w = flat field, d = dark field, p = photon counts.
class Transmission final : public SmoothPart {
public:
    /// Lower clamp applied to w_i e^{-s} + d_i before taking the log.
    static constexpr double kMeanFloor = 1e-30;

    Transmission(std::shared_ptr<const LinearOperator> op, Vec flat, Vec dark, Vec counts);

    std::size_t dimension() const override { return op_->ncols(); }
    double value(ConstSpan x) const override;
    SmoothEval eval(ConstSpan x) const override;
    TrialEval trial(ConstSpan z, ConstSpan y, const SmoothEval& at_y) const override;

    const LinearOperator& op() const { return *op_; }

    /// Sum of h_i over a given projection s = R x (exposed for tests).
    double value_from_projection(ConstSpan s) const;

private:
    std::shared_ptr<const LinearOperator> op_;
    Vec flat_;
    Vec dark_;
    Vec counts_;
};

/// Opaque per-run state a prox implementation may keep between calls
/// (warm-started dual variables for the TV prox).
struct ProxCache {
    virtual ~ProxCache() = default;
};

/// Proper convex, possibly nonsmooth part phi. value() returns +infinity
/// outside the domain.
class NonsmoothPart {
public:
    virtual ~NonsmoothPart() = default;
    virtual double value(ConstSpan x) const = 0;
    /// argmin_u { phi(u) + (L/2) ||u - v||^2 } (possibly approximate).
    virtual Vec prox(ConstSpan v, double L, ProxCache* cache) const = 0;
    virtual std::unique_ptr<ProxCache> make_cache() const { return nullptr; }
};

/// phi = 0. Not one of the reconstruction models; used for unconstrained
/// test problems.
class ZeroFunction final : public NonsmoothPart {
public:
    double value(ConstSpan) const override { return 0.0; }
    Vec prox(ConstSpan v, double L, ProxCache* cache) const override;
};

/// Indicator of the nonnegative orthant.
class NonnegIndicator final : public NonsmoothPart {
public:
    double value(ConstSpan x) const override;
    Vec prox(ConstSpan v, double L, ProxCache* cache) const override;
};

/// lambda * TV(x) + indicator(x >= 0) on an image grid. The prox is
/// approximated by inner_iters steps of a dual fast gradient method.
class TvNonneg final : public NonsmoothPart {
public:
    TvNonneg(GridShape grid, double lambda, int inner_iters = 10, bool warm_start = true);

    double value(ConstSpan x) const override;
    Vec prox(ConstSpan v, double L, ProxCache* cache) const override;
    std::unique_ptr<ProxCache> make_cache() const override;

    GridShape grid() const { return grid_; }
    double lambda() const { return lambda_; }
    int inner_iters() const { return inner_iters_; }
    bool warm_start() const { return warm_start_; }

private:
    GridShape grid_;
    double lambda_;
    int inner_iters_;
    bool warm_start_;
};

/// Psi = f + phi.
struct CompositeObjective {
    std::shared_ptr<const SmoothPart> smooth;
    std::shared_ptr<const NonsmoothPart> nonsmooth;

    double value(ConstSpan x) const { return smooth->value(x) + nonsmooth->value(x); }
    std::size_t dimension() const { return smooth->dimension(); }
};

SmoothEval smooth_eval(const SmoothPart& f, ConstSpan x);
double nonsmooth_eval(const NonsmoothPart& phi, ConstSpan x);

/// Q_L(x, y) = f(y) + <grad f(y), x - y> + (L/2) ||x - y||^2 + phi(x).
double surrogate_q(const SmoothPart& f, const NonsmoothPart& phi, double L, ConstSpan x,
                   ConstSpan y);

/// Same quantity from an already evaluated f(y), grad f(y) and phi(x).
double surrogate_q(const SmoothEval& at_y, double phi_x, double L, ConstSpan x, ConstSpan y);

struct DeltaTriple {
    double delta_a = 0.0;
    double delta_b = 0.0;
    double delta_c = 0.0;
    double total() const { return delta_a + delta_b + delta_c; }
};

/// f(x) - f(y) - <grad f(y), x - y>.
double delta_b(double f_x, const SmoothEval& at_y, ConstSpan x, ConstSpan y);

/// phi(x) - phi(z) - <-grad f(y) - L (z - y), x - z>. +infinity if phi(x) is.
double delta_c(double phi_x, double phi_z, const SmoothEval& at_y, double L, ConstSpan x,
               ConstSpan y, ConstSpan z);

/// All three bookkeeping quantities, evaluated from scratch. z must be the
/// proximal gradient point P_L(y) supplied by the caller.
DeltaTriple deltas(const SmoothPart& f, const NonsmoothPart& phi, double L, ConstSpan x,
                   ConstSpan y, ConstSpan z);

} // namespace fpgm
