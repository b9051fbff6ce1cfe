#include "fpgm/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fpgm {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": nonfinite value");
}

// e^u - 1 - u
double expm1_minus_linear(double u) {
    if (std::abs(u) >= 0.5) return std::expm1(u) - u;
    double term = u * u / 2.0;
    double sum = term;
    for (int n = 3; n < 40 && std::abs(term) > 1e-18 * std::abs(sum); ++n) {
        term *= u / n;
        sum += term;
    }
    return sum;
}

// log(1 + r) - r
double log1p_minus_linear(double r) {
    if (std::abs(r) >= 0.25) return std::log1p(r) - r;
    double power = r * r;
    double sum = -power / 2.0;
    for (int n = 3; n < 60; ++n) {
        power *= -r;
        const double term = -power / n;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double dot_diff(ConstSpan g, ConstSpan z, ConstSpan y) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += g[i] * (z[i] - y[i]);
    return s;
}

} // namespace

TrialEval SmoothPart::trial(ConstSpan z, ConstSpan y, const SmoothEval& at_y) const {
    const double fz = value(z);
    return {fz, fz - at_y.value - dot_diff(at_y.grad, z, y)};
}

LeastSquares::LeastSquares(std::shared_ptr<const LinearOperator> op, Vec b)
    : op_(std::move(op)), b_(std::move(b)) {
    if (!op_) throw ContractError("LeastSquares: null operator");
    require_size(b_, op_->nrows(), "LeastSquares data");
}

double LeastSquares::value(ConstSpan x) const {
    const Vec r = sub(op_->apply(x), b_);
    const double v = norm_sq(r);
    require_finite(v, "LeastSquares::value");
    return v;
}

SmoothEval LeastSquares::eval(ConstSpan x) const {
    SmoothEval out;
    out.aux = sub(op_->apply(x), b_);
    out.value = norm_sq(out.aux);
    require_finite(out.value, "LeastSquares::eval");
    Vec r = out.aux;
    for (double& v : r) v *= 2.0;
    out.grad = op_->apply_adjoint(r);
    return out;
}

TrialEval LeastSquares::trial(ConstSpan z, ConstSpan y, const SmoothEval& at_y) const {
    if (at_y.aux.size() != op_->nrows()) return SmoothPart::trial(z, y, at_y);
    require_size(y, z.size(), "LeastSquares::trial");
    const Vec delta = op_->apply(sub(z, y));
    Vec r = at_y.aux;
    axpy(1.0, delta, r);
    TrialEval out{norm_sq(r), norm_sq(delta)};
    require_finite(out.value, "LeastSquares::trial");
    return out;
}

Transmission::Transmission(std::shared_ptr<const LinearOperator> op, Vec flat, Vec dark,
                           Vec counts)
    : op_(std::move(op)), flat_(std::move(flat)), dark_(std::move(dark)),
      counts_(std::move(counts)) {
    if (!op_) throw ContractError("Transmission: null operator");
    const std::size_t m = op_->nrows();
    require_size(flat_, m, "Transmission flat field");
    require_size(dark_, m, "Transmission dark field");
    require_size(counts_, m, "Transmission counts");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(flat_[i] > 0.0)) throw ContractError("Transmission: flat field must be positive");
        if (!(dark_[i] >= 0.0)) throw ContractError("Transmission: dark field must be nonnegative");
        if (!(counts_[i] >= 0.0)) throw ContractError("Transmission: counts must be nonnegative");
    }
}

double Transmission::value_from_projection(ConstSpan s) const {
    require_size(s, flat_.size(), "Transmission::value_from_projection");
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double mean = std::max(flat_[i] * std::exp(-s[i]) + dark_[i], kMeanFloor);
        total += mean - counts_[i] * std::log(mean);
    }
    require_finite(total, "Transmission::value");
    return total;
}

double Transmission::value(ConstSpan x) const { return value_from_projection(op_->apply(x)); }

SmoothEval Transmission::eval(ConstSpan x) const {
    const Vec s = op_->apply(x);
    Vec g(s.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double e = flat_[i] * std::exp(-s[i]);
        const double mean = std::max(e + dark_[i], kMeanFloor);
        total += mean - counts_[i] * std::log(mean);
        g[i] = -e * (1.0 - counts_[i] / mean);
    }
    require_finite(total, "Transmission::eval");
    SmoothEval out{total, op_->apply_adjoint(g), {}};
    out.aux = s;
    return out;
}

TrialEval Transmission::trial(ConstSpan z, ConstSpan y, const SmoothEval& at_y) const {
    const std::size_t m = flat_.size();
    if (at_y.aux.size() != m) return SmoothPart::trial(z, y, at_y);
    require_size(y, z.size(), "Transmission::trial");
    const Vec delta = op_->apply(sub(z, y));
    double total = 0.0;
    double bregman = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = flat_[i], d = dark_[i], p = counts_[i];
        const double s = at_y.aux[i];
        const double e = w * std::exp(-s);
        const double e_z = w * std::exp(-(s + delta[i]));
        const double mean_raw = e + d;
        const double mean_z_raw = e_z + d;
        const double mean = std::max(mean_raw, kMeanFloor);
        const double mean_z = std::max(mean_z_raw, kMeanFloor);
        total += mean_z - p * std::log(mean_z);
        if (mean_raw < kMeanFloor || mean_z_raw < kMeanFloor) {
            const double h = mean - p * std::log(mean);
            const double slope = -e * (1.0 - p / mean);
            bregman += (mean_z - p * std::log(mean_z)) - h - slope * delta[i];
            continue;
        }
        // h(s + t) - h(s) - h'(s) t written without differences of nearby values.
        const double u = -delta[i];
        const double a = e / mean;
        const double g1 = expm1_minus_linear(u);
        const double r = a * std::expm1(u);
        bregman += e * g1 - p * (log1p_minus_linear(r) + a * g1);
    }
    require_finite(total, "Transmission::trial");
    return {total, bregman};
}

Vec ZeroFunction::prox(ConstSpan v, double, ProxCache*) const { return Vec(v.begin(), v.end()); }

double NonnegIndicator::value(ConstSpan x) const {
    for (double v : x)
        if (!(v >= 0.0)) return kInfinity;
    return 0.0;
}

TvNonneg::TvNonneg(GridShape grid, double lambda, int inner_iters, bool warm_start)
    : grid_(grid), lambda_(lambda), inner_iters_(inner_iters), warm_start_(warm_start) {
    if (grid_.size() == 0) throw ContractError("TvNonneg: empty grid");
    if (!(lambda_ >= 0.0)) throw ContractError("TvNonneg: lambda must be nonnegative");
    if (inner_iters_ < 1) throw ContractError("TvNonneg: inner_iters must be positive");
}

double TvNonneg::value(ConstSpan x) const {
    for (double v : x)
        if (!(v >= 0.0)) return kInfinity;
    return lambda_ == 0.0 ? 0.0 : lambda_ * total_variation(x, grid_);
}

SmoothEval smooth_eval(const SmoothPart& f, ConstSpan x) {
    require_size(x, f.dimension(), "smooth_eval");
    for (double v : x)
        if (!std::isfinite(v)) throw NumericalError("smooth_eval: nonfinite input");
    return f.eval(x);
}

double nonsmooth_eval(const NonsmoothPart& phi, ConstSpan x) { return phi.value(x); }

double surrogate_q(const SmoothEval& at_y, double phi_x, double L, ConstSpan x, ConstSpan y) {
    if (!(L > 0.0)) throw ContractError("surrogate_q: L must be positive");
    require_size(y, x.size(), "surrogate_q");
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        lin += at_y.grad[i] * d;
        quad += d * d;
    }
    return at_y.value + lin + 0.5 * L * quad + phi_x;
}

double surrogate_q(const SmoothPart& f, const NonsmoothPart& phi, double L, ConstSpan x,
                   ConstSpan y) {
    return surrogate_q(smooth_eval(f, y), phi.value(x), L, x, y);
}

double delta_b(double f_x, const SmoothEval& at_y, ConstSpan x, ConstSpan y) {
    require_size(y, x.size(), "delta_b");
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lin += at_y.grad[i] * (x[i] - y[i]);
    return f_x - at_y.value - lin;
}

double delta_c(double phi_x, double phi_z, const SmoothEval& at_y, double L, ConstSpan x,
               ConstSpan y, ConstSpan z) {
    require_size(y, x.size(), "delta_c");
    require_size(z, x.size(), "delta_c");
    if (!(L > 0.0)) throw ContractError("delta_c: L must be positive");
    if (phi_x == kInfinity) return kInfinity;
    // -grad f(y) - L (z - y) = L (v - z) with v = y - grad f(y) / L, the point
    // handed to the prox. Forming v the same way the prox step does keeps the
    // inactive coordinates of a projection at exactly zero.
    const double step = -1.0 / L;
    double inner = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = y[i] + step * at_y.grad[i];
        inner += (v - z[i]) * (x[i] - z[i]);
    }
    return phi_x - phi_z - L * inner;
}

DeltaTriple deltas(const SmoothPart& f, const NonsmoothPart& phi, double L, ConstSpan x,
                   ConstSpan y, ConstSpan z) {
    if (!(L > 0.0)) throw ContractError("deltas: L must be positive");
    const SmoothEval at_y = smooth_eval(f, y);
    const double phi_z = phi.value(z);
    DeltaTriple d;
    d.delta_a = surrogate_q(at_y, phi_z, L, z, y) - (f.value(z) + phi_z);
    d.delta_b = delta_b(f.value(x), at_y, x, y);
    d.delta_c = delta_c(phi.value(x), phi_z, at_y, L, x, y, z);
    return d;
}

} // namespace fpgm
