#pragma once

// Random generators and independent reference computations shared by the
// unit and acceptance tests. Nothing here calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = std::vector<double>;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double normal(double mean = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mean, sd)(rng);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    Vec normal_vec(std::size_t n, double sd = 1.0) {
        Vec v(n);
        for (double& x : v) x = normal(0.0, sd);
        return v;
    }
    Vec uniform_vec(std::size_t n, double lo, double hi) {
        Vec v(n);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }
    // Row-major m x n.
    Vec matrix(std::size_t m, std::size_t n) { return normal_vec(m * n); }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dist_sq(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

inline Vec matvec(const Vec& A, std::size_t m, std::size_t n, const Vec& x) {
    Vec y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += A[i * n + j] * x[j];
    return y;
}

inline Vec matvec_t(const Vec& A, std::size_t m, std::size_t n, const Vec& y) {
    Vec x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) x[j] += A[i * n + j] * y[i];
    return x;
}

// Largest eigenvalue of A^T A by power iteration.
inline double lambda_max_ata(const Vec& A, std::size_t m, std::size_t n, int iters = 2000) {
    Vec v(n, 1.0);
    double lam = 0.0;
    for (int k = 0; k < iters; ++k) {
        Vec w = matvec_t(A, m, n, matvec(A, m, n, v));
        const double nw = std::sqrt(dot(w, w));
        if (nw == 0.0) return 0.0;
        lam = nw / std::sqrt(dot(v, v));
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / nw;
    }
    return lam;
}

// Exact eigenvalue via Eigen, for when power iteration is not precise enough.
inline double lambda_max_ata_exact(const Vec& A, std::size_t m, std::size_t n) {
    Eigen::MatrixXd M(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = A[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M);
    return es.eigenvalues().maxCoeff();
}

// Lawson-Hanson active-set solver for min ||A x - b||^2 subject to x >= 0.
inline Vec nnls(const Vec& A_rm, std::size_t m, std::size_t n, const Vec& b_in) {
    Eigen::MatrixXd A(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = A_rm[i * n + j];
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(b_in.data(), m);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);
    const double tol = 1e-12 * A.norm() * std::max(1.0, b.norm());

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<int> idx;
        for (std::size_t j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(static_cast<int>(j));
        z.setZero(n);
        if (idx.empty()) return;
        Eigen::MatrixXd Ap(m, idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
        const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(k);
    };

    for (int outer = 0; outer < 30 * static_cast<int>(n) + 100; ++outer) {
        const Eigen::VectorXd w = A.transpose() * (b - A * x);
        int best = -1;
        double best_w = tol;
        for (std::size_t j = 0; j < n; ++j)
            if (!passive[j] && w(j) > best_w) {
                best_w = w(j);
                best = static_cast<int>(j);
            }
        if (best < 0) break;
        passive[best] = true;
        Eigen::VectorXd z;
        for (;;) {
            solve_passive(z);
            bool feasible = true;
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && z(j) <= 0.0) feasible = false;
            if (feasible) break;
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
            x += alpha * (z - x);
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && x(j) <= 1e-15) {
                    passive[j] = false;
                    x(j) = 0.0;
                }
        }
        x = z;
    }
    return Vec(x.data(), x.data() + n);
}

// Central finite-difference gradient with step 1e-6 (1 + |x_j|).
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
    Vec g(x.size());
    Vec xp = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double h = 1e-6 * (1.0 + std::abs(x[j]));
        xp[j] = x[j] + h;
        const double fp = f(xp);
        xp[j] = x[j] - h;
        const double fm = f(xp);
        xp[j] = x[j];
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Isotropic TV written out term by term: pixel (c, r) at r * w + c, neighbors
// to the right (c + 1) and above (r + 1), zero difference past the border.
inline double tv_direct(const Vec& x, std::size_t w, std::size_t h) {
    double s = 0.0;
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const double v = x[r * w + c];
            const double dr = c + 1 < w ? v - x[r * w + c + 1] : 0.0;
            const double da = r + 1 < h ? v - x[(r + 1) * w + c] : 0.0;
            s += std::sqrt(dr * dr + da * da);
        }
    return s;
}

// argmin_y { weight TV(y) + 1/2 ||y - x||^2 : y >= 0 } by the accelerated
// primal-dual (Chambolle-Pock) iteration, run until the duality gap is below
// gap_tol.
struct TvProxOracle {
    Vec y;
    double gap;
    long iterations;
};

inline TvProxOracle tv_prox_primal_dual(const Vec& x, std::size_t w, std::size_t h, double weight,
                                        double gap_tol = 1e-13, long max_iter = 5000000) {
    const std::size_t n = w * h;
    auto K = [&](const Vec& u, Vec& p, Vec& q) {
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < w; ++c) {
                const std::size_t i = r * w + c;
                p[i] = c + 1 < w ? u[i] - u[i + 1] : 0.0;
                q[i] = r + 1 < h ? u[i] - u[i + w] : 0.0;
            }
    };
    auto Kt = [&](const Vec& p, const Vec& q, Vec& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < w; ++c) {
                const std::size_t i = r * w + c;
                if (c + 1 < w) {
                    out[i] += p[i];
                    out[i + 1] -= p[i];
                }
                if (r + 1 < h) {
                    out[i] += q[i];
                    out[i + w] -= q[i];
                }
            }
    };
    auto primal = [&](const Vec& u) { return 0.5 * dist_sq(u, x) + weight * tv_direct(u, w, h); };
    auto dual = [&](const Vec& p, const Vec& q) {
        Vec kt(n);
        Kt(p, q, kt);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = std::max(x[i] - kt[i], 0.0);
            s += 0.5 * (u - x[i]) * (u - x[i]) + kt[i] * u;
        }
        return s;
    };

    Vec y(n), ybar(n), p(n, 0.0), q(n, 0.0), kp(n), kq(n), kt(n), ynew(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = ybar[i] = std::max(x[i], 0.0);
    double tau = 0.99 / std::sqrt(8.0), sigma = 0.99 / std::sqrt(8.0);
    double gap = primal(y) - dual(p, q);
    long it = 0;
    for (; it < max_iter && gap > gap_tol; ++it) {
        K(ybar, kp, kq);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] += sigma * kp[i];
            q[i] += sigma * kq[i];
            const double nr = std::hypot(p[i], q[i]);
            if (nr > weight) {
                p[i] *= weight / nr;
                q[i] *= weight / nr;
            }
        }
        Kt(p, q, kt);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = std::max((y[i] - tau * kt[i] + tau * x[i]) / (1.0 + tau), 0.0);
        const double theta = 1.0 / std::sqrt(1.0 + 2.0 * tau);
        tau *= theta;
        sigma /= theta;
        for (std::size_t i = 0; i < n; ++i) ybar[i] = ynew[i] + theta * (ynew[i] - y[i]);
        y.swap(ynew);
        if (it % 64 == 0) gap = primal(y) - dual(p, q);
    }
    gap = primal(y) - dual(p, q);
    return {y, gap, it};
}

} // namespace oracle
