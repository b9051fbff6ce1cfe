#include "fpgm/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "fpgm/prox.hpp"

namespace fpgm {

std::string to_string(Variant v) {
    switch (v) {
    case Variant::fista: return "fista";
    case Variant::mfista: return "mfista";
    case Variant::oista: return "oista";
    case Variant::fpgm: return "fpgm";
    case Variant::mfpgm: return "mfpgm";
    }
    return "unknown";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::fista, Variant::mfista, Variant::oista, Variant::fpgm, Variant::mfpgm})
        if (to_string(v) == name) return v;
    throw ContractError("unknown solver variant '" + name + "'");
}

bool is_monotone(Variant v) { return v == Variant::mfista || v == Variant::mfpgm; }

void SolverConfig::validate() const {
    if (!(t1 >= 1.0)) throw ContractError("SolverConfig: t1 must be >= 1");
    if (!(L0 > 0.0) || !std::isfinite(L0)) throw ContractError("SolverConfig: L0 must be positive");
    if (!(beta > 1.0) || !std::isfinite(beta)) throw ContractError("SolverConfig: beta must be > 1");
    if (K < 0) throw ContractError("SolverConfig: K must be nonnegative");
    if (!(eta_bar >= 1.0)) throw ContractError("SolverConfig: eta_bar must be >= 1");
    if (N < 1) throw ContractError("SolverConfig: N must be positive");
    if (max_backtracks < 1) throw ContractError("SolverConfig: max_backtracks must be positive");
}

double t_next(double t) {
    if (!(t >= 1.0)) throw ContractError("t_next: t must be >= 1");
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}

BacktrackResult backtrack(const CompositeObjective& problem, const SmoothEval& at_y, ConstSpan y,
                          double L_start, double beta, ProxCache* cache, int max_backtracks) {
    if (!(L_start > 0.0)) throw ContractError("backtrack: L_start must be positive");
    if (!(beta > 1.0)) throw ContractError("backtrack: beta must be > 1");
    double L = L_start;
    for (int j = 0;; ++j) {
        Vec z = proximal_gradient_step(*problem.nonsmooth, at_y, L, y, cache);
        // Psi(z) <= Q_L(z, y) is tested as D_f(z, y) <= (L/2) ||z - y||^2, the
        // same inequality with f(y) and phi(z) cancelled.
        const TrialEval tr = problem.smooth->trial(z, y, at_y);
        const double phi_z = problem.nonsmooth->value(z);
        double quad = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) quad += (z[i] - y[i]) * (z[i] - y[i]);
        const double margin = 0.5 * L * quad - tr.bregman;
        if (margin >= 0.0) {
            const double psi_z = tr.value + phi_z;
            return {L, std::move(z), j, tr.value, phi_z, psi_z, psi_z + margin};
        }
        if (j >= max_backtracks)
            throw DivergenceError("backtrack: sufficient decrease not reached after " +
                                  std::to_string(max_backtracks) + " increases of L");
        L *= beta;
    }
}

BacktrackResult backtrack(const CompositeObjective& problem, ConstSpan y, double L_start,
                          double beta) {
    return backtrack(problem, smooth_eval(*problem.smooth, y), y, L_start, beta);
}

double gamma_k(double t, double L, double dist_sq, const DeltaTriple& d, double monotone_gap,
               bool skip_delta_c) {
    if (!(dist_sq > 0.0)) return kInfinity;
    const double weight = 1.0 - 1.0 / t;
    double num = d.delta_a + monotone_gap;
    if (weight != 0.0) num += weight * (d.delta_b + (skip_delta_c ? 0.0 : d.delta_c));
    if (std::isnan(num)) return 1.0;
    // Roundoff (or an inexact prox) can push the sum slightly below zero.
    return 1.0 + 2.0 * std::max(num, 0.0) / (L * dist_sq);
}

double eta_select(long k, long K, double gamma, double eta_prev, double L, double L_prev,
                  double eta_bar) {
    if (k < 1) throw ContractError("eta_select: k must be >= 1");
    double eta = std::min(gamma, eta_bar);
    if (k > K) eta = std::min(eta, eta_prev * (L / L_prev));
    return std::max(eta, 1.0);
}

Vec y_next(ConstSpan x, ConstSpan x_prev, ConstSpan z, ConstSpan y, double t, double t_nxt,
           double eta) {
    const std::size_t n = x.size();
    require_size(x_prev, n, "y_next");
    require_size(z, n, "y_next");
    require_size(y, n, "y_next");
    const double c_momentum = (t - 1.0) / t_nxt;
    const double c_prox = t / t_nxt;
    const double c_over = c_prox * (eta - 1.0);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = x[i] + c_momentum * (x[i] - x_prev[i]);
        v += c_prox * (z[i] - x[i]);
        const double step = z[i] - y[i];
        if (step != 0.0) v += c_over * step; // eta may be +inf when z == y
        out[i] = v;
    }
    return out;
}

SolveResult run(const SolverConfig& config, const CompositeObjective& problem, ConstSpan x0,
                const IterationObserver& observer) {
    config.validate();
    if (!problem.smooth || !problem.nonsmooth) throw ContractError("run: incomplete objective");
    require_size(x0, problem.dimension(), "run: x0");

    const auto start = std::chrono::steady_clock::now();
    const SmoothPart& f = *problem.smooth;
    const NonsmoothPart& phi = *problem.nonsmooth;
    auto cache = phi.make_cache();

    Vec x_prev(x0.begin(), x0.end());
    double f_prev = f.value(x_prev);
    double phi_prev = phi.value(x_prev);
    if (!std::isfinite(phi_prev)) throw ContractError("run: x0 outside the domain of phi");

    Vec y = x_prev;
    double t = config.t1;
    double L_prev = config.L0;
    double eta_prev = config.eta_bar;

    SolveResult result;
    result.trace.reserve(static_cast<std::size_t>(config.N));
    const bool monotone = is_monotone(config.variant);

    for (int k = 1; k <= config.N; ++k) {
        const SmoothEval at_y = smooth_eval(f, y);
        BacktrackResult bt =
            backtrack(problem, at_y, y, L_prev, config.beta, cache.get(), config.max_backtracks);
        const double L = bt.L;

        // x_k: the prox point, or for monotone variants the better of it and x_{k-1}.
        const bool keep_prev = monotone && !(bt.psi_z <= f_prev + phi_prev);
        const double f_x = keep_prev ? f_prev : bt.f_z;
        const double phi_x = keep_prev ? phi_prev : bt.phi_z;
        const double psi_x = f_x + phi_x;
        const double gap = keep_prev ? bt.psi_z - psi_x : 0.0;

        DeltaTriple d;
        d.delta_a = bt.q_at_z - bt.psi_z;
        d.delta_b = delta_b(f_prev, at_y, x_prev, y);
        d.delta_c = config.skip_delta_c ? 0.0
                                        : delta_c(phi_prev, bt.phi_z, at_y, L, x_prev, y, bt.z);
        double dist_sq = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double diff = bt.z[i] - y[i];
            dist_sq += diff * diff;
        }
        const double gamma = gamma_k(t, L, dist_sq, d, gap, config.skip_delta_c);

        double eta = 1.0;
        switch (config.variant) {
        case Variant::fista:
        case Variant::mfista: eta = 1.0; break;
        case Variant::oista: eta = 2.0; break;
        case Variant::fpgm:
        case Variant::mfpgm:
            eta = eta_select(k, config.K, gamma, eta_prev, L, L_prev, config.eta_bar);
            break;
        }

        const Vec& x = keep_prev ? x_prev : bt.z;
        if (observer) {
            observer(IterationView{k, x_prev, y, bt.z, x, t, L, L_prev, eta, eta_prev, gamma, d,
                                   bt.psi_z, psi_x, bt.q_at_z});
        }

        const double t_nxt = t_next(t);
        Vec y_new = y_next(x, x_prev, bt.z, y, t, t_nxt, eta);
        if (!keep_prev) x_prev = std::move(bt.z);
        y = std::move(y_new);
        f_prev = f_x;
        phi_prev = phi_x;
        t = t_nxt;
        L_prev = L;
        eta_prev = eta;

        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        result.trace.push_back({k, psi_x, L, eta, gamma, bt.backtracks, ms});
    }
    result.x = std::move(x_prev);
    return result;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
    out << "k,psi,L,eta,gamma,backtracks,wall_ms\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (const auto& r : trace) {
        line.str({});
        line << r.k << ',' << r.psi << ',' << r.L << ',' << r.eta << ',' << r.gamma << ','
             << r.backtracks << ',' << r.wall_ms << '\n';
        out << line.str();
    }
}

std::vector<IterationRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "k,psi,L,eta,gamma,backtracks,wall_ms")
        throw DataError("trace csv: unexpected header");
    std::vector<IterationRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) throw DataError("trace csv: expected 7 columns");
        IterationRecord r;
        r.k = std::stoi(cells[0]);
        r.psi = std::stod(cells[1]);
        r.L = std::stod(cells[2]);
        r.eta = std::stod(cells[3]);
        r.gamma = std::stod(cells[4]);
        r.backtracks = std::stoi(cells[5]);
        r.wall_ms = std::stod(cells[6]);
        out.push_back(r);
    }
    return out;
}

} // namespace fpgm
