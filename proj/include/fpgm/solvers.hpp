#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "fpgm/objective.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Member of the accelerated proximal gradient family run by the engine.
///  - fista / mfista: eta = 1 (non-monotone / monotone x_k)
///  - oista: eta = 2 with no safeguard
///  - fpgm / mfpgm: eta chosen from the computable bound gamma_k
enum class Variant { fista, mfista, oista, fpgm, mfpgm };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
bool is_monotone(Variant v);

inline constexpr long kUnboundedPhase = std::numeric_limits<long>::max();

struct SolverConfig {
    Variant variant = Variant::fpgm;
    double t1 = 1.0;
    double L0 = 1.0;
    double beta = 2.0;
    /// Length of the free phase (eta not tied to the L-chain). kUnboundedPhase
    /// means "infinity", a configuration without a convergence guarantee.
    long K = 10;
    /// Upper cap on eta, in [1, inf].
    double eta_bar = kInfinity;
    int N = 100;
    /// Replace Delta_c by zero in gamma_k.
    bool skip_delta_c = false;
    /// Backtracking gives up after this many increases of L.
    int max_backtracks = 200;

    /// Throws ContractError when a field is out of range.
    void validate() const;
};

struct IterationRecord {
    int k = 0;
    double psi = 0.0;
    double L = 0.0;
    double eta = 0.0;
    double gamma = 0.0;
    int backtracks = 0;
    double wall_ms = 0.0;
};

/// Everything the engine knows at the end of iteration k, before the
/// y-update. Exposed to observers for diagnostics and tests.
struct IterationView {
    int k;
    ConstSpan x_prev; // x_{k-1}
    ConstSpan y;      // y_k
    ConstSpan z;      // z_k = P_{L_k}(y_k)
    ConstSpan x;      // x_k
    double t;         // t_k
    double L;
    double L_prev;
    double eta;
    double eta_prev;
    double gamma;
    DeltaTriple deltas; // at (L_k, x_{k-1}, y_k)
    double psi_z;
    double psi_x;
    double q_at_z; // Q_{L_k}(z_k, y_k)
};

using IterationObserver = std::function<void(const IterationView&)>;

struct SolveResult {
    Vec x;
    std::vector<IterationRecord> trace;
};

/// (1 + sqrt(1 + 4 t^2)) / 2.
double t_next(double t);

struct BacktrackResult {
    double L;
    Vec z;
    int backtracks;
    double f_z;
    double phi_z;
    double psi_z;
    double q_at_z;
};

/// Smallest L in {L_start beta^j} with Psi(P_L(y)) <= Q_L(P_L(y), y).
BacktrackResult backtrack(const CompositeObjective& problem, const SmoothEval& at_y, ConstSpan y,
                          double L_start, double beta, ProxCache* cache = nullptr,
                          int max_backtracks = 200);
BacktrackResult backtrack(const CompositeObjective& problem, ConstSpan y, double L_start,
                          double beta);

/// gamma_k = 1 + 2 (Da + (1 - 1/t)(Db + Dc) + gap) / (L ||z - y||^2).
/// Returns +infinity when ||z - y|| = 0 and never less than 1.
double gamma_k(double t, double L, double dist_sq, const DeltaTriple& d, double monotone_gap,
               bool skip_delta_c = false);

/// eta_k for the adaptive variants: min{gamma, eta_bar} while k <= K, then
/// min{gamma, eta_prev L / L_prev, eta_bar}; never below 1.
double eta_select(long k, long K, double gamma, double eta_prev, double L, double L_prev,
                  double eta_bar);

/// y_{k+1} = x + ((t-1)/t_next)(x - x_prev) + (t/t_next)(z - x)
///           + (t/t_next)(eta - 1)(z - y).
Vec y_next(ConstSpan x, ConstSpan x_prev, ConstSpan z, ConstSpan y, double t, double t_nxt,
           double eta);

/// Runs config.N iterations from the feasible point x0.
SolveResult run(const SolverConfig& config, const CompositeObjective& problem, ConstSpan x0,
                const IterationObserver& observer = {});

/// CSV with header k,psi,L,eta,gamma,backtracks,wall_ms and 17 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);
std::vector<IterationRecord> read_trace_csv(std::istream& in);

} // namespace fpgm
