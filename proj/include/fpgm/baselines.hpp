#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fpgm/linop.hpp"
#include "fpgm/tv.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Ray processing order: views by bit-reversed view index (indices past
/// views - 1 skipped), rays in natural order inside each view.
std::vector<std::size_t> efficient_order(std::size_t views, std::size_t rays_per_view);

/// All rows of an operator, traced once and reused across sweeps.
std::vector<SparseRow> collect_rows(const LinearOperator& R);

/// One ART cycle: for each i in order, x <- x - alpha (<r_i, x> - b_i) / ||r_i||^2 r_i.
/// Rows with zero norm are skipped. Updates x in place.
void art_sweep(const std::vector<SparseRow>& rows, ConstSpan b, MutSpan x, double alpha,
               const std::vector<std::size_t>& order);
Vec art_sweep(const LinearOperator& R, ConstSpan b, ConstSpan x, double alpha,
              const std::vector<std::size_t>& order);

/// Unit (or zero) vector along which TV does not ascend: minus the
/// normalized TV gradient, with components zeroed wherever a TV term touching
/// the pixel has a root below 1e-12.
Vec nonascending_tv(ConstSpan x, GridShape grid);

struct SupTvParams {
    double a = 1.0 - 1e-4;
    double b = 3e-2;
    int I = 10;
    long max_trials = 1000000;
};

struct SupTvResult {
    Vec y;
    long l;
};

/// I perturbation steps y <- y + b a^l t, each retried with l incremented
/// until TV does not increase.
SupTvResult suptv(ConstSpan x, GridShape grid, long l, const SupTvParams& params = {});

struct SupArtParams {
    double alpha = 0.05;
    SupTvParams suptv;
    long max_sweeps = 10000;
};

/// Per-sweep diagnostics: TV and l before and after the SupTV call, and the
/// squared residual after the ART sweep.
struct SupArtStep {
    long sweep;
    double tv_before;
    double tv_after;
    long l_before;
    long l_after;
    double residual;
};

using SupArtObserver = std::function<void(const SupArtStep&)>;

struct SupArtResult {
    Vec x;
    long sweeps;
    double residual; // ||R x - b||^2 at exit
};

/// Repeats SupTV followed by one ART sweep until ||R x - b||^2 <= eps.
/// Throws NumericalError after max_sweeps sweeps.
SupArtResult supart(const LinearOperator& R, ConstSpan b, ConstSpan x0, GridShape grid, double eps,
                    const std::vector<std::size_t>& order, const SupArtParams& params = {},
                    const SupArtObserver& observer = {});

} // namespace fpgm
