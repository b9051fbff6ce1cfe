#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "fpgm/baselines.hpp"
#include "fpgm/radon.hpp"

using namespace fpgm;

namespace {

std::vector<std::size_t> identity_order(std::size_t m) {
    std::vector<std::size_t> o(m);
    std::iota(o.begin(), o.end(), 0);
    return o;
}

double residual_sq(const Vec& A, std::size_t m, std::size_t n, const Vec& x, const Vec& b) {
    const Vec r = oracle::matvec(A, m, n, x);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += (r[i] - b[i]) * (r[i] - b[i]);
    return s;
}

double norm(const Vec& v) { return std::sqrt(oracle::dot(v, v)); }

} // namespace

TEST_CASE("efficient order") {
    using V = std::vector<std::size_t>;
    CHECK(efficient_order(4, 1) == V{0, 2, 1, 3});
    CHECK(efficient_order(1, 5) == V{0, 1, 2, 3, 4});
    CHECK(efficient_order(4, 2) == V{0, 1, 4, 5, 2, 3, 6, 7});
    CHECK(efficient_order(3, 1) == V{0, 2, 1});
    for (std::size_t views : {1, 2, 3, 5, 8, 13, 90, 512})
        for (std::size_t rays : {1, 2, 7}) {
            auto o = efficient_order(views, rays);
            std::sort(o.begin(), o.end());
            CHECK(o == identity_order(views * rays));
        }
}

TEST_CASE("art sweep examples") {
    const DenseOperator row(1, 2, {1.0, 0.0});
    const auto order = identity_order(1);
    CHECK(art_sweep(row, Vec{3.0}, Vec{0.0, 0.0}, 1.0, order) == Vec{3.0, 0.0});
    CHECK(art_sweep(row, Vec{3.0}, Vec{1.5, -2.0}, 0.0, order) == Vec{1.5, -2.0});

    // Zero rows are skipped rather than divided by.
    const DenseOperator with_zero(2, 2, {0.0, 0.0, 0.0, 2.0});
    CHECK(art_sweep(with_zero, Vec{5.0, 4.0}, Vec{1.0, 1.0}, 1.0, identity_order(2)) == Vec{1.0, 2.0});
}

TEST_CASE("alpha = 1 lands on the hyperplane of the row") {
    oracle::Gen gen(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 6;
        const Vec a = gen.normal_vec(n);
        const DenseOperator R(1, n, a);
        const double b = gen.normal();
        const Vec x = art_sweep(R, Vec{b}, gen.normal_vec(n), 1.0, identity_order(1));
        CHECK(oracle::dot(a, x) == doctest::Approx(b).epsilon(1e-12).scale(norm(a) * norm(x)));
    }
}

TEST_CASE("art converges on a consistent system") {
    oracle::Gen gen(5);
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t n = 10;
        // Well conditioned: identity plus a small random part.
        Vec A = gen.normal_vec(n * n, 0.1);
        for (std::size_t i = 0; i < n; ++i) A[i * n + i] += 1.0;
        const Vec x_true = gen.normal_vec(n);
        const Vec b = oracle::matvec(A, n, n, x_true);
        const auto rows = collect_rows(DenseOperator(n, n, A));
        Vec x(n, 0.0);
        for (int s = 0; s < 2000; ++s) art_sweep(rows, b, x, 0.05, identity_order(n));
        CHECK(std::sqrt(residual_sq(A, n, n, x, b)) <= 1e-6);
        CHECK(std::sqrt(oracle::dist_sq(x, x_true)) <= 1e-5);
    }
}

TEST_CASE("nonascending direction") {
    const GridShape g{5, 4};
    CHECK(nonascending_tv(Vec(20, 0.7), g) == Vec(20, 0.0));

    // Ramp rising along both axes: every term touching a pixel is smooth except
    // at the top-right corner, which no term depends on.
    Vec ramp(20);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 5; ++c) ramp[r * 5 + c] = 0.3 * c + 0.7 * r + 0.01 * c * r;
    const Vec t = nonascending_tv(ramp, g);
    Vec grad = oracle::fd_gradient([&](const Vec& v) { return oracle::tv_direct(v, 5, 4); }, ramp);
    const double gn = norm(grad);
    CHECK(norm(t) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t j = 0; j < 20; ++j) CHECK(t[j] == doctest::Approx(-grad[j] / gn).epsilon(1e-5).scale(1.0));

    oracle::Gen gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        Vec x = gen.uniform_vec(20, 0.0, 1.0);
        // Plateaus make some terms nondifferentiable.
        for (std::size_t j = 0; j < 20; ++j)
            if (gen.uniform() < 0.3) x[j] = 0.5;
        const double nt = norm(nonascending_tv(x, g));
        CHECK((nt == 0.0 || std::abs(nt - 1.0) <= 1e-14));
    }
}

TEST_CASE("nonascending direction zeroes pixels touching a flat term") {
    // Pixel 0's own term has dx = dy = 0 while its neighbors differ from each other.
    const GridShape g{3, 3};
    Vec x = {1.0, 1.0, 3.0, 1.0, 2.0, 5.0, 4.0, 7.0, 6.0};
    const Vec t = nonascending_tv(x, g);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == 0.0); // right neighbor inside the flat term of pixel 0
    CHECK(t[3] == 0.0); // upper neighbor inside the flat term of pixel 0
    CHECK(norm(t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("suptv examples") {
    const GridShape g{4, 4};
    const auto flat = suptv(Vec(16, 0.3), g, 5);
    CHECK(flat.y == Vec(16, 0.3));
    CHECK(flat.l == 15);

    SupTvParams none;
    none.I = 0;
    oracle::Gen gen(9);
    const Vec x = gen.uniform_vec(16, 0.0, 1.0);
    const auto id = suptv(x, g, 7, none);
    CHECK(id.y == x);
    CHECK(id.l == 7);

    CHECK_THROWS_AS(suptv(x, g, -1), ContractError);
}

TEST_CASE("suptv never increases TV and l only grows") {
    oracle::Gen gen(11);
    const GridShape g{12, 10};
    for (int trial = 0; trial < 30; ++trial) {
        const Vec x = gen.uniform_vec(g.size(), 0.0, trial % 2 == 0 ? 1.0 : 0.01);
        // Ten single-step calls chained through l equal one call with I = 10.
        SupTvParams one;
        one.I = 1;
        Vec y = x;
        long l = trial;
        for (int i = 0; i < 10; ++i) {
            const double before = total_variation(y, g);
            auto step = suptv(y, g, l, one);
            CHECK(total_variation(step.y, g) <= before);
            CHECK(step.l > l);
            y = std::move(step.y);
            l = step.l;
        }
        const auto all = suptv(x, g, trial);
        CHECK(all.y == y);
        CHECK(all.l == l);
    }
}

TEST_CASE("suptv gives up after the trial cap") {
    oracle::Gen gen(13);
    const GridShape g{6, 6};
    const Vec x = gen.uniform_vec(36, 0.0, 1e-3);
    SupTvParams p;
    p.b = 10.0;
    p.max_trials = 1;
    CHECK_THROWS_AS(suptv(x, g, 0, p), NumericalError);
}

TEST_CASE("supart") {
    const Geometry geo = make_geometry(12, 16, 8, 1.0);
    const RadonOperator R(geo);
    oracle::Gen gen(15);
    const Vec x_true = gen.uniform_vec(R.ncols(), 0.0, 1.0);
    const Vec b = R.apply(x_true);
    const auto order = efficient_order(geo.views, geo.rays_per_view);

    // Already within tolerance: returned as is.
    const auto done = supart(R, b, x_true, geo.grid(), 1e-3, order);
    CHECK(done.sweeps == 0);
    CHECK(done.x == x_true);

    std::vector<SupArtStep> steps;
    const auto r = supart(R, b, Vec(R.ncols(), 0.0), geo.grid(), 1e-4, order, {},
                          [&](const SupArtStep& s) { steps.push_back(s); });
    CHECK(r.residual <= 1e-4);
    const Vec rx = R.apply(r.x);
    double check = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) check += (rx[i] - b[i]) * (rx[i] - b[i]);
    CHECK(check == r.residual);
    REQUIRE(static_cast<long>(steps.size()) == r.sweeps);
    for (std::size_t k = 0; k < steps.size(); ++k) {
        CHECK(steps[k].sweep == static_cast<long>(k) + 1);
        CHECK(steps[k].tv_after <= steps[k].tv_before);
        CHECK(steps[k].l_after >= steps[k].l_before);
        if (k > 0) CHECK(steps[k].l_before == steps[k - 1].l_after);
    }
    CHECK(steps.back().residual == r.residual);

    SupArtParams capped;
    capped.max_sweeps = 2;
    CHECK_THROWS_AS(supart(R, b, Vec(R.ncols(), 0.0), geo.grid(), 1e-12, order, capped), NumericalError);
    CHECK_THROWS_AS(supart(R, b, Vec(R.ncols(), 0.0), geo.grid(), 0.0, order), ContractError);
}

TEST_CASE("supart reaches a tight tolerance on a small consistent system") {
    oracle::Gen gen(17);
    const std::size_t n = 10;
    Vec A = gen.normal_vec(n * n, 0.1);
    for (std::size_t i = 0; i < n; ++i) A[i * n + i] += 1.0;
    const Vec b = oracle::matvec(A, n, n, gen.uniform_vec(n, 0.0, 1.0));
    const DenseOperator R(n, n, A);
    const auto r = supart(R, b, Vec(n, 0.0), GridShape{5, 2}, 1e-8, identity_order(n));
    CHECK(r.residual <= 1e-8);
    CHECK(residual_sq(A, n, n, r.x, b) <= 1e-8);
    CHECK(r.sweeps > 0);
}
