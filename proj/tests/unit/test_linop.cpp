#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/oracles.hpp"
#include "fpgm/linop.hpp"

using namespace fpgm;

TEST_CASE("dense identity and all-ones apply") {
    const auto I = DenseOperator::identity(2);
    CHECK(I.apply(Vec{3.0, -1.0}) == Vec{3.0, -1.0});
    const DenseOperator ones(2, 2, {1, 1, 1, 1});
    CHECK(ones.apply(Vec{1.0, 1.0}) == Vec{2.0, 2.0});
}

TEST_CASE("adjoint of small dense matrices") {
    CHECK(DenseOperator::identity(2).apply_adjoint(Vec{1.0, 2.0}) == Vec{1.0, 2.0});
    const DenseOperator A(2, 2, {1, 0, 1, 1});
    CHECK(A.apply_adjoint(Vec{1.0, 1.0}) == Vec{2.0, 1.0});
}

TEST_CASE("random 8x8 adjoint identity") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseOperator A(8, 8, gen.matrix(8, 8));
        const Vec x = gen.normal_vec(8), y = gen.normal_vec(8);
        const double lhs = oracle::dot(A.apply(x), y);
        const double rhs = oracle::dot(x, A.apply_adjoint(y));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("row access") {
    const DenseOperator A(2, 2, {1, 0, 0, 2});
    const SparseRow r = A.row(1);
    CHECK(r.indices == std::vector<std::size_t>{1});
    CHECK(r.values == Vec{2.0});
    CHECK(r.squared_norm == 4.0);

    const DenseOperator Z(2, 3, {0, 0, 0, 1, 2, 3});
    const SparseRow z = Z.row(0);
    CHECK(z.indices.empty());
    CHECK(z.squared_norm == 0.0);
}

TEST_CASE("rows reproduce the matrix and their squared norms") {
    oracle::Gen gen(5);
    const std::size_t m = 7, n = 5;
    Vec data = gen.matrix(m, n);
    for (std::size_t k = 0; k < data.size(); k += 3) data[k] = 0.0;
    const DenseOperator A(m, n, data);
    for (std::size_t i = 0; i < m; ++i) {
        const SparseRow r = A.row(i);
        Vec dense(n, 0.0);
        double sq = 0.0;
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            if (k > 0) CHECK(r.indices[k] > r.indices[k - 1]);
            dense[r.indices[k]] = r.values[k];
            sq += r.values[k] * r.values[k];
        }
        for (std::size_t j = 0; j < n; ++j) CHECK(dense[j] == A.at(i, j));
        CHECK(r.squared_norm == doctest::Approx(sq).epsilon(1e-15));
    }
}

TEST_CASE("materialize round-trips a dense operator") {
    oracle::Gen gen(3);
    const DenseOperator A(4, 6, gen.matrix(4, 6));
    const DenseOperator B = DenseOperator::materialize(A);
    CHECK(B.data() == A.data());
}

TEST_CASE("dimension and index errors") {
    const auto I = DenseOperator::identity(3);
    CHECK_THROWS_AS(I.apply(Vec{1.0, 2.0}), ContractError);
    CHECK_THROWS_AS(I.apply_adjoint(Vec{1.0}), ContractError);
    CHECK_THROWS_AS(I.row(3), ContractError);
    CHECK_THROWS_AS(DenseOperator(2, 2, Vec{1.0}), ContractError);
}
