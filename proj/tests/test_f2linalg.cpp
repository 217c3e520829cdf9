#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stx/f2linalg.hpp"

#include <random>
#include <vector>

using namespace stx;

namespace {

// Independent oracle: plain O(n^3) elimination on vector<vector<bool>>.
std::size_t naive_rank(std::vector<std::vector<bool>> m)
{
    if (m.empty())
        return 0;
    std::size_t rows = m.size(), cols = m[0].size(), r = 0, rk = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !m[p][c])
            ++p;
        if (p == rows)
            continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && m[i][c])
                for (std::size_t j = 0; j < cols; ++j)
                    m[i][j] = m[i][j] ^ m[r][j];
        ++r;
        ++rk;
    }
    return rk;
}

F2Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols)
{
    F2Matrix m(rows, cols);
    std::uniform_int_distribution<int> bit(0, 1);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m.set(r, c, bit(rng));
    return m;
}

std::vector<std::vector<bool>> to_bools(const F2Matrix& m)
{
    std::vector<std::vector<bool>> out(m.rows(), std::vector<bool>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            out[r][c] = m.get(r, c);
    return out;
}

F2Vector vector_from_bits(std::size_t len, unsigned long long bits)
{
    F2Vector v(len);
    for (std::size_t i = 0; i < len; ++i)
        if ((bits >> i) & 1u)
            v.set(i, true);
    return v;
}

}  // namespace

TEST_CASE("row_reduce on the identity")
{
    auto m = F2Matrix::identity(2);
    auto rr = row_reduce(m);
    CHECK(rr.rref == m);
    CHECK(rr.pivots == std::vector<std::size_t>{0, 1});
    CHECK(rr.rank == 2);
}

TEST_CASE("row_reduce kills duplicate rows")
{
    F2Matrix m(2, 2);
    m.set(0, 0, true);
    m.set(0, 1, true);
    m.set(1, 0, true);
    m.set(1, 1, true);
    auto rr = row_reduce(m);
    CHECK(rr.rank == 1);
    CHECK(rr.rref.get(0, 0));
    CHECK(rr.rref.get(0, 1));
    CHECK(rr.rref.row(1).is_zero());
}

TEST_CASE("rank agrees with the naive oracle and with the transpose")
{
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 30; ++trial) {
        auto m = random_matrix(rng, 20, 20);
        auto rk = rank(m);
        CHECK(rk == naive_rank(to_bools(m)));
        CHECK(rk == rank(m.transpose()));
    }
}

TEST_CASE("row_reduce is idempotent")
{
    std::mt19937 rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_matrix(rng, 9, 13);
        auto rr = row_reduce(m);
        auto rr2 = row_reduce(rr.rref);
        CHECK(rr2.rref == rr.rref);
        CHECK(rr2.pivots == rr.pivots);
    }
}

TEST_CASE("kernel of the identity is empty, kernel of zero is everything")
{
    CHECK(kernel_basis(F2Matrix::identity(4)).rows() == 0);
    CHECK(kernel_basis(F2Matrix(3, 3)).rows() == 3);
}

TEST_CASE("kernel basis: exhaustive check up to 12 columns")
{
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t cols = 1 + trial % 12;
        std::size_t rows = 1 + (trial * 7) % 10;
        auto m = random_matrix(rng, rows, cols);
        auto ker = kernel_basis(m);

        for (std::size_t i = 0; i < ker.rows(); ++i)
            CHECK(m.mul_vec(ker.row(i)).is_zero());
        CHECK(ker.rows() == cols - rank(m));  // rank-nullity

        // Exhaustive: the number of kernel vectors must be 2^dim.
        std::size_t count = 0;
        for (unsigned long long bits = 0; bits < (1ull << cols); ++bits)
            if (m.mul_vec(vector_from_bits(cols, bits)).is_zero())
                ++count;
        CHECK(count == (1ull << ker.rows()));
    }
}

TEST_CASE("solve: identity, unsolvable, and random solvable systems")
{
    auto id = F2Matrix::identity(5);
    auto b = vector_from_bits(5, 0b10110);
    auto x = solve(id, b);
    REQUIRE(x.has_value());
    CHECK(*x == b);

    // b nonzero, m zero: no solution.
    CHECK(!solve(F2Matrix(3, 3), vector_from_bits(3, 0b1)).has_value());

    CHECK_THROWS_AS((void)solve(F2Matrix(3, 2), F2Vector(2)), std::invalid_argument);

    std::mt19937 rng(999);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t cols = 1 + trial % 12;
        std::size_t rows = 1 + (trial * 5) % 12;
        auto m = random_matrix(rng, rows, cols);
        std::uniform_int_distribution<unsigned long long> some(0, (1ull << cols) - 1);
        auto x0 = vector_from_bits(cols, some(rng));
        auto rhs = m.mul_vec(x0);
        auto got = solve(m, rhs);
        REQUIRE(got.has_value());
        CHECK(m.mul_vec(*got) == rhs);  // solve(m, m*x) reproduces m*x
    }
}

TEST_CASE("solve detects membership exactly (brute force over all x)")
{
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 15; ++trial) {
        std::size_t cols = 1 + trial % 8;
        std::size_t rows = 1 + (trial * 3) % 8;
        auto m = random_matrix(rng, rows, cols);
        for (unsigned long long bbits = 0; bbits < (1ull << rows); ++bbits) {
            auto b = vector_from_bits(rows, bbits);
            bool solvable = false;
            for (unsigned long long xbits = 0; xbits < (1ull << cols) && !solvable; ++xbits)
                solvable = m.mul_vec(vector_from_bits(cols, xbits)) == b;
            CHECK(solve(m, b).has_value() == solvable);
        }
    }
}

TEST_CASE("echelon basis reduces and inserts consistently")
{
    std::mt19937 rng(5150);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t cols = 10;
        EchelonBasis eb(cols);
        std::vector<F2Vector> inserted;
        std::uniform_int_distribution<unsigned long long> some(0, (1ull << cols) - 1);
        for (int i = 0; i < 20; ++i) {
            auto v = vector_from_bits(cols, some(rng));
            eb.insert(v);
            inserted.push_back(v);
        }
        F2Matrix m(0, cols);
        for (auto& v : inserted)
            m.append_row(v);
        CHECK(eb.dim() == rank(m));
        for (auto& v : inserted)
            CHECK(eb.contains(v));
    }
}

TEST_CASE("express_in finds coordinates in a spanning set")
{
    std::vector<F2Vector> basis{vector_from_bits(4, 0b0011), vector_from_bits(4, 0b0110)};
    auto c = express_in(basis, vector_from_bits(4, 0b0101));
    REQUIRE(c.has_value());
    CHECK(c->get(0));
    CHECK(c->get(1));
    CHECK(!express_in(basis, vector_from_bits(4, 0b1000)).has_value());
}
