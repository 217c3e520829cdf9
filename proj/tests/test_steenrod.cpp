#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stx/steenrod.hpp"

#include <random>

using namespace stx;

namespace {

std::vector<int> random_word(std::mt19937& rng, int max_degree)
{
    std::uniform_int_distribution<int> len(1, 5);
    std::vector<int> w;
    int budget = max_degree;
    int n = len(rng);
    for (int i = 0; i < n && budget > 0; ++i) {
        std::uniform_int_distribution<int> e(1, std::min(8, budget));
        int x = e(rng);
        w.push_back(x);
        budget -= x;
    }
    return w;
}

SteenrodElement elem(const std::vector<int>& word)
{
    return adem_normalize(word);
}

}  // namespace

TEST_CASE("admissibility and string round trips")
{
    CHECK(is_admissible({}));
    CHECK(is_admissible({3, 1}));
    CHECK(!is_admissible({1, 1}));
    CHECK(mono_to_string({3, 1}) == "Sq3Sq1");
    CHECK(mono_from_string("Sq3Sq1") == Mono{3, 1});
    CHECK(mono_from_string("1") == Mono{});
    auto e = SteenrodElement::from_string("Sq4+Sq3Sq1");
    CHECK(e.to_string() == "Sq3Sq1+Sq4");
    CHECK(SteenrodElement::from_string(e.to_string()) == e);
}

TEST_CASE("Adem normalization of small words")
{
    CHECK(adem_normalize({1, 1}).is_zero());
    CHECK(adem_normalize({1, 2}) == SteenrodElement::sq(3));
    CHECK(adem_normalize({2, 2}) == SteenrodElement(Mono{3, 1}));
    // already admissible words pass through
    CHECK(adem_normalize({3, 1}) == SteenrodElement(Mono{3, 1}));
    CHECK(adem_normalize({}) == SteenrodElement::unit());
    CHECK(adem_normalize({0, 2, 0}) == SteenrodElement::sq(2));
}

TEST_CASE("Adem rewriting is confluent (leftmost vs random order)")
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        auto w = random_word(rng, 20);
        auto left = adem_normalize(w);
        auto rnd = adem_normalize_random(w, 9000 + unsigned(trial));
        CHECK(left == rnd);
        for (const auto& t : left.terms())
            CHECK(is_admissible(t));
    }
}

TEST_CASE("multiplication: unit, Sq2*Sq2, associativity")
{
    auto x = elem({5, 2});
    CHECK(multiply(SteenrodElement::unit(), x) == x);
    CHECK(multiply(x, SteenrodElement::unit()) == x);
    CHECK(multiply(SteenrodElement::sq(2), SteenrodElement::sq(2)) == SteenrodElement(Mono{3, 1}));

    std::mt19937 rng(55);
    for (int trial = 0; trial < 60; ++trial) {
        auto a = elem(random_word(rng, 8));
        auto b = elem(random_word(rng, 6));
        auto c = elem(random_word(rng, 6));
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
    }
}

TEST_CASE("Cartan pairs of the coproduct")
{
    auto c0 = coproduct_sq(0);
    REQUIRE(c0.size() == 1);
    CHECK(c0[0].first.is_unit());
    CHECK(c0[0].second.is_unit());

    auto c1 = coproduct_sq(1);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0].first.is_unit());
    CHECK(c1[0].second == SteenrodElement::sq(1));
    CHECK(c1[1].first == SteenrodElement::sq(1));
    CHECK(c1[1].second.is_unit());

    auto c2 = coproduct_sq(2);
    REQUIRE(c2.size() == 3);
    CHECK(c2[1].first == SteenrodElement::sq(1));
    CHECK(c2[1].second == SteenrodElement::sq(1));
}

TEST_CASE("coproduct is coassociative on monomials up to degree 16")
{
    // Compare (Delta x 1)Delta with (1 x Delta)Delta, coordinatewise on
    // triples of admissible monomials.
    std::mt19937 rng(808);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = elem(random_word(rng, 16));
        if (m.is_zero())
            continue;
        const Mono mono = m.terms().front();

        std::set<std::array<Mono, 3>> lhs, rhs;
        auto toggle = [](std::set<std::array<Mono, 3>>& acc, std::array<Mono, 3> key) {
            auto it = acc.find(key);
            if (it != acc.end())
                acc.erase(it);
            else
                acc.insert(std::move(key));
        };
        for (const auto& [l, r] : coproduct_monomial(mono)) {
            for (const auto& [a, b] : coproduct_monomial(l))
                toggle(lhs, {a, b, r});
            for (const auto& [b, c] : coproduct_monomial(r))
                toggle(rhs, {l, b, c});
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("antipode values and Hopf identities")
{
    CHECK(antipode_sq(0) == SteenrodElement::unit());
    CHECK(antipode_sq(1) == SteenrodElement::sq(1));
    CHECK(antipode_sq(2) == SteenrodElement::sq(2));
    CHECK(antipode_sq(3) == SteenrodElement(Mono{2, 1}));

    // sum_i Sq^i chi(Sq^{n-i}) = 0 for 1 <= n <= 16
    for (int n = 1; n <= 16; ++n) {
        SteenrodElement acc;
        for (int i = 0; i <= n; ++i)
            acc = acc + multiply(SteenrodElement::sq(i), antipode_sq(n - i));
        CHECK(acc.is_zero());
    }

    // chi is an involution on monomials of degree <= 16
    std::mt19937 rng(616);
    for (int trial = 0; trial < 40; ++trial) {
        auto m = elem(random_word(rng, 16));
        CHECK(antipode(antipode(m)) == m);
    }
}

TEST_CASE("A(1) and A(2) bases by multiplicative closure")
{
    auto a1 = Algebra::subalgebra(1);
    CHECK(a1->total_dim() == 8);
    CHECK(a1->top_degree() == 6);
    CHECK(a1->dim(6) == 1);
    CHECK(a1->dim(7) == 0);
    CHECK(a1->dim(3) == 2);
    // 2^{(n+1)(n+2)/2} with n = 1
    CHECK(a1->total_dim() == (1 << 3));

    auto a2 = Algebra::subalgebra(2);
    CHECK(a2->total_dim() == 64);
    CHECK(a2->top_degree() == 23);
    CHECK(a2->dim(23) == 1);
    CHECK(a2->total_dim() == (1 << 6));
    // Poincare duality of the finite Hopf algebra
    for (int d = 0; d <= 23; ++d)
        CHECK(a2->dim(d) == a2->dim(23 - d));
}

TEST_CASE("truncated A basis tables")
{
    auto a = Algebra::truncated(3);
    CHECK(a->dim(0) == 1);
    CHECK(a->dim(1) == 1);
    CHECK(a->dim(2) == 1);
    CHECK(a->dim(3) == 2);  // Sq3 and Sq2Sq1
    CHECK(a->basis_element(3, 0).to_string() == "Sq2Sq1");
    CHECK(a->basis_element(3, 1).to_string() == "Sq3");
    CHECK(a->dim(4) == 0);  // beyond the cap

    auto b = Algebra::truncated(12);
    // dim A_d equals the number of admissible monomials of degree d
    CHECK(b->dim(7) == 4);  // Sq7, Sq6Sq1, Sq5Sq2, Sq4Sq2Sq1
}

TEST_CASE("generator and basis multiplication tables are consistent")
{
    for (auto alg : {Algebra::subalgebra(1), Algebra::subalgebra(2)}) {
        // For every basis element b and generator g: the matrix of g*b equals
        // generator matrix composed with the basis matrix.
        for (int d = 0; d <= alg->top_degree(); ++d) {
            for (int i = 0; i < alg->dim(d); ++i) {
                for (std::size_t k = 0; k < alg->generator_degrees().size(); ++k) {
                    int g = alg->generator_degrees()[k];
                    auto prod = multiply(SteenrodElement::sq(g), alg->basis_element(d, i));
                    if (d + g > alg->top_degree()) {
                        CHECK(prod.is_zero());
                        continue;
                    }
                    auto col = alg->coordinates(alg->basis_element(d, i));
                    auto res = alg->generator_mult(int(k), d).mul_vec(col);
                    CHECK(alg->element_from_coordinates(d + g, res) == prod);
                }
            }
        }
    }
}

TEST_CASE("basis_mult composes with products in truncated A")
{
    auto a = Algebra::truncated(14);
    // (Sq^b * Sq^a) acting on degree-d coordinates equals multiplying out.
    std::mt19937 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> dd(0, 5), bb(1, 6), ii(0, 100);
        int d = dd(rng), bdeg = bb(rng);
        if (a->dim(d) == 0 || a->dim(bdeg) == 0)
            continue;
        int bidx = ii(rng) % a->dim(bdeg);
        int j = ii(rng) % a->dim(d);
        auto expected = multiply(a->basis_element(bdeg, bidx), a->basis_element(d, j));
        // drop terms beyond the cap
        SteenrodElement trimmed;
        if (d + bdeg <= a->cap())
            trimmed = expected;
        auto col = F2Vector::unit(std::size_t(a->dim(d)), std::size_t(j));
        auto res = a->basis_mult(bdeg, bidx, d).mul_vec(col);
        CHECK(a->element_from_coordinates(d + bdeg, res) == trimmed);
    }
}
