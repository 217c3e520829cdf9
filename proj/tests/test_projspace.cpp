#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stx/builtins.hpp"
#include "stx/projspace.hpp"

#include <random>

using namespace stx;

namespace {

std::string fixture(const std::string& name)
{
    return std::string(STX_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("negative binomial coefficients mod 2")
{
    for (int i = 0; i <= 64; ++i)
        CHECK(binom_mod2(-1, i));  // the Thom class supports every square
    CHECK(!binom_mod2(2, 1));
    CHECK(binom_mod2(-9, 1));
    CHECK(binom_mod2(2, 2));
    CHECK(binom_mod2(4, 4));
    CHECK(!binom_mod2(0, 1));

    // cross-check against the signed identity C(j,i) = +-C(i-j-1, i) for j < 0
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> js(-60, -1), is(0, 40);
    for (int trial = 0; trial < 500; ++trial) {
        long long j = js(rng), i = is(rng);
        CHECK(binom_mod2(j, i) == binom2(i - j - 1, i));
    }
}

TEST_CASE("stunted modules: cells and action")
{
    auto p = stunted_module({-1, 8}, Algebra::subalgebra(2));
    CHECK(p->total_dim() == 10);
    // Sq2 x2 = x4 and Sq4 x4 = x8
    CHECK(p->gen_action(1, 2).get(0, 0));
    CHECK(p->gen_action(2, 4).get(0, 0));
    CHECK(p->validate().empty());

    // P_0^8 splits off the 0-cell: x0 is acted on trivially and never hit.
    auto p0 = stunted_module({0, 8}, Algebra::subalgebra(2));
    for (int k = 0; k < 3; ++k) {
        CHECK(p0->gen_action(k, 0).row(0).is_zero());
        CHECK(!binom_mod2(0, 1 << k));
    }
    auto p1 = stunted_module({1, 8}, Algebra::subalgebra(2));
    auto split = direct_sum({p1, FpModule::f2(p0->algebra())});
    CHECK(same_graded_dims(*split, *p0));
}

TEST_CASE("L0 and L1 match the transcribed cell diagrams")
{
    auto l0 = build_Ln(0, 41, Algebra::subalgebra(2)).L;
    auto l0fix = parse_module_file(fixture("l0.mod"));
    CHECK(same_dims_and_action(*l0, *l0fix));

    auto l1 = build_Ln(1, 41, Algebra::subalgebra(2)).L;
    auto l1fix = parse_module_file(fixture("l1.mod"));
    CHECK(same_dims_and_action(*l1, *l1fix));

    // L_n dimension count: dim L_0 + 8n in the window
    for (int n = 0; n <= 2; ++n)
        CHECK(build_Ln(n, 41, Algebra::subalgebra(2)).L->total_dim() == 5 + 8 * n);
}

TEST_CASE("M0 matches the transcribed diagram and is n-independent")
{
    auto built = build_M0(0, 41, Algebra::subalgebra(2));
    // bottom class in degree -1 hit by Sq4 into degree 3
    CHECK(built.M0->cells().front().degree == -1);
    CHECK(built.M0->gen_action(2, -1).get(0, 0));

    auto m0fix = parse_module_file(fixture("m0.mod"));
    auto m0cut = truncate_above(built.M0, 18);
    CHECK(same_dims_and_action(*m0cut, *m0fix));

    auto built1 = build_M0(1, 41, Algebra::subalgebra(2));
    CHECK(same_dims_and_action(*built.M0, *built1.M0));
    auto iso = match_cyclic_piece(built1.M0, built.M0);
    CHECK(iso.has_value());
}

TEST_CASE("filtration of H*P and its associated graded")
{
    auto a2 = Algebra::subalgebra(2);
    auto a2a1 = builtin_module("A2modA1");

    for (int n = 0; n <= 1; ++n) {
        auto f = build_filtration(n, 41, FiltrationTarget::Stunted, a2);
        CHECK(f.valid());
        auto pieces = associated_graded(f);
        REQUIRE(pieces.size() >= 2);

        // F_0(n) = Sigma^{-8n} L0
        auto l0 = suspend(builtin_module("L0"), -8 * n);
        auto iso0 = match_cyclic_piece(pieces[0], l0);
        CHECK(iso0.has_value());

        // later pieces: suspended copies of A(2)//A(1), truncated at the top
        for (std::size_t l = 1; l < pieces.size(); ++l) {
            int bottom = pieces[l]->cells().front().degree;
            auto templ = truncate_above(suspend(a2a1, bottom), 41);
            auto iso = match_cyclic_piece(pieces[l], templ);
            CHECK(iso.has_value());
        }

        // juxtaposition: piece dims sum to the module dims
        std::map<int, int> sum;
        for (const auto& p : pieces)
            for (const auto& c : p->cells())
                ++sum[c.degree];
        for (const auto& c : f.module->cells())
            --sum[c.degree];
        for (const auto& [d, v] : sum)
            CHECK(v == 0);
    }
}

TEST_CASE("filtrations of L_n and M0")
{
    auto a2 = Algebra::subalgebra(2);
    auto a2a1 = builtin_module("A2modA1");

    // Gr(L_1) has exactly one A(2)//A(1) piece beyond the L0 part
    auto fl = build_filtration(1, 41, FiltrationTarget::Ln, a2);
    CHECK(fl.valid());
    auto lpieces = associated_graded(fl);
    REQUIRE(lpieces.size() == 2);
    CHECK(match_cyclic_piece(lpieces[0], suspend(builtin_module("L0"), -8)).has_value());
    CHECK(match_cyclic_piece(lpieces[1], suspend(a2a1, -9)).has_value());

    // Gr(M0): pieces Sigma^{8k-1} A(2)//A(1)
    auto fm = build_filtration(0, 41, FiltrationTarget::M0, a2);
    CHECK(fm.valid());
    auto mpieces = associated_graded(fm);
    REQUIRE(mpieces.size() >= 5);
    for (std::size_t k = 0; k < 5; ++k) {
        auto templ = truncate_above(suspend(a2a1, 8 * int(k) - 1), 41);
        auto iso = match_cyclic_piece(mpieces[k], templ);
        CHECK(iso.has_value());
    }
}

TEST_CASE("naturality: restriction maps commute with the SES")
{
    auto a2 = Algebra::subalgebra(2);
    auto b0 = build_M0(0, 41, a2);
    auto b1 = build_M0(1, 41, a2);

    // cell-wise identity H*P_{-1} -> H*P_{-9} on the shared range
    ModuleHom res{b0.P, b1.P, {}};
    for (const auto& c : b0.P->cells()) {
        int d = c.degree;
        if (res.mats.count(d))
            continue;
        F2Matrix m(std::size_t(b1.P->dim(d)), std::size_t(b0.P->dim(d)));
        if (b1.P->dim(d))
            m.set(0, 0, true);  // both frames are single cells x^d
        res.mats.emplace(d, std::move(m));
    }
    CHECK(res.commutes_with_action());

    // L_0 -> L_1 via cell-wise identity, and the SES square commutes
    ModuleHom lres{b0.L, b1.L, {}};
    for (const auto& c : b0.L->cells()) {
        int d = c.degree;
        F2Matrix m(std::size_t(b1.L->dim(d)), std::size_t(b0.L->dim(d)));
        if (b1.L->dim(d))
            m.set(0, 0, true);
        lres.mats.emplace(d, std::move(m));
    }
    CHECK(lres.commutes_with_action());

    for (const auto& c : b0.L->cells()) {
        int d = c.degree;
        auto lhs = res.matrix(d).mul(b0.inclusion.matrix(d));
        auto rhs = b1.inclusion.matrix(d).mul(lres.matrix(d));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("module-level James periodicity")
{
    auto a2 = Algebra::subalgebra(2);
    // H*P_{-9} in [a-8, b-8] suspended by 8 equals H*P_{-1} in [a, b]
    auto upper = stunted_module({-1, 24}, a2);
    auto lower = suspend(stunted_module({-9, 16}, a2), 8);
    CHECK(same_dims_and_action(*upper, *lower));
}
