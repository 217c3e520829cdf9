#pragma once

#include "stx/fpmodule.hpp"

// Cohomology of stunted real projective spaces as modules over A, A(2),
// A(1), including negative cells, and the derived modules L_n and M_0 with
// their short exact sequence and filtration.

namespace stx {

struct StuntedRange {
    int bottom;  // lowest cell
    int top;     // highest cell kept
    bool truncated_above = false;  // top is a window cap, not a real edge
};

// Mod-2 binomial coefficient C(j, i), extended to negative j by the 2-adic
// digit rule: 1 iff every binary digit of i is at most the matching 2-adic
// digit of j.
bool binom_mod2(long long j, long long i);

// Cells x^j for r.bottom <= j <= r.top with Sq^i x^j = C(j, i) x^{i+j}.
ModulePtr stunted_module(const StuntedRange& r, std::shared_ptr<const Algebra> algebra);

// L_n together with its inclusion into H*P_{-8n-1} (window [-8n-1, window_top]).
// L_0 is generated by the cells in degrees 0 and 1; L_n (n > 0) by all cells
// of degree at most -2.
struct LnResult {
    ModulePtr L;
    ModulePtr P;  // the ambient stunted module
    ModuleHom inclusion;
};
LnResult build_Ln(int n, int window_top, std::shared_ptr<const Algebra> algebra);

// The quotient M_0 = H*P_{-8n-1} / L_n with projection, plus the inclusion.
struct M0Result {
    ModulePtr M0;
    ModulePtr P;
    ModulePtr L;
    ModuleHom inclusion;   // L -> P
    ModuleHom projection;  // P -> M0
};
M0Result build_M0(int n, int window_top, std::shared_ptr<const Algebra> algebra);

enum class FiltrationTarget { Stunted, Ln, M0 };

// The increasing filtration F_l(n) generated by {p_{-8n}, p_{-8n+1}} and the
// cells p_{-8n+8i-1}, restricted to L_n or imaged in M_0 as requested.
Filtration build_filtration(int n, int window_top, FiltrationTarget target,
                            std::shared_ptr<const Algebra> algebra);

}  // namespace stx
