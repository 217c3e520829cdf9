#include "stx/projspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace stx {

bool binom_mod2(long long j, long long i)
{
    if (i < 0)
        return false;
    // Two's complement supplies the 2-adic digits of negative j.
    return (static_cast<unsigned long long>(j) & static_cast<unsigned long long>(i)) ==
           static_cast<unsigned long long>(i);
}

ModulePtr stunted_module(const StuntedRange& r, std::shared_ptr<const Algebra> algebra)
{
    if (r.bottom > r.top)
        throw std::invalid_argument("stunted range with bottom > top");

    std::vector<Cell> cells;
    for (int j = r.bottom; j <= r.top; ++j)
        cells.push_back({"x" + std::to_string(j), j});

    std::map<std::pair<int, int>, F2Matrix> action;
    const auto& gens = algebra->generator_degrees();
    for (std::size_t k = 0; k < gens.size(); ++k) {
        int g = gens[k];
        for (int j = r.bottom; j + g <= r.top; ++j) {
            if (!binom_mod2(j, g))
                continue;
            F2Matrix m(1, 1);
            m.set(0, 0, true);
            action.emplace(std::make_pair(int(k), j), std::move(m));
        }
    }
    return FpModule::make(std::move(algebra), std::move(cells), std::move(action), r.bottom, r.top,
                          r.truncated_above ? WindowKind::TruncatedAbove : WindowKind::Exact);
}

LnResult build_Ln(int n, int window_top, std::shared_ptr<const Algebra> algebra)
{
    if (window_top < 8)
        throw std::invalid_argument("build_Ln wants window_top >= 8");
    int bottom = -8 * n - 1;
    auto P = stunted_module({bottom, window_top, true}, algebra);

    std::vector<int> gens;
    if (n == 0) {
        gens.push_back(P->cell_index("x0"));
        gens.push_back(P->cell_index("x1"));
    } else {
        for (const auto& c : P->cells())
            if (c.degree <= -2)
                gens.push_back(P->cell_index(c.name));
    }
    auto [L, incl] = submodule_generated(P, gens);
    // L_n is finite: its cells stop at degree 8, so the window is exact.
    std::map<std::pair<int, int>, F2Matrix> act;
    for (std::size_t k = 0; k < L->algebra()->generator_degrees().size(); ++k)
        for (const auto& c : L->cells())
            if (L->dim(c.degree + L->algebra()->generator_degrees()[k]))
                act.emplace(std::make_pair(int(k), c.degree), L->gen_action(int(k), c.degree));
    auto Lfin = FpModule::make(L->algebra(), L->cells(), std::move(act), bottom, 8,
                               WindowKind::Exact);
    ModuleHom inclusion{Lfin, P, incl.mats};
    return {Lfin, P, std::move(inclusion)};
}

M0Result build_M0(int n, int window_top, std::shared_ptr<const Algebra> algebra)
{
    auto ln = build_Ln(n, window_top, std::move(algebra));
    auto [M0, proj] = quotient(ln.P, ln.inclusion);
    return {M0, ln.P, ln.L, std::move(ln.inclusion), std::move(proj)};
}

Filtration build_filtration(int n, int window_top, FiltrationTarget target,
                            std::shared_ptr<const Algebra> algebra)
{
    auto built = build_M0(n, window_top, algebra);
    const auto& P = built.P;

    // Stage l is generated by {p_{-8n}, p_{-8n+1}} plus p_{-8n+8i-1} for i < l.
    std::vector<std::vector<int>> stage_cells;  // P-cell index sets
    std::vector<int> gens{P->cell_index("x" + std::to_string(-8 * n)),
                          P->cell_index("x" + std::to_string(-8 * n + 1))};
    for (int l = 0;; ++l) {
        if (l > 0) {
            int d = -8 * n + 8 * (l - 1) - 1;
            if (d > window_top)
                break;
            gens.push_back(P->cell_index("x" + std::to_string(d)));
        }
        auto [sub, incl] = submodule_generated(P, gens);
        std::vector<int> cells;
        for (const auto& c : sub->cells())
            cells.push_back(P->cell_index(c.name));
        std::sort(cells.begin(), cells.end());
        stage_cells.push_back(cells);
        if (int(cells.size()) == P->total_dim())
            break;
    }

    Filtration out;
    if (target == FiltrationTarget::Stunted) {
        out.module = P;
        out.stages = stage_cells;
        return out;
    }
    if (target == FiltrationTarget::Ln) {
        out.module = built.L;
        for (const auto& stage : stage_cells) {
            std::vector<int> restricted;
            for (int c : stage) {
                int idx = built.L->cell_index(P->cells()[std::size_t(c)].name);
                if (idx >= 0)
                    restricted.push_back(idx);
            }
            std::sort(restricted.begin(), restricted.end());
            if (out.stages.empty() || restricted != out.stages.back())
                out.stages.push_back(restricted);
        }
        return out;
    }
    // Image q(F_l) in M0: the surviving cells of each stage.
    out.module = built.M0;
    for (const auto& stage : stage_cells) {
        std::vector<int> image;
        for (int c : stage) {
            int idx = built.M0->cell_index(P->cells()[std::size_t(c)].name);
            if (idx >= 0)
                image.push_back(idx);
        }
        std::sort(image.begin(), image.end());
        if (!image.empty() && (out.stages.empty() || image != out.stages.back()))
            out.stages.push_back(image);
    }
    return out;
}

}  // namespace stx
