#include "stx/builtins.hpp"

#include "stx/projspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace stx {

namespace {

constexpr int kDefaultTop = 41;
constexpr int kDefaultAmodA1Top = 48;

ModulePtr parse_p_range(const std::string& name, std::shared_ptr<const Algebra> algebra)
{
    // "P:<m>:<n>"
    auto c1 = name.find(':');
    auto c2 = name.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("expected P:<m>:<n>");
    int m = std::stoi(name.substr(c1 + 1, c2 - c1 - 1));
    int n = std::stoi(name.substr(c2 + 1));
    return stunted_module({m, n, false}, std::move(algebra));
}

}  // namespace

ModulePtr build_a2_mod_a1()
{
    auto a2 = Algebra::subalgebra(2);

    // Span of { b*Sq^1, b*Sq^2 : b in A(2) } per degree; survivors are the
    // non-pivot coordinates.
    std::map<int, EchelonBasis> ideal;
    for (int d = 0; d <= a2->top_degree(); ++d)
        ideal.emplace(d, EchelonBasis(std::size_t(a2->dim(d))));
    for (int d = 0; d <= a2->top_degree(); ++d) {
        for (int i = 0; i < a2->dim(d); ++i) {
            for (int g : {1, 2}) {
                if (d + g > a2->top_degree())
                    continue;
                auto prod = multiply(a2->basis_element(d, i), SteenrodElement::sq(g));
                if (prod.is_zero())
                    continue;
                ideal.at(d + g).insert(a2->coordinates(prod));
            }
        }
    }

    std::map<int, std::vector<int>> keep;
    std::vector<Cell> cells;
    for (int d = 0; d <= a2->top_degree(); ++d) {
        std::vector<bool> pivot(std::size_t(a2->dim(d)), false);
        for (int p : ideal.at(d).pivots())
            pivot[std::size_t(p)] = true;
        for (int i = 0; i < a2->dim(d); ++i) {
            if (pivot[std::size_t(i)])
                continue;
            keep[d].push_back(i);
            cells.push_back({"e" + std::to_string(d), d});
        }
    }

    auto to_classes = [&](int d, F2Vector v) {
        v = ideal.at(d).reduce(std::move(v));
        const auto& kp = keep.count(d) ? keep.at(d) : std::vector<int>{};
        F2Vector out(kp.size());
        for (std::size_t i = 0; i < kp.size(); ++i)
            if (v.get(std::size_t(kp[i])))
                out.set(i, true);
        return out;
    };

    std::map<std::pair<int, int>, F2Matrix> action;
    for (std::size_t k = 0; k < a2->generator_degrees().size(); ++k) {
        int g = a2->generator_degrees()[k];
        for (const auto& [d, kp] : keep) {
            if (!keep.count(d + g))
                continue;
            F2Matrix mat(keep.at(d + g).size(), kp.size());
            for (std::size_t c = 0; c < kp.size(); ++c) {
                auto col = a2->generator_mult(int(k), d).mul_vec(
                    F2Vector::unit(std::size_t(a2->dim(d)), std::size_t(kp[c])));
                auto cls = to_classes(d + g, std::move(col));
                for (std::size_t r = 0; r < cls.size(); ++r)
                    if (cls.get(r))
                        mat.set(r, c, true);
            }
            action.emplace(std::make_pair(int(k), d), std::move(mat));
        }
    }
    return FpModule::make(a2, std::move(cells), std::move(action), 0, 17, WindowKind::Exact);
}

ModulePtr builtin_module(const std::string& name, int top, std::shared_ptr<const Algebra> algebra)
{
    if (!algebra)
        algebra = Algebra::subalgebra(2);

    if (name == "F2")
        return FpModule::f2(algebra);
    if (name == "L0")
        return build_Ln(0, top ? top : kDefaultTop, algebra).L;
    if (name == "L1")
        return build_Ln(1, top ? top : kDefaultTop, algebra).L;
    if (name == "L2")
        return build_Ln(2, top ? top : kDefaultTop, algebra).L;
    if (name == "L") {
        // The wedge complement of the bottom split S^0 inside L_0: the
        // submodule generated by the degree-1 cell.
        auto l0 = build_Ln(0, top ? top : kDefaultTop, algebra).L;
        return submodule_generated(l0, {l0->cell_index("x1")}).first;
    }
    if (name == "M0")
        return build_M0(0, top ? top : kDefaultTop, algebra).M0;
    if (name == "A2modA1") {
        auto m = build_a2_mod_a1();
        if (algebra->generator_degrees() != m->algebra()->generator_degrees())
            m = restrict_algebra(m, algebra);
        return m;
    }
    if (name == "LtensorDL0") {
        auto l0 = build_Ln(0, top ? top : kDefaultTop, algebra).L;
        return tensor(l0, dual(l0));
    }
    if (name == "AmodA1") {
        int cap = top ? top : kDefaultAmodA1Top;
        auto ind = induced_module(FpModule::f2(Algebra::subalgebra(1)), cap);
        return restrict_algebra(ind.extended, Algebra::subalgebra(1));
    }
    if (name.rfind("P:", 0) == 0)
        return parse_p_range(name, algebra);
    throw std::invalid_argument("unknown builtin " + name);
}

bool is_builtin_name(const std::string& name)
{
    if (name.rfind("P:", 0) == 0)
        return true;
    static const std::vector<std::string> names = builtin_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::string> builtin_names()
{
    return {"F2", "L", "L0", "L1", "L2", "M0", "A2modA1", "LtensorDL0", "AmodA1"};
}

}  // namespace stx
