#pragma once

#include "stx/fpmodule.hpp"

#include <string>
#include <vector>

// Registry of the modules the command line and the verification suites work
// with, so nobody has to author module files for them by hand.

namespace stx {

// Names: F2, L, L0, L1, L2, M0, A2modA1, LtensorDL0, AmodA1, P:<m>:<n>.
// `top` bounds windowed constructions (L*, M0, AmodA1); pass 0 for defaults.
ModulePtr builtin_module(const std::string& name, int top = 0,
                         std::shared_ptr<const Algebra> algebra = nullptr);

bool is_builtin_name(const std::string& name);
std::vector<std::string> builtin_names();

// A(2)//A(1): the quotient of A(2) by the left ideal generated by Sq^1, Sq^2.
ModulePtr build_a2_mod_a1();

}  // namespace stx
