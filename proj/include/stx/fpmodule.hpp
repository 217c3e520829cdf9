#pragma once

#include "stx/f2linalg.hpp"
#include "stx/steenrod.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

// Graded F2 modules over an Algebra with explicit bases and validated action
// matrices for the generators Sq^{2^k}, plus the constructors used by the
// projective-space builders: dual, tensor, suspension, submodule, quotient,
// direct sum, induced module, filtrations and associated graded pieces.

namespace stx {

enum class WindowKind { Exact, TruncatedAbove, TruncatedBelow };

struct Cell {
    std::string name;
    int degree = 0;
    bool operator==(const Cell&) const = default;
};

struct Violation {
    std::string cell;
    std::string relation;
    std::string detail;
};

class FpModule;
using ModulePtr = std::shared_ptr<const FpModule>;

// Degree-preserving module homomorphism, given per-degree by matrices from
// source coordinates to target coordinates.
struct ModuleHom {
    ModulePtr source;
    ModulePtr target;
    std::map<int, F2Matrix> mats;  // degree d -> dim_target(d) x dim_source(d)

    const F2Matrix& matrix(int degree) const;
    F2Vector apply(int degree, const F2Vector& v) const;
    bool commutes_with_action() const;
    bool is_injective() const;
    bool is_degreewise_bijective() const;
};

class FpModule : public std::enable_shared_from_this<FpModule> {
public:
    FpModule(std::shared_ptr<const Algebra> algebra, std::vector<Cell> cells,
             std::map<std::pair<int, int>, F2Matrix> gen_action, int lo, int hi,
             WindowKind window);

    static ModulePtr make(std::shared_ptr<const Algebra> algebra, std::vector<Cell> cells,
                          std::map<std::pair<int, int>, F2Matrix> gen_action, int lo, int hi,
                          WindowKind window);

    // Single F2 in degree 0.
    static ModulePtr f2(std::shared_ptr<const Algebra> algebra);

    const std::shared_ptr<const Algebra>& algebra() const { return algebra_; }
    const std::vector<Cell>& cells() const { return cells_; }
    int total_dim() const { return int(cells_.size()); }
    int dim(int degree) const;
    const std::vector<int>& cells_in_degree(int degree) const;
    int cell_index(const std::string& name) const;  // -1 when absent

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    WindowKind window() const { return window_; }
    bool is_exact() const { return window_ == WindowKind::Exact; }

    // Action of the generator Sq^{2^k} from degree d: dim(d+2^k) x dim(d).
    const F2Matrix& gen_action(int k, int degree) const;

    // Operator of Sq^i from degree d, via the canonical generator-word
    // expansion driven by the Adem relations.  Generators the algebra does
    // not carry act as zero.
    const F2Matrix& sq_op(int i, int degree) const;

    // Operator of a whole element (sum of admissible monomials) from degree d.
    F2Matrix element_op(const SteenrodElement& e, int degree) const;

    // Operator of the algebra basis element (bdeg, bidx) from degree d.
    const F2Matrix& basis_op(int bdeg, int bidx, int degree) const;

    // Empty iff the generator actions extend to a genuine algebra action on
    // the window (checked through the multiplicative closure of the basis)
    // and all matrix shapes match the degree shifts.
    std::vector<Violation> validate() const;

    // Minimal generators: cell-coordinate vectors per degree spanning
    // M / (augmentation ideal * M), in ascending degree order.
    std::vector<std::pair<int, F2Vector>> minimal_generators() const;

    std::string canonical_text() const;  // module definition file contents

private:
    std::shared_ptr<const Algebra> algebra_;
    std::vector<Cell> cells_;  // sorted by (degree, name)
    std::map<int, std::vector<int>> by_degree_;
    mutable std::map<std::pair<int, int>, F2Matrix> gen_action_;  // (k, degree)
    int lo_, hi_;
    WindowKind window_;

    mutable std::map<std::pair<int, int>, F2Matrix> sq_op_cache_;
    mutable std::map<std::tuple<int, int, int>, F2Matrix> basis_op_cache_;
    mutable std::mutex op_mutex_;
};

// --- constructors -----------------------------------------------------------

// Vector-space dual with the antipode-twisted action; requires an exact
// finite module.
ModulePtr dual(const ModulePtr& m);

// Diagonal (Cartan) action on pairs; both factors over the same algebra.
ModulePtr tensor(const ModulePtr& a, const ModulePtr& b);

ModulePtr suspend(const ModulePtr& m, int k);

// Truncate above: kill all cells in degrees > top (a quotient module).
ModulePtr truncate_above(const ModulePtr& m, int top);

// Restrict the module to a smaller algebra (same generator matrices).
ModulePtr restrict_algebra(const ModulePtr& m, std::shared_ptr<const Algebra> algebra);

// Extend an A(n)-module to truncated A with the missing generators acting as
// zero; validity is the caller's concern (validate() checks it).
ModulePtr extend_to_truncated(const ModulePtr& m, int cap);

// Smallest action-closed subspace containing the given cells.
std::pair<ModulePtr, ModuleHom> submodule_generated(const ModulePtr& m,
                                                    const std::vector<int>& gen_cells);

// Cokernel of an injective hom, with the induced action.
std::pair<ModulePtr, ModuleHom> quotient(const ModulePtr& m, const ModuleHom& sub);

ModulePtr direct_sum(const std::vector<ModulePtr>& ms);

// A (x)_{A(n)} M up to degree cap together with the diagonal-action model
// A//A(n) (x) M and the coproduct map Phi between them.
struct InducedModule {
    ModulePtr extended;  // A (x)_{A(n)} M over truncated A
    ModulePtr diagonal;  // A//A(n) (x) M over truncated A, diagonal action
    ModuleHom phi;       // diagonal -> extended, Phi(a (x) m) = sum a' (x) a''m
};
InducedModule induced_module(const ModulePtr& m, int cap);

// Increasing filtration by action-closed cell sets.
struct Filtration {
    ModulePtr module;
    std::vector<std::vector<int>> stages;  // nested cell-index sets, ascending
    bool valid() const;
};

std::vector<ModulePtr> associated_graded(const Filtration& f);

// Constructive template matching: build the space of degree-0 module maps
// template -> m and search it for a degreewise isomorphism.
std::optional<ModuleHom> match_cyclic_piece(const ModulePtr& m, const ModulePtr& templ);

// Graded dimensions agree on the union of supports.
bool same_graded_dims(const FpModule& a, const FpModule& b);

// Equal cells-per-degree and equal action matrices (names ignored).
bool same_dims_and_action(const FpModule& a, const FpModule& b);

// --- module definition files -------------------------------------------------
//   algebra A1 | A2 | A cap=<int>
//   gen <name> <degree>
//   sq <k> <name> = <name> [+ <name> ...] | 0
//   window <lo> <hi> [truncated-above|truncated-below|exact]
ModulePtr parse_module(std::istream& in);
ModulePtr parse_module_file(const std::string& path);
void write_module_file(const FpModule& m, const std::string& path);

}  // namespace stx
