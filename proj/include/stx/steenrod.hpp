#pragma once

#include "stx/f2linalg.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

// Arithmetic in the mod-2 Steenrod algebra and its sub-Hopf algebras A(1),
// A(2): admissible normal forms via the Adem relations, products, coproduct,
// antipode, and per-degree basis tables.

namespace stx {

// C(m, n) mod 2 for m, n >= 0 by Lucas' theorem (digitwise).
inline bool binom2(long long m, long long n)
{
    if (n < 0 || m < n)
        return false;
    return (static_cast<unsigned long long>(m) & static_cast<unsigned long long>(n)) ==
           static_cast<unsigned long long>(n);
}

// Exponent sequence of an admissible monomial Sq^{i1}...Sq^{ik}; the empty
// sequence is the unit.  Admissible means i_j >= 2*i_{j+1}.
using Mono = std::vector<int>;

bool is_admissible(const Mono& m);
int mono_degree(const Mono& m);
std::string mono_to_string(const Mono& m);    // "Sq3Sq1", unit is "1"
Mono mono_from_string(const std::string& s);  // inverse of the above

// F2 sum of admissible monomials, all of the same degree.  Zero is the empty
// term set.
class SteenrodElement {
public:
    SteenrodElement() = default;
    explicit SteenrodElement(Mono m) : terms_{std::move(m)} {}
    static SteenrodElement unit() { return SteenrodElement(Mono{}); }
    static SteenrodElement sq(int n);  // Sq^n as a single monomial; Sq^0 = 1

    bool is_zero() const { return terms_.empty(); }
    bool is_unit() const { return terms_.size() == 1 && terms_[0].empty(); }
    int degree() const { return terms_.empty() ? -1 : mono_degree(terms_[0]); }

    const std::vector<Mono>& terms() const { return terms_; }
    bool has_term(const Mono& m) const;

    void add_term(const Mono& m);  // XOR a monomial in (F2 coefficients)
    SteenrodElement operator+(const SteenrodElement& other) const;

    bool operator==(const SteenrodElement& other) const = default;
    std::string to_string() const;  // "Sq4+Sq3Sq1", zero is "0"
    static SteenrodElement from_string(const std::string& s);

private:
    std::vector<Mono> terms_;  // sorted, duplicate-free
};

// Rewrites an arbitrary word Sq^{w1}...Sq^{wk} into admissible normal form,
// repeatedly fixing the leftmost inadmissible adjacent pair by the Adem
// relation Sq^a Sq^b = sum_c C(b-c-1, a-2c) Sq^{a+b-c} Sq^c (a < 2b).
SteenrodElement adem_normalize(const std::vector<int>& word);

// Same rewriting but resolving a uniformly random inadmissible pair at every
// step; only used to property-test confluence.
SteenrodElement adem_normalize_random(const std::vector<int>& word, unsigned seed);

SteenrodElement multiply(const SteenrodElement& x, const SteenrodElement& y);

// The n+1 Cartan pairs (Sq^i, Sq^{n-i}) of the coproduct of Sq^n.
std::vector<std::pair<SteenrodElement, SteenrodElement>> coproduct_sq(int n);

// Full coproduct of an admissible monomial, extended multiplicatively; the
// result is a set of (left, right) monomial pairs with F2 coefficients.
std::vector<std::pair<Mono, Mono>> coproduct_monomial(const Mono& m);

// chi(Sq^n) in admissible form, by the recursion sum_{i+j=n} Sq^i chi(Sq^j) = 0.
SteenrodElement antipode_sq(int n);

// chi extended antimultiplicatively over monomials.
SteenrodElement antipode(const SteenrodElement& x);

enum class AlgebraKind { A1, A2, ATruncated };

// One of A(1), A(2) or degree-truncated A, with per-degree basis tables and
// left-multiplication matrices for the generators Sq^{2^k}.  Immutable from
// the outside; lazy tables are guarded internally, so const use is
// thread-safe.
class Algebra {
public:
    static std::shared_ptr<const Algebra> subalgebra(int n);  // A(1) or A(2)
    static std::shared_ptr<const Algebra> truncated(int cap);

    AlgebraKind kind() const { return kind_; }
    int cap() const { return cap_; }
    bool is_truncated() const { return kind_ == AlgebraKind::ATruncated; }
    std::string name() const;  // "A1", "A2", "A cap=<n>"

    // Generator exponents {1, 2, ..., 2^n} (or powers of two <= cap).
    const std::vector<int>& generator_degrees() const { return gens_; }
    int top_generator() const { return gens_.back(); }

    int dim(int degree) const;
    int total_dim() const;   // finite algebras only
    int top_degree() const;  // 6 for A(1), 23 for A(2), cap for truncated

    const SteenrodElement& basis_element(int degree, int index) const;

    // Coordinates of a homogeneous element in the degree-d basis.  Throws if
    // the element is not in the span (possible for A(n) proper subalgebras).
    F2Vector coordinates(const SteenrodElement& e) const;
    SteenrodElement element_from_coordinates(int degree, const F2Vector& v) const;

    // Left multiplication by the generator Sq^{2^k}: dim(d + 2^k) x dim(d).
    const F2Matrix& generator_mult(int k, int degree) const;

    // Left multiplication by the basis element (bdeg, bidx) on degree-d
    // coordinates; dim(d + bdeg) x dim(d).
    const F2Matrix& basis_mult(int bdeg, int bidx, int degree) const;

    // True when Sq^{2^k} is a generator of this algebra.
    bool has_generator(int k) const;

    // For A(n): the closure derivation of a basis element, i.e. (k, parent)
    // with basis(bdeg, bidx) = Sq^{2^k} * basis(bdeg - 2^k, parent).
    std::pair<int, int> derivation(int bdeg, int bidx) const;

private:
    Algebra(AlgebraKind kind, int cap);
    void build_closure();        // A(n): multiplicative closure
    void ensure_degree(int d) const;  // truncated A: lazy admissible tables

    struct DegreeTable {
        std::vector<SteenrodElement> basis;
        std::map<Mono, int> mono_index;     // truncated A: admissible -> index
        std::vector<F2Vector> coord_rows;   // A(n): basis in ambient admissible coords
        std::map<Mono, int> ambient_index;  // A(n): ambient admissible -> coord position
        // closure derivation: basis element = Sq^{2^k} * parent basis element
        std::vector<std::pair<int, int>> derivation;  // (k, parent idx); (-1,-1) for 1
    };

    AlgebraKind kind_;
    int cap_;  // truncation degree for ATruncated, else top degree
    std::vector<int> gens_;
    mutable std::map<int, DegreeTable> tables_;
    mutable std::map<std::tuple<int, int>, F2Matrix> gen_mult_;          // (k, d)
    mutable std::map<std::tuple<int, int, int>, F2Matrix> basis_mult_;   // (bdeg, bidx, d)
    mutable std::mutex mutex_;

    const DegreeTable& table(int d) const;
};

}  // namespace stx
