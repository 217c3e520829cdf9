#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

// Dense bit-packed linear algebra over F2, 64 columns per word.
// Everything here is a pure value type; operations never mutate their
// arguments unless the name says so (xor_with).

namespace stx {

class F2Vector {
public:
    F2Vector() = default;
    explicit F2Vector(std::size_t len) : words_((len + 63) / 64, 0), len_(len) {}

    static F2Vector unit(std::size_t len, std::size_t i);

    std::size_t size() const { return len_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(std::size_t i, bool v)
    {
        if (v)
            words_[i >> 6] |= std::uint64_t(1) << (i & 63);
        else
            words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    void xor_with(const F2Vector& other);

    bool is_zero() const;

    // Index of the lowest set bit, or -1 when zero.
    int lowest_set() const;

    std::size_t popcount() const;

    bool dot(const F2Vector& other) const;

    bool operator==(const F2Vector& other) const = default;

    // Concatenation and slicing, used to glue per-block coordinate frames.
    F2Vector slice(std::size_t begin, std::size_t count) const;
    void assign_slice(std::size_t begin, const F2Vector& v);

private:
    std::vector<std::uint64_t> words_;
    std::size_t len_ = 0;
};

class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols) : rows_(rows, F2Vector(cols)), ncols_(cols) {}

    static F2Matrix identity(std::size_t n);
    static F2Matrix zero(std::size_t rows, std::size_t cols) { return F2Matrix(rows, cols); }

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return ncols_; }

    bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v) { rows_[r].set(c, v); }

    const F2Vector& row(std::size_t r) const { return rows_[r]; }
    F2Vector& row(std::size_t r) { return rows_[r]; }

    void append_row(F2Vector v);

    // m * x with x a column vector of length cols(); result has length rows().
    F2Vector mul_vec(const F2Vector& x) const;

    F2Matrix mul(const F2Matrix& other) const;
    F2Matrix transpose() const;

    bool operator==(const F2Matrix& other) const = default;

private:
    std::vector<F2Vector> rows_;
    std::size_t ncols_ = 0;
};

struct RowReduceResult {
    F2Matrix rref;
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
};

// Reduced row echelon form with the lowest-column / lowest-row pivot rule.
RowReduceResult row_reduce(const F2Matrix& m);

std::size_t rank(const F2Matrix& m);

// Rows of the result form a basis of { v : m*v = 0 }.  Deterministic: one
// basis vector per free column, in ascending column order.
F2Matrix kernel_basis(const F2Matrix& m);

// Some x with m*x = b, or nullopt when b is outside the column span.
// Throws std::invalid_argument if b.size() != m.rows().
std::optional<F2Vector> solve(const F2Matrix& m, const F2Vector& b);

// Coordinates of v in the span of `basis` (vectors of equal length), or
// nullopt when v is not in the span.
std::optional<F2Vector> express_in(const std::vector<F2Vector>& basis, const F2Vector& v);

// Incrementally maintained reduced echelon spanning set.
class EchelonBasis {
public:
    EchelonBasis() = default;
    explicit EchelonBasis(std::size_t ncols) : ncols_(ncols) {}

    std::size_t ncols() const { return ncols_; }
    std::size_t dim() const { return rows_.size(); }

    // Residue of v after reduction against the basis.
    F2Vector reduce(F2Vector v) const;

    // Insert v if independent; returns true when the basis grew.
    bool insert(F2Vector v);

    bool contains(const F2Vector& v) const { return reduce(v).is_zero(); }

    const std::vector<F2Vector>& rows() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }

private:
    std::size_t ncols_ = 0;
    std::vector<F2Vector> rows_;  // kept mutually reduced, sorted by pivot
    std::vector<int> pivots_;
};

}  // namespace stx
