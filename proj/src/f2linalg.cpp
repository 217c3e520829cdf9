#include "stx/f2linalg.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace stx {

F2Vector F2Vector::unit(std::size_t len, std::size_t i)
{
    F2Vector v(len);
    v.set(i, true);
    return v;
}

void F2Vector::xor_with(const F2Vector& other)
{
    for (std::size_t w = 0; w < words_.size(); ++w)
        words_[w] ^= other.words_[w];
}

bool F2Vector::is_zero() const
{
    for (auto w : words_)
        if (w)
            return false;
    return true;
}

int F2Vector::lowest_set() const
{
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w])
            return int(w * 64 + std::countr_zero(words_[w]));
    return -1;
}

std::size_t F2Vector::popcount() const
{
    std::size_t n = 0;
    for (auto w : words_)
        n += std::popcount(w);
    return n;
}

bool F2Vector::dot(const F2Vector& other) const
{
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w)
        acc ^= words_[w] & other.words_[w];
    return std::popcount(acc) & 1u;
}

F2Vector F2Vector::slice(std::size_t begin, std::size_t count) const
{
    F2Vector out(count);
    for (std::size_t i = 0; i < count; ++i)
        if (get(begin + i))
            out.set(i, true);
    return out;
}

void F2Vector::assign_slice(std::size_t begin, const F2Vector& v)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        set(begin + i, v.get(i));
}

F2Matrix F2Matrix::identity(std::size_t n)
{
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, true);
    return m;
}

void F2Matrix::append_row(F2Vector v)
{
    if (rows_.empty() && ncols_ == 0)
        ncols_ = v.size();
    rows_.push_back(std::move(v));
}

F2Vector F2Matrix::mul_vec(const F2Vector& x) const
{
    F2Vector out(rows());
    for (std::size_t r = 0; r < rows(); ++r)
        if (rows_[r].dot(x))
            out.set(r, true);
    return out;
}

F2Matrix F2Matrix::mul(const F2Matrix& other) const
{
    F2Matrix out(rows(), other.cols());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < ncols_; ++c)
            if (rows_[r].get(c))
                out.rows_[r].xor_with(other.rows_[c]);
    }
    return out;
}

F2Matrix F2Matrix::transpose() const
{
    F2Matrix out(ncols_, rows());
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < ncols_; ++c)
            if (rows_[r].get(c))
                out.set(c, r, true);
    return out;
}

RowReduceResult row_reduce(const F2Matrix& m)
{
    RowReduceResult res;
    res.rref = m;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t pivot = r;
        while (pivot < m.rows() && !res.rref.get(pivot, c))
            ++pivot;
        if (pivot == m.rows())
            continue;
        std::swap(res.rref.row(r), res.rref.row(pivot));
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (i != r && res.rref.get(i, c))
                res.rref.row(i).xor_with(res.rref.row(r));
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = res.pivots.size();
    return res;
}

std::size_t rank(const F2Matrix& m)
{
    return row_reduce(m).rank;
}

F2Matrix kernel_basis(const F2Matrix& m)
{
    RowReduceResult rr = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : rr.pivots)
        is_pivot[p] = true;

    F2Matrix out(0, m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (is_pivot[c])
            continue;
        F2Vector v(m.cols());
        v.set(c, true);
        for (std::size_t i = 0; i < rr.pivots.size(); ++i)
            if (rr.rref.get(i, c))
                v.set(rr.pivots[i], true);
        out.append_row(std::move(v));
    }
    return out;
}

std::optional<F2Vector> solve(const F2Matrix& m, const F2Vector& b)
{
    if (b.size() != m.rows())
        throw std::invalid_argument("solve: dimension mismatch");

    // Eliminate on the augmented matrix [m | b].
    F2Matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        aug.row(r).assign_slice(0, m.row(r));
        aug.set(r, m.cols(), b.get(r));
    }
    RowReduceResult rr = row_reduce(aug);
    F2Vector x(m.cols());
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) {
        if (rr.pivots[i] == m.cols())
            return std::nullopt;  // b outside the column span
        x.set(rr.pivots[i], rr.rref.get(i, m.cols()));
    }
    return x;
}

std::optional<F2Vector> express_in(const std::vector<F2Vector>& basis, const F2Vector& v)
{
    if (basis.empty())
        return v.is_zero() ? std::optional<F2Vector>(F2Vector(0)) : std::nullopt;
    F2Matrix cols(v.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i)
            if (basis[j].get(i))
                cols.set(i, j, true);
    return solve(cols, v);
}

F2Vector EchelonBasis::reduce(F2Vector v) const
{
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (v.get(pivots_[i]))
            v.xor_with(rows_[i]);
    return v;
}

bool EchelonBasis::insert(F2Vector v)
{
    v = reduce(std::move(v));
    int p = v.lowest_set();
    if (p < 0)
        return false;
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].get(std::size_t(p)))
            rows_[i].xor_with(v);
    auto it = std::upper_bound(pivots_.begin(), pivots_.end(), p);
    std::size_t pos = it - pivots_.begin();
    pivots_.insert(it, p);
    rows_.insert(rows_.begin() + pos, std::move(v));
    return true;
}

}  // namespace stx
