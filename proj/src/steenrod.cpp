#include "stx/steenrod.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stx {

bool is_admissible(const Mono& m)
{
    for (std::size_t i = 0; i + 1 < m.size(); ++i)
        if (m[i] < 2 * m[i + 1])
            return false;
    return true;
}

int mono_degree(const Mono& m)
{
    int d = 0;
    for (int e : m)
        d += e;
    return d;
}

std::string mono_to_string(const Mono& m)
{
    if (m.empty())
        return "1";
    std::string s;
    for (int e : m) {
        s += "Sq";
        s += std::to_string(e);
    }
    return s;
}

Mono mono_from_string(const std::string& s)
{
    if (s == "1")
        return {};
    Mono m;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (s.compare(pos, 2, "Sq") != 0)
            throw std::invalid_argument("bad monomial: " + s);
        pos += 2;
        std::size_t end = pos;
        while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end])))
            ++end;
        if (end == pos)
            throw std::invalid_argument("bad monomial: " + s);
        m.push_back(std::stoi(s.substr(pos, end - pos)));
        pos = end;
    }
    return m;
}

SteenrodElement SteenrodElement::sq(int n)
{
    if (n == 0)
        return unit();
    return SteenrodElement(Mono{n});
}

bool SteenrodElement::has_term(const Mono& m) const
{
    return std::binary_search(terms_.begin(), terms_.end(), m);
}

void SteenrodElement::add_term(const Mono& m)
{
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m);
    if (it != terms_.end() && *it == m)
        terms_.erase(it);
    else
        terms_.insert(it, m);
}

SteenrodElement SteenrodElement::operator+(const SteenrodElement& other) const
{
    SteenrodElement out = *this;
    for (const auto& t : other.terms_)
        out.add_term(t);
    return out;
}

std::string SteenrodElement::to_string() const
{
    if (terms_.empty())
        return "0";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i)
            s += "+";
        s += mono_to_string(terms_[i]);
    }
    return s;
}

SteenrodElement SteenrodElement::from_string(const std::string& s)
{
    SteenrodElement e;
    if (s == "0")
        return e;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t plus = s.find('+', pos);
        std::string piece = s.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
        e.add_term(mono_from_string(piece));
        if (plus == std::string::npos)
            break;
        pos = plus + 1;
    }
    return e;
}

namespace {

// One Adem expansion of the inadmissible pair (a, b), a < 2b:
// Sq^a Sq^b = sum_{c} C(b-c-1, a-2c) Sq^{a+b-c} Sq^c.
std::vector<Mono> adem_pair(int a, int b)
{
    std::vector<Mono> out;
    for (int c = 0; 2 * c <= a; ++c) {
        if (!binom2(b - c - 1, a - 2 * c))
            continue;
        if (c == 0)
            out.push_back(Mono{a + b});
        else
            out.push_back(Mono{a + b - c, c});
    }
    return out;
}

Mono clean_word(const std::vector<int>& word)
{
    Mono w;
    for (int e : word) {
        if (e < 0)
            throw std::invalid_argument("negative exponent in Sq word");
        if (e > 0)
            w.push_back(e);  // Sq^0 = 1
    }
    return w;
}

// Shared rewriting loop; `pick` selects which inadmissible pair to resolve.
template <typename PickFn>
SteenrodElement adem_rewrite(const std::vector<int>& word, PickFn pick)
{
    SteenrodElement result;
    std::set<Mono> work;
    auto toggle = [&work](Mono m) {
        auto it = work.find(m);
        if (it != work.end())
            work.erase(it);
        else
            work.insert(std::move(m));
    };
    toggle(clean_word(word));

    while (!work.empty()) {
        Mono w = *work.begin();
        work.erase(work.begin());

        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (w[i] < 2 * w[i + 1])
                bad.push_back(i);

        if (bad.empty()) {
            result.add_term(w);
            continue;
        }
        std::size_t i = pick(bad);
        for (const auto& repl : adem_pair(w[i], w[i + 1])) {
            Mono next(w.begin(), w.begin() + i);
            next.insert(next.end(), repl.begin(), repl.end());
            next.insert(next.end(), w.begin() + i + 2, w.end());
            toggle(std::move(next));
        }
    }
    return result;
}

}  // namespace

SteenrodElement adem_normalize(const std::vector<int>& word)
{
    return adem_rewrite(word, [](const std::vector<std::size_t>& bad) { return bad.front(); });
}

SteenrodElement adem_normalize_random(const std::vector<int>& word, unsigned seed)
{
    std::mt19937 rng(seed);
    return adem_rewrite(word, [&rng](const std::vector<std::size_t>& bad) {
        std::uniform_int_distribution<std::size_t> pick(0, bad.size() - 1);
        return bad[pick(rng)];
    });
}

SteenrodElement multiply(const SteenrodElement& x, const SteenrodElement& y)
{
    SteenrodElement out;
    for (const auto& mx : x.terms()) {
        for (const auto& my : y.terms()) {
            Mono w = mx;
            w.insert(w.end(), my.begin(), my.end());
            out = out + adem_normalize(w);
        }
    }
    return out;
}

std::vector<std::pair<SteenrodElement, SteenrodElement>> coproduct_sq(int n)
{
    std::vector<std::pair<SteenrodElement, SteenrodElement>> out;
    for (int i = 0; i <= n; ++i)
        out.emplace_back(SteenrodElement::sq(i), SteenrodElement::sq(n - i));
    return out;
}

std::vector<std::pair<Mono, Mono>> coproduct_monomial(const Mono& m)
{
    // Iterated Cartan splitting into word pairs, normalized at the end.
    std::vector<std::pair<Mono, Mono>> words{{Mono{}, Mono{}}};
    for (int e : m) {
        std::vector<std::pair<Mono, Mono>> next;
        next.reserve(words.size() * (e + 1));
        for (const auto& [l, r] : words) {
            for (int i = 0; i <= e; ++i) {
                Mono nl = l, nr = r;
                if (i > 0)
                    nl.push_back(i);
                if (e - i > 0)
                    nr.push_back(e - i);
                next.emplace_back(std::move(nl), std::move(nr));
            }
        }
        words = std::move(next);
    }

    std::set<std::pair<Mono, Mono>> acc;
    for (const auto& [l, r] : words) {
        auto le = adem_normalize(l);
        auto re = adem_normalize(r);
        for (const auto& lt : le.terms()) {
            for (const auto& rt : re.terms()) {
                auto key = std::make_pair(lt, rt);
                auto it = acc.find(key);
                if (it != acc.end())
                    acc.erase(it);
                else
                    acc.insert(key);
            }
        }
    }
    return {acc.begin(), acc.end()};
}

SteenrodElement antipode_sq(int n)
{
    static std::map<int, SteenrodElement> cache;
    static std::mutex m;
    std::lock_guard<std::mutex> lk(m);
    if (auto it = cache.find(n); it != cache.end())
        return it->second;

    std::function<SteenrodElement(int)> chi = [&](int k) -> SteenrodElement {
        if (auto it = cache.find(k); it != cache.end())
            return it->second;
        SteenrodElement out;
        if (k == 0) {
            out = SteenrodElement::unit();
        } else {
            // sum_{i=0}^{k} Sq^i chi(Sq^{k-i}) = 0, so chi(Sq^k) is the tail sum.
            for (int i = 1; i <= k; ++i)
                out = out + multiply(SteenrodElement::sq(i), chi(k - i));
        }
        cache[k] = out;
        return out;
    };
    return chi(n);
}

SteenrodElement antipode(const SteenrodElement& x)
{
    SteenrodElement out;
    for (const auto& m : x.terms()) {
        SteenrodElement prod = SteenrodElement::unit();
        // chi reverses products: chi(Sq^{i1}...Sq^{ik}) = chi(Sq^{ik})...chi(Sq^{i1}).
        for (auto it = m.rbegin(); it != m.rend(); ++it)
            prod = multiply(prod, antipode_sq(*it));
        out = out + prod;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Algebra tables

Algebra::Algebra(AlgebraKind kind, int cap) : kind_(kind), cap_(cap)
{
    int top = (kind == AlgebraKind::A1) ? 2 : (kind == AlgebraKind::A2) ? 4 : cap;
    for (int g = 1; g <= top; g *= 2)
        gens_.push_back(g);
    if (kind_ != AlgebraKind::ATruncated)
        build_closure();
}

namespace {
std::mutex g_intern_mutex;
std::map<std::pair<int, int>, std::shared_ptr<const Algebra>> g_interned;
}  // namespace

std::shared_ptr<const Algebra> Algebra::subalgebra(int n)
{
    if (n != 1 && n != 2)
        throw std::invalid_argument("only A(1) and A(2) are supported");
    std::lock_guard<std::mutex> lk(g_intern_mutex);
    auto& slot = g_interned[{n, 0}];
    if (!slot)
        slot.reset(new Algebra(n == 1 ? AlgebraKind::A1 : AlgebraKind::A2, n == 1 ? 6 : 23));
    return slot;
}

std::shared_ptr<const Algebra> Algebra::truncated(int cap)
{
    if (cap < 0)
        throw std::invalid_argument("negative truncation degree");
    std::lock_guard<std::mutex> lk(g_intern_mutex);
    auto& slot = g_interned[{0, cap}];
    if (!slot)
        slot.reset(new Algebra(AlgebraKind::ATruncated, cap));
    return slot;
}

std::string Algebra::name() const
{
    switch (kind_) {
        case AlgebraKind::A1: return "A1";
        case AlgebraKind::A2: return "A2";
        default: return "A cap=" + std::to_string(cap_);
    }
}

bool Algebra::has_generator(int k) const
{
    int g = 1 << k;
    return std::find(gens_.begin(), gens_.end(), g) != gens_.end();
}

std::pair<int, int> Algebra::derivation(int bdeg, int bidx) const
{
    if (kind_ == AlgebraKind::ATruncated)
        throw std::logic_error("derivation tables exist only for A(n)");
    return table(bdeg).derivation.at(std::size_t(bidx));
}

void Algebra::build_closure()
{
    // Close {1, Sq^1, ..., Sq^{2^n}} under left multiplication by generators,
    // keeping a linearly independent set in ambient admissible coordinates.
    tables_.clear();
    auto& unit_table = tables_[0];
    unit_table.basis.push_back(SteenrodElement::unit());
    unit_table.derivation.emplace_back(-1, -1);

    // Ambient coordinates are built per degree as monomials show up.
    std::map<int, EchelonBasis> spans;
    auto ambient_coords = [&](const SteenrodElement& e, DegreeTable& tab) {
        // Register unseen admissible monomials as new ambient coordinates.
        for (const auto& t : e.terms())
            if (!tab.ambient_index.count(t)) {
                int idx = int(tab.ambient_index.size());
                tab.ambient_index[t] = idx;
            }
        F2Vector v(1024);  // generous fixed width for closure-time vectors
        for (const auto& t : e.terms())
            v.flip(std::size_t(tab.ambient_index.at(t)));
        return v;
    };

    {
        auto v = ambient_coords(SteenrodElement::unit(), unit_table);
        spans[0] = EchelonBasis(1024);
        spans[0].insert(v);
        unit_table.coord_rows.push_back(v);
    }

    // Worklist of (degree, index) pairs whose generator multiples are pending.
    std::vector<std::pair<int, int>> todo{{0, 0}};
    while (!todo.empty()) {
        auto [d, idx] = todo.back();
        todo.pop_back();
        for (std::size_t k = 0; k < gens_.size(); ++k) {
            int g = gens_[k];
            SteenrodElement prod = multiply(SteenrodElement::sq(g), tables_[d].basis[idx]);
            if (prod.is_zero())
                continue;
            int nd = d + g;
            auto& tab = tables_[nd];
            auto v = ambient_coords(prod, tab);
            if (!spans.count(nd))
                spans[nd] = EchelonBasis(1024);
            if (!spans[nd].insert(v))
                continue;
            tab.basis.push_back(prod);
            tab.coord_rows.push_back(v);
            tab.derivation.emplace_back(int(k), idx);
            todo.emplace_back(nd, int(tab.basis.size()) - 1);
        }
    }
}

void Algebra::ensure_degree(int d) const
{
    // Truncated A: the degree-d basis is all admissible monomials of degree d.
    if (tables_.count(d))
        return;
    DegreeTable tab;
    if (d == 0) {
        tab.basis.push_back(SteenrodElement::unit());
        tab.mono_index[Mono{}] = 0;
    } else if (d > 0 && d <= cap_) {
        // Enumerate admissible sequences of total degree d, lexicographically.
        std::vector<Mono> out;
        Mono cur;
        std::function<void(int, int)> rec = [&](int remaining, int max_first) {
            if (remaining == 0) {
                if (!cur.empty())
                    out.push_back(cur);
                return;
            }
            for (int first = std::min(remaining, max_first); first >= 1; --first) {
                // A tail with entries <= first/2 sums to less than first.
                if (remaining - first >= first)
                    continue;
                cur.push_back(first);
                rec(remaining - first, first / 2);
                cur.pop_back();
            }
        };
        rec(d, d);
        std::sort(out.begin(), out.end());
        for (std::size_t i = 0; i < out.size(); ++i) {
            tab.mono_index[out[i]] = int(i);
            tab.basis.emplace_back(out[i]);
        }
    }
    tables_[d] = std::move(tab);
}

const Algebra::DegreeTable& Algebra::table(int d) const
{
    std::lock_guard<std::mutex> lk(mutex_);
    if (kind_ == AlgebraKind::ATruncated)
        ensure_degree(d);
    auto it = tables_.find(d);
    if (it == tables_.end()) {
        static const DegreeTable empty;
        return empty;
    }
    return it->second;
}

int Algebra::dim(int degree) const
{
    if (degree < 0 || degree > top_degree())
        return 0;
    return int(table(degree).basis.size());
}

int Algebra::total_dim() const
{
    if (kind_ == AlgebraKind::ATruncated)
        throw std::logic_error("total_dim of a truncated algebra");
    int n = 0;
    for (int d = 0; d <= top_degree(); ++d)
        n += dim(d);
    return n;
}

int Algebra::top_degree() const
{
    return cap_;
}

const SteenrodElement& Algebra::basis_element(int degree, int index) const
{
    return table(degree).basis.at(std::size_t(index));
}

F2Vector Algebra::coordinates(const SteenrodElement& e) const
{
    if (e.is_zero())
        return F2Vector(0);
    int d = e.degree();
    const auto& tab = table(d);
    if (kind_ == AlgebraKind::ATruncated) {
        F2Vector v(tab.basis.size());
        for (const auto& t : e.terms()) {
            auto it = tab.mono_index.find(t);
            if (it == tab.mono_index.end())
                throw std::invalid_argument("element beyond truncation degree");
            v.flip(std::size_t(it->second));
        }
        return v;
    }
    // A(n): solve against the stored ambient-coordinate rows.
    F2Vector target(1024);
    for (const auto& t : e.terms()) {
        auto it = tab.ambient_index.find(t);
        if (it == tab.ambient_index.end())
            throw std::invalid_argument("element not in " + name());
        target.flip(std::size_t(it->second));
    }
    auto coords = express_in(tab.coord_rows, target);
    if (!coords)
        throw std::invalid_argument("element not in " + name());
    return *coords;
}

SteenrodElement Algebra::element_from_coordinates(int degree, const F2Vector& v) const
{
    SteenrodElement out;
    const auto& tab = table(degree);
    for (std::size_t i = 0; i < tab.basis.size(); ++i)
        if (v.get(i))
            out = out + tab.basis[i];
    return out;
}

const F2Matrix& Algebra::generator_mult(int k, int degree) const
{
    {
        std::lock_guard<std::mutex> lk(mutex_);
        auto it = gen_mult_.find({k, degree});
        if (it != gen_mult_.end())
            return it->second;
    }
    int g = 1 << k;
    int nd = degree + g;
    F2Matrix m(std::size_t(dim(nd)), std::size_t(dim(degree)));
    for (int j = 0; j < dim(degree); ++j) {
        SteenrodElement prod = multiply(SteenrodElement::sq(g), basis_element(degree, j));
        if (kind_ == AlgebraKind::ATruncated && nd > cap_)
            prod = SteenrodElement();  // beyond the truncation: dropped
        if (prod.is_zero())
            continue;
        F2Vector col = coordinates(prod);
        for (std::size_t r = 0; r < col.size(); ++r)
            if (col.get(r))
                m.set(r, std::size_t(j), true);
    }
    std::lock_guard<std::mutex> lk(mutex_);
    return gen_mult_.emplace(std::make_tuple(k, degree), std::move(m)).first->second;
}

const F2Matrix& Algebra::basis_mult(int bdeg, int bidx, int degree) const
{
    {
        std::lock_guard<std::mutex> lk(mutex_);
        auto it = basis_mult_.find({bdeg, bidx, degree});
        if (it != basis_mult_.end())
            return it->second;
    }

    F2Matrix m;
    if (bdeg == 0) {
        m = F2Matrix::identity(std::size_t(dim(degree)));
    } else if (kind_ != AlgebraKind::ATruncated) {
        // Closure derivation: b = Sq^{2^k} * parent.
        const auto& tab = table(bdeg);
        auto [k, parent] = tab.derivation.at(std::size_t(bidx));
        const F2Matrix& rest = basis_mult(bdeg - gens_[std::size_t(k)], parent, degree);
        m = generator_mult(k, degree + bdeg - gens_[std::size_t(k)]).mul(rest);
    } else {
        // Truncated A: multiply the admissible monomial directly.
        const Mono& b = table(bdeg).basis.at(std::size_t(bidx)).terms().front();
        int nd = degree + bdeg;
        m = F2Matrix(std::size_t(dim(nd)), std::size_t(dim(degree)));
        if (nd <= cap_) {
            for (int j = 0; j < dim(degree); ++j) {
                const Mono& x = table(degree).basis.at(std::size_t(j)).terms().front();
                Mono w = b;
                w.insert(w.end(), x.begin(), x.end());
                SteenrodElement prod = adem_normalize(w);
                for (const auto& t : prod.terms())
                    m.set(std::size_t(table(nd).mono_index.at(t)), std::size_t(j), true);
            }
        }
    }
    std::lock_guard<std::mutex> lk(mutex_);
    return basis_mult_.emplace(std::make_tuple(bdeg, bidx, degree), std::move(m)).first->second;
}

}  // namespace stx
