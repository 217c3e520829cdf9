#include "stx/resolution.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

namespace stx {

namespace {

// Apply the algebra basis element (bdeg, bidx) to a P_s vector living in
// degree t, blockwise over the generator summands.
F2Vector apply_basis_to_chain(const FreeResolution& res, int s, int t, int bdeg, int bidx,
                              const F2Vector& v)
{
    auto src = res.frame(s, t);
    auto dst = res.frame(s, t + bdeg);
    F2Vector out(dst.size());

    // Per generator, the source block maps through basis_mult.
    std::size_t si = 0;
    while (si < src.size()) {
        int g = src[si].gen;
        std::size_t send = si;
        while (send < src.size() && src[send].gen == g)
            ++send;
        int sdeg = src[si].bdeg;

        std::size_t di = 0;
        while (di < dst.size() && dst[di].gen != g)
            ++di;
        if (di < dst.size()) {
            const auto& mult = res.algebra->basis_mult(bdeg, bidx, sdeg);
            for (std::size_t c = si; c < send; ++c) {
                if (!v.get(c))
                    continue;
                for (std::size_t r = 0; r < mult.rows(); ++r)
                    if (mult.get(r, std::size_t(src[c].bidx)))
                        out.flip(di + r);
            }
        }
        si = send;
    }
    return out;
}

F2Vector apply_generator_to_chain(const FreeResolution& res, int s, int t, int k, const F2Vector& v)
{
    int g = res.algebra->generator_degrees()[std::size_t(k)];
    auto src = res.frame(s, t);
    auto dst = res.frame(s, t + g);
    F2Vector out(dst.size());

    std::size_t si = 0;
    while (si < src.size()) {
        int gen = src[si].gen;
        std::size_t send = si;
        while (send < src.size() && src[send].gen == gen)
            ++send;
        int sdeg = src[si].bdeg;

        std::size_t di = 0;
        while (di < dst.size() && dst[di].gen != gen)
            ++di;
        if (di < dst.size()) {
            const auto& mult = res.algebra->generator_mult(k, sdeg);
            for (std::size_t c = si; c < send; ++c) {
                if (!v.get(c))
                    continue;
                for (std::size_t r = 0; r < mult.rows(); ++r)
                    if (mult.get(r, std::size_t(src[c].bidx)))
                        out.flip(di + r);
            }
        }
        si = send;
    }
    return out;
}

}  // namespace

int FreeResolution::gen_count(int s, int t) const
{
    if (s < 0 || s >= int(gens.size()))
        return 0;
    return int(std::count(gens[std::size_t(s)].begin(), gens[std::size_t(s)].end(), t));
}

int FreeResolution::max_gen_degree(int s) const
{
    if (s < 0 || s >= int(gens.size()) || gens[std::size_t(s)].empty())
        return INT_MIN;
    return gens[std::size_t(s)].back();
}

std::vector<FreeResolution::FrameEntry> FreeResolution::frame(int s, int t) const
{
    std::vector<FrameEntry> out;
    if (s < 0 || s >= int(gens.size()))
        return out;
    const auto& degs = gens[std::size_t(s)];
    for (std::size_t i = 0; i < degs.size(); ++i) {
        int bdeg = t - degs[i];
        if (bdeg < 0)
            continue;
        int n = algebra->dim(bdeg);
        for (int b = 0; b < n; ++b)
            out.push_back({int(i), bdeg, b});
    }
    return out;
}

F2Vector FreeResolution::diff_vector(int s, int i) const
{
    int t = gens[std::size_t(s)][std::size_t(i)];
    if (s == 0)
        return aug[std::size_t(i)];
    auto fr = frame(s - 1, t);
    F2Vector v(fr.size());
    for (const auto& [j, coeff] : diff[std::size_t(s)][std::size_t(i)]) {
        if (coeff.is_zero())
            continue;
        F2Vector coords = algebra->coordinates(coeff);
        for (std::size_t p = 0; p < fr.size(); ++p)
            if (fr[p].gen == j && fr[p].bdeg == coeff.degree() && coords.get(std::size_t(fr[p].bidx)))
                v.flip(p);
    }
    return v;
}

F2Matrix FreeResolution::differential_matrix(int s, int t) const
{
    auto cols = frame(s, t);
    std::size_t nrows = (s == 0) ? std::size_t(module->dim(t)) : frame(s - 1, t).size();
    F2Matrix out(nrows, cols.size());

    // Cache d(g_i) vectors per generator.
    std::vector<F2Vector> dvec(gens[std::size_t(s)].size());
    std::vector<bool> have(gens[std::size_t(s)].size(), false);

    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& e = cols[c];
        if (!have[std::size_t(e.gen)]) {
            dvec[std::size_t(e.gen)] = diff_vector(s, e.gen);
            have[std::size_t(e.gen)] = true;
        }
        F2Vector col;
        int tg = gens[std::size_t(s)][std::size_t(e.gen)];
        if (s == 0) {
            // b . (d_0 g) inside the module
            const auto& v = dvec[std::size_t(e.gen)];
            col = F2Vector(std::size_t(module->dim(t)));
            const auto& op = module->basis_op(e.bdeg, e.bidx, tg);
            for (std::size_t x = 0; x < v.size(); ++x)
                if (v.get(x))
                    for (std::size_t r = 0; r < op.rows(); ++r)
                        if (op.get(r, x))
                            col.flip(r);
        } else {
            col = apply_basis_to_chain(*this, s - 1, tg, e.bdeg, e.bidx, dvec[std::size_t(e.gen)]);
        }
        for (std::size_t r = 0; r < nrows; ++r)
            if (col.get(r))
                out.set(r, c, true);
    }
    return out;
}

long long resolution_trust_bound(const FpModule& m)
{
    long long trust = LLONG_MAX;
    int g = m.algebra()->top_generator();
    if (m.window() == WindowKind::TruncatedAbove)
        trust = std::min(trust, (long long)m.hi() - g);
    if (m.algebra()->is_truncated()) {
        int lo_cell = m.cells().empty() ? m.lo() : m.cells().front().degree;
        trust = std::min(trust, (long long)m.algebra()->cap() + lo_cell - g);
    }
    if (m.window() == WindowKind::TruncatedBelow)
        throw std::invalid_argument("cannot resolve a module truncated from below");
    return trust;
}

FreeResolution minimal_resolution(const ModulePtr& m, int s_max, int t_max, int threads)
{
    FreeResolution res;
    res.algebra = m->algebra();
    res.module = m;
    res.s_max = s_max;
    res.t_max = t_max;
    res.trust_t = resolution_trust_bound(*m);
    if (t_max > res.trust_t)
        throw WindowError("t_max " + std::to_string(t_max) + " beyond the validity window; the tight bound is t <= " +
                              std::to_string(res.trust_t),
                          res.trust_t);

    res.gens.resize(std::size_t(s_max) + 1);
    res.diff.resize(std::size_t(s_max) + 1);

    // Stage 0: minimal module generators.
    for (const auto& [t, vec] : m->minimal_generators()) {
        if (t > t_max)
            continue;
        res.gens[0].push_back(t);
        res.aug.push_back(vec);
    }

    for (int s = 1; s <= s_max; ++s) {
        if (res.gens[std::size_t(s - 1)].empty())
            break;
        int t_lo = res.gens[std::size_t(s - 1)].front() + 1;

        // Kernels of d_{s-1} per degree are independent; precompute them.
        std::vector<F2Matrix> kernels(std::size_t(std::max(0, t_max - t_lo + 1)));
        auto kernel_job = [&](int t) {
            auto dm = res.differential_matrix(s - 1, t);
            return kernel_basis(dm);
        };
        if (threads > 1) {
            std::atomic<int> next(t_lo);
            std::vector<std::thread> pool;
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&] {
                    for (int t = next.fetch_add(1); t <= t_max; t = next.fetch_add(1))
                        kernels[std::size_t(t - t_lo)] = kernel_job(t);
                });
            }
            for (auto& th : pool)
                th.join();
        } else {
            for (int t = t_lo; t <= t_max; ++t)
                kernels[std::size_t(t - t_lo)] = kernel_job(t);
        }

        // Ascending sweep: adjoin new generators for kernel classes missed by
        // the image of what is already present.
        std::map<int, EchelonBasis> image;  // degree -> span of d_s so far in P_{s-1}
        std::map<int, std::vector<F2Vector>> new_dvec;
        for (int t = t_lo; t <= t_max; ++t) {
            auto fr_rows = res.frame(s - 1, t);
            EchelonBasis J(fr_rows.size());
            for (std::size_t k = 0; k < res.algebra->generator_degrees().size(); ++k) {
                int g = res.algebra->generator_degrees()[k];
                auto it = image.find(t - g);
                if (it == image.end())
                    continue;
                for (const auto& row : it->second.rows())
                    J.insert(apply_generator_to_chain(res, s - 1, t - g, int(k), row));
            }

            const auto& K = kernels[std::size_t(t - t_lo)];
            for (std::size_t i = 0; i < K.rows(); ++i) {
                auto r = J.reduce(K.row(i));
                if (r.is_zero())
                    continue;
                // Minimality: a kernel class never carries a unit coefficient.
                for (std::size_t p = 0; p < fr_rows.size(); ++p)
                    if (fr_rows[p].bdeg == 0 && r.get(p))
                        throw std::logic_error("minimality violated at s=" + std::to_string(s) +
                                               " t=" + std::to_string(t));
                res.gens[std::size_t(s)].push_back(t);
                new_dvec[t].push_back(r);
                J.insert(std::move(r));
            }
            image.emplace(t, std::move(J));
        }

        // Convert the stored vectors into (generator, coefficient) pairs.
        std::size_t gi = 0;
        for (int t = t_lo; t <= t_max; ++t) {
            auto it = new_dvec.find(t);
            if (it == new_dvec.end())
                continue;
            auto fr = res.frame(s - 1, t);
            for (const auto& v : it->second) {
                std::vector<std::pair<int, SteenrodElement>> entry;
                std::map<int, std::map<int, F2Vector>> per_gen;  // gen -> bdeg -> coords
                for (std::size_t p = 0; p < fr.size(); ++p) {
                    if (!v.get(p))
                        continue;
                    auto& coords = per_gen[fr[p].gen][fr[p].bdeg];
                    if (coords.size() == 0)
                        coords = F2Vector(std::size_t(res.algebra->dim(fr[p].bdeg)));
                    coords.flip(std::size_t(fr[p].bidx));
                }
                for (const auto& [j, by_deg] : per_gen) {
                    SteenrodElement coeff;
                    for (const auto& [bdeg, coords] : by_deg)
                        coeff = coeff + res.algebra->element_from_coordinates(bdeg, coords);
                    if (!coeff.is_zero())
                        entry.emplace_back(j, coeff);
                }
                res.diff[std::size_t(s)].push_back(std::move(entry));
                ++gi;
            }
        }
        (void)gi;
    }
    return res;
}

bool ExtChart::trusted(int s, int t) const
{
    if (t > trust_t_hi)
        return false;
    auto it = trust_t_lo.find(s);
    if (it != trust_t_lo.end() && t < it->second)
        return false;
    return true;
}

int ExtChart::dim(int s, int t) const
{
    auto it = dims.find({s, t});
    return it == dims.end() ? 0 : it->second;
}

ExtChart ext_dims_f2(const FreeResolution& res, int chart_s_max, int stem_lo, int stem_hi)
{
    ExtChart chart;
    chart.stem_lo = stem_lo;
    chart.stem_hi = stem_hi;
    chart.s_max = chart_s_max;
    chart.trust_t_hi = res.trust_t;
    for (int s = 0; s <= chart_s_max && s < int(res.gens.size()); ++s)
        for (int t : res.gens[std::size_t(s)])
            if (t - s >= stem_lo && t - s <= stem_hi)
                ++chart.dims[{s, t}];
    auto [h0, h1] = structure_lines(res);
    for (auto& l : h0)
        if (l.first < chart_s_max && l.second - l.first >= stem_lo && l.second - l.first <= stem_hi)
            chart.h0.insert(l);
    for (auto& l : h1)
        if (l.first < chart_s_max && l.second - l.first >= stem_lo && l.second - l.first <= stem_hi)
            chart.h1.insert(l);
    return chart;
}

ExtChart ext_dims(const FreeResolution& res, const ModulePtr& n, int chart_s_max, int stem_lo,
                  int stem_hi)
{
    if (n->cells().empty())
        return ExtChart{stem_lo, stem_hi, chart_s_max, {}, {}, {}, LLONG_MAX, {}};

    ExtChart chart;
    chart.stem_lo = stem_lo;
    chart.stem_hi = stem_hi;
    chart.s_max = chart_s_max;

    int n_top = n->cells().back().degree;
    chart.trust_t_hi = std::min(res.trust_t, (long long)res.t_max - n_top);

    // Hom^t(P_s, N) has one coordinate per (generator of P_s, cell of N in
    // degree t_i - t); the codifferential precomposes with d_{s+1}.
    struct HomFrame {
        std::vector<std::pair<int, int>> entries;  // (gen index, N-cell index)
    };
    auto hom_frame = [&](int s, int t) {
        HomFrame f;
        if (s < 0 || s >= int(res.gens.size()))
            return f;
        const auto& degs = res.gens[std::size_t(s)];
        for (std::size_t i = 0; i < degs.size(); ++i) {
            int nd = degs[i] - t;
            for (int ci : n->cells_in_degree(nd))
                f.entries.emplace_back(int(i), ci);
        }
        return f;
    };

    // delta^{s}: Hom(P_s, N) -> Hom(P_{s+1}, N), (delta f)(g) = f(d g).
    auto delta_matrix = [&](int s, int t, const HomFrame& src, const HomFrame& dst) {
        F2Matrix out(dst.entries.size(), src.entries.size());
        if (s + 1 >= int(res.gens.size()))
            return out;
        for (std::size_t c = 0; c < src.entries.size(); ++c) {
            auto [i, ci] = src.entries[c];
            int ndeg = n->cells()[std::size_t(ci)].degree;
            const auto& nframe = n->cells_in_degree(ndeg);
            auto npos = std::find(nframe.begin(), nframe.end(), ci) - nframe.begin();
            // evaluate against every generator of P_{s+1}
            for (std::size_t j = 0; j < res.gens[std::size_t(s + 1)].size(); ++j) {
                for (const auto& [tgt, coeff] : res.diff[std::size_t(s + 1)][j]) {
                    if (tgt != i || coeff.is_zero())
                        continue;
                    auto op = n->element_op(coeff, ndeg);
                    const auto& tframe = n->cells_in_degree(ndeg + coeff.degree());
                    for (std::size_t r = 0; r < op.rows(); ++r) {
                        if (!op.get(r, std::size_t(npos)))
                            continue;
                        // coordinate (j, tframe[r]) in the destination frame
                        for (std::size_t p = 0; p < dst.entries.size(); ++p)
                            if (dst.entries[p].first == int(j) && dst.entries[p].second == tframe[r])
                                out.set(p, c, out.get(p, c) ^ true);
                    }
                }
            }
        }
        return out;
    };

    for (int s = 0; s <= chart_s_max; ++s) {
        long long lo_bound = LLONG_MIN;
        if (!n->is_exact()) {
            // unknown N-values corrupt low t when N is truncated above
            int mg = INT_MIN;
            for (int sp = std::max(0, s - 1); sp <= s + 1; ++sp)
                mg = std::max(mg, res.max_gen_degree(sp));
            if (mg != INT_MIN)
                lo_bound = (long long)mg - n->hi();
        }
        chart.trust_t_lo[s] = lo_bound;

        for (int stem = stem_lo; stem <= stem_hi; ++stem) {
            int t = stem + s;
            auto cur = hom_frame(s, t);
            if (cur.entries.empty())
                continue;
            auto nxt = hom_frame(s + 1, t);
            auto d_out = delta_matrix(s, t, cur, nxt);
            std::size_t z = cur.entries.size() - rank(d_out);
            std::size_t b = 0;
            if (s > 0) {
                auto prv = hom_frame(s - 1, t);
                if (!prv.entries.empty())
                    b = rank(delta_matrix(s - 1, t, prv, cur));
            }
            int dim = int(z - b);
            if (dim > 0)
                chart.dims[{s, t}] = dim;
        }
    }
    return chart;
}

std::pair<std::set<std::pair<int, int>>, std::set<std::pair<int, int>>> structure_lines(
    const FreeResolution& res)
{
    std::set<std::pair<int, int>> h0, h1;
    static const Mono sq1{1}, sq2{2};
    for (int s = 1; s < int(res.gens.size()); ++s) {
        for (std::size_t i = 0; i < res.gens[std::size_t(s)].size(); ++i) {
            int tg = res.gens[std::size_t(s)][i];
            for (const auto& [j, coeff] : res.diff[std::size_t(s)][i]) {
                int tj = res.gens[std::size_t(s - 1)][std::size_t(j)];
                if (tg == tj + 1 && coeff.has_term(sq1))
                    h0.insert({s - 1, tj});
                if (tg == tj + 2 && coeff.has_term(sq2))
                    h1.insert({s - 1, tj});
            }
        }
    }
    return {h0, h1};
}

std::map<std::pair<int, int>, F2Matrix> ext_of_hom(const ModuleHom& f, const FreeResolution& res_m,
                                                   const FreeResolution& res_mp)
{
    // Lift f to a chain map phi_s : P_s(M) -> P_s(M') with d' phi = phi d.
    // phi_s(g_i) is stored as a frame vector of P_s(M') in degree t_i.
    std::vector<std::vector<F2Vector>> phi(res_m.gens.size());

    for (int s = 0; s < int(res_m.gens.size()) && s < int(res_mp.gens.size()); ++s) {
        for (std::size_t i = 0; i < res_m.gens[std::size_t(s)].size(); ++i) {
            int t = res_m.gens[std::size_t(s)][i];
            F2Vector rhs;
            if (s == 0) {
                // f(d_0 g_i) in M' coordinates
                const auto& v = res_m.aug[i];
                rhs = f.matrix(t).mul_vec(v);
            } else {
                // phi_{s-1}(d g_i)
                auto fr = res_m.frame(s - 1, t);
                auto dv = res_m.diff_vector(s, int(i));
                rhs = F2Vector(res_mp.frame(s - 1, t).size());
                for (std::size_t p = 0; p < fr.size(); ++p) {
                    if (!dv.get(p))
                        continue;
                    int tj = res_m.gens[std::size_t(s - 1)][std::size_t(fr[p].gen)];
                    auto moved = apply_basis_to_chain(res_mp, s - 1, tj, fr[p].bdeg, fr[p].bidx,
                                                      phi[std::size_t(s - 1)][std::size_t(fr[p].gen)]);
                    rhs.xor_with(moved);
                }
            }
            auto dm = res_mp.differential_matrix(s, t);
            auto x = solve(dm, rhs);
            if (!x)
                throw std::logic_error("chain lift failed at s=" + std::to_string(s) +
                                       " t=" + std::to_string(t) + " (resolution range too small?)");
            phi[std::size_t(s)].push_back(*x);
        }
    }

    // Induced maps on Ext(-, F2): unit coefficients of phi.
    std::map<std::pair<int, int>, F2Matrix> out;
    for (int s = 0; s < int(phi.size()); ++s) {
        for (int t : std::set<int>(res_m.gens[std::size_t(s)].begin(), res_m.gens[std::size_t(s)].end())) {
            std::vector<int> rows, cols;
            for (std::size_t i = 0; i < res_m.gens[std::size_t(s)].size(); ++i)
                if (res_m.gens[std::size_t(s)][i] == t)
                    rows.push_back(int(i));
            if (s < int(res_mp.gens.size()))
                for (std::size_t j = 0; j < res_mp.gens[std::size_t(s)].size(); ++j)
                    if (res_mp.gens[std::size_t(s)][j] == t)
                        cols.push_back(int(j));
            F2Matrix mat(rows.size(), cols.size());
            auto fr = res_mp.frame(s, t);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto& v = phi[std::size_t(s)][std::size_t(rows[r])];
                for (std::size_t p = 0; p < fr.size(); ++p) {
                    if (fr[p].bdeg != 0 || !v.get(p))
                        continue;
                    auto cit = std::find(cols.begin(), cols.end(), fr[p].gen);
                    if (cit != cols.end())
                        mat.set(r, std::size_t(cit - cols.begin()), true);
                }
            }
            out.emplace(std::make_pair(s, t), std::move(mat));
        }
    }
    return out;
}

ExtChart bar_ext_oracle(const ModulePtr& m, int s_max, int t_max)
{
    if (s_max > 3)
        throw std::invalid_argument("bar oracle is for small instances (s_max <= 3)");
    auto alg = m->algebra();

    // Tuples (b_1, ..., b_s, x) with deg b_i > 0; coordinates of the reduced
    // bar complex B+^(x)s (x) M in internal degree t.
    struct Tuple {
        std::vector<std::pair<int, int>> bs;  // (bdeg, bidx)
        int cell;
    };
    // enumerate per (s, t), deterministically
    auto tuples = [&](int s, int t) {
        std::vector<Tuple> out;
        std::vector<std::pair<int, int>> cur;
        std::function<void(int, int)> rec = [&](int pos, int remaining) {
            if (pos == s) {
                for (int ci = 0; ci < m->total_dim(); ++ci)
                    if (m->cells()[std::size_t(ci)].degree == remaining)
                        out.push_back({cur, ci});
                return;
            }
            int maxd = std::min(remaining, alg->top_degree());
            for (int d = 1; d <= maxd; ++d) {
                for (int b = 0; b < alg->dim(d); ++b) {
                    cur.emplace_back(d, b);
                    rec(pos + 1, remaining - d);
                    cur.pop_back();
                }
            }
        };
        rec(0, t);
        return out;
    };

    auto index_of = [](const std::vector<Tuple>& fr, const Tuple& t) {
        for (std::size_t i = 0; i < fr.size(); ++i)
            if (fr[i].bs == t.bs && fr[i].cell == t.cell)
                return int(i);
        return -1;
    };

    // boundary d(b1 (x) ... (x) bs (x) x) = sum merges + last face
    auto boundary = [&](int s, int t, const std::vector<Tuple>& src, const std::vector<Tuple>& dst) {
        F2Matrix out(dst.size(), src.size());
        for (std::size_t c = 0; c < src.size(); ++c) {
            const auto& tp = src[c];
            // adjacent products b_i b_{i+1}
            for (int i = 0; i + 1 < s; ++i) {
                auto prod = multiply(alg->basis_element(tp.bs[std::size_t(i)].first, tp.bs[std::size_t(i)].second),
                                     alg->basis_element(tp.bs[std::size_t(i + 1)].first, tp.bs[std::size_t(i + 1)].second));
                if (prod.is_zero())
                    continue;
                if (alg->is_truncated() && prod.degree() > alg->cap())
                    continue;
                F2Vector coords = alg->coordinates(prod);
                for (std::size_t b = 0; b < coords.size(); ++b) {
                    if (!coords.get(b))
                        continue;
                    Tuple nt;
                    for (int q = 0; q < s; ++q) {
                        if (q == i)
                            nt.bs.emplace_back(prod.degree(), int(b));
                        else if (q != i + 1)
                            nt.bs.push_back(tp.bs[std::size_t(q)]);
                    }
                    nt.cell = tp.cell;
                    int p = index_of(dst, nt);
                    if (p >= 0)
                        out.set(std::size_t(p), c, out.get(std::size_t(p), c) ^ true);
                }
            }
            // last face b_s . x
            {
                auto [bd, bi] = tp.bs[std::size_t(s - 1)];
                int cd = m->cells()[std::size_t(tp.cell)].degree;
                const auto& frc = m->cells_in_degree(cd);
                auto cpos = std::find(frc.begin(), frc.end(), tp.cell) - frc.begin();
                const auto& op = m->basis_op(bd, bi, cd);
                const auto& tframe = m->cells_in_degree(cd + bd);
                for (std::size_t r = 0; r < op.rows(); ++r) {
                    if (!op.get(r, std::size_t(cpos)))
                        continue;
                    Tuple nt;
                    for (int q = 0; q + 1 < s; ++q)
                        nt.bs.push_back(tp.bs[std::size_t(q)]);
                    nt.cell = tframe[r];
                    int p = index_of(dst, nt);
                    if (p >= 0)
                        out.set(std::size_t(p), c, out.get(std::size_t(p), c) ^ true);
                }
            }
        }
        (void)t;
        return out;
    };

    ExtChart chart;
    chart.s_max = s_max;
    chart.stem_lo = -1000;
    chart.stem_hi = 1000;
    chart.trust_t_hi = resolution_trust_bound(*m);

    for (int t = m->cells().empty() ? 0 : m->cells().front().degree; t <= t_max; ++t) {
        std::vector<std::vector<Tuple>> frames;
        for (int s = 0; s <= s_max + 1; ++s)
            frames.push_back(tuples(s, t));
        for (int s = 0; s <= s_max; ++s) {
            if (frames[std::size_t(s)].empty())
                continue;
            std::size_t z;
            if (s == 0)
                z = frames[0].size();
            else {
                auto d_s = boundary(s, t, frames[std::size_t(s)], frames[std::size_t(s - 1)]);
                z = frames[std::size_t(s)].size() - rank(d_s);
            }
            std::size_t b = 0;
            if (!frames[std::size_t(s + 1)].empty()) {
                auto d_next = boundary(s + 1, t, frames[std::size_t(s + 1)], frames[std::size_t(s)]);
                b = rank(d_next);
            }
            // Tor_s dims equal Ext^s dims over F2
            int dim = int(z - b);
            if (dim > 0)
                chart.dims[{s, t}] = dim;
        }
    }
    return chart;
}

ChangeOfRingsReport change_of_rings_check(const ModulePtr& m, int cap, int s_max, int t_max,
                                          int threads)
{
    ChangeOfRingsReport rep;
    auto ind = induced_module(m, cap);
    auto left_res = minimal_resolution(ind.extended, s_max,
                                       int(std::min((long long)t_max, resolution_trust_bound(*ind.extended))),
                                       threads);
    auto right_res = minimal_resolution(m, s_max, t_max, threads);
    rep.left = ext_dims_f2(left_res, s_max, -100, 100);
    rep.right = ext_dims_f2(right_res, s_max, -100, 100);
    for (int s = 0; s <= s_max; ++s) {
        for (int t = -10; t <= t_max; ++t) {
            if (t > left_res.t_max)
                continue;
            int l = rep.left.dim(s, t);
            int r = rep.right.dim(s, t);
            if (l != r) {
                rep.agree = false;
                rep.mismatches.push_back("(s=" + std::to_string(s) + ", t=" + std::to_string(t) +
                                         "): left " + std::to_string(l) + " right " + std::to_string(r));
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// cache files

std::string module_content_hash(const FpModule& m)
{
    // FNV-1a, 64-bit, stable across runs and platforms.
    std::string text = m.algebra()->name() + "\n" + m.canonical_text();
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

static const char* kCacheVersion = "1";

void write_resolution_file(const FreeResolution& res, const std::string& path)
{
    std::ostringstream os;
    os << "stxres " << kCacheVersion << "\n";
    os << "algebra " << res.algebra->name() << "\n";
    os << "module-hash " << module_content_hash(*res.module) << "\n";
    os << "smax " << res.s_max << " tmax " << res.t_max << "\n";
    os << "trust " << (res.trust_t == LLONG_MAX ? std::string("inf") : std::to_string(res.trust_t))
       << "\n";
    for (std::size_t s = 0; s < res.gens.size(); ++s) {
        os << "gens " << s << ":";
        for (int t : res.gens[s])
            os << " " << t;
        os << "\n";
    }
    for (std::size_t i = 0; i < res.aug.size(); ++i) {
        os << "aug " << i << " =";
        int t = res.gens[0][i];
        const auto& frame = res.module->cells_in_degree(t);
        bool first = true;
        for (std::size_t p = 0; p < res.aug[i].size(); ++p) {
            if (!res.aug[i].get(p))
                continue;
            os << (first ? " " : " + ") << res.module->cells()[std::size_t(frame[p])].name;
            first = false;
        }
        if (first)
            os << " 0";
        os << "\n";
    }
    for (std::size_t s = 1; s < res.gens.size(); ++s) {
        for (std::size_t i = 0; i < res.diff[s].size(); ++i) {
            os << "d " << s << " " << i << " =";
            bool first = true;
            for (const auto& [j, coeff] : res.diff[s][i]) {
                os << (first ? " " : " + ") << "(" << coeff.to_string() << ")*g" << j;
                first = false;
            }
            if (first)
                os << " 0";
            os << "\n";
        }
    }

    // write-to-temp then atomic rename, so concurrent runs never corrupt
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw std::runtime_error("cannot write " + tmp);
        out << os.str();
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp);
}

FreeResolution read_resolution_file(const std::string& path, const ModulePtr& m)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    FreeResolution res;
    res.module = m;
    res.algebra = m->algebra();

    std::string line;
    if (!std::getline(in, line) || line != std::string("stxres ") + kCacheVersion)
        throw std::runtime_error("bad cache header in " + path);
    auto expect_prefix = [&](const std::string& prefix) {
        if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
            throw std::runtime_error("bad cache line (wanted " + prefix + ") in " + path);
        return line.substr(prefix.size());
    };
    if (expect_prefix("algebra ") != m->algebra()->name())
        throw std::runtime_error("cache algebra mismatch");
    if (expect_prefix("module-hash ") != module_content_hash(*m))
        throw std::runtime_error("cache module-hash mismatch");
    {
        std::istringstream ls(expect_prefix("smax "));
        std::string tmaxtok;
        ls >> res.s_max >> tmaxtok >> res.t_max;
    }
    {
        auto t = expect_prefix("trust ");
        res.trust_t = t == "inf" ? LLONG_MAX : std::stoll(t);
    }
    res.gens.resize(std::size_t(res.s_max) + 1);
    res.diff.resize(std::size_t(res.s_max) + 1);
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "gens") {
            std::string sspec;
            ls >> sspec;
            int s = std::stoi(sspec);
            int t;
            while (ls >> t)
                res.gens[std::size_t(s)].push_back(t);
        } else if (tok == "aug") {
            std::size_t i;
            std::string eq;
            ls >> i >> eq;
            int t = res.gens[0][i];
            F2Vector v(std::size_t(m->dim(t)));
            std::string name;
            while (ls >> name) {
                if (name == "+" || name == "0")
                    continue;
                int ci = m->cell_index(name);
                const auto& frame = m->cells_in_degree(t);
                auto p = std::find(frame.begin(), frame.end(), ci) - frame.begin();
                v.flip(std::size_t(p));
            }
            res.aug.push_back(std::move(v));
        } else if (tok == "d") {
            int s;
            std::size_t i;
            std::string eq;
            ls >> s >> i >> eq;
            std::vector<std::pair<int, SteenrodElement>> entry;
            std::string term;
            while (ls >> term) {
                if (term == "+" || term == "0")
                    continue;
                auto close = term.find(")*g");
                SteenrodElement coeff = SteenrodElement::from_string(term.substr(1, close - 1));
                int j = std::stoi(term.substr(close + 3));
                entry.emplace_back(j, std::move(coeff));
            }
            res.diff[std::size_t(s)].push_back(std::move(entry));
        } else if (!tok.empty()) {
            throw std::runtime_error("unknown cache directive " + tok);
        }
    }
    return res;
}

}  // namespace stx
