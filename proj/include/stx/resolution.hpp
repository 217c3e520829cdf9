#pragma once

#include "stx/fpmodule.hpp"

#include <climits>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal free resolutions over A(1), A(2) and degree-truncated A, with
// bigraded Ext dimensions, induced maps on Ext, h0/h1 structure lines, the
// reduced-bar-complex oracle and the change-of-rings cross-check.

namespace stx {

// Thrown when a requested range exceeds what a truncated module or algebra
// can support; carries the tight bound.
struct WindowError : std::runtime_error {
    long long tight_bound;
    WindowError(const std::string& msg, long long bound) : std::runtime_error(msg), tight_bound(bound) {}
};

class FreeResolution {
public:
    std::shared_ptr<const Algebra> algebra;
    ModulePtr module;
    int s_max = 0, t_max = 0;
    long long trust_t = LLONG_MAX;  // Ext data trusted for t <= trust_t

    // gens[s] = internal degrees of the P_s generators, ascending.
    std::vector<std::vector<int>> gens;
    // diff[s][i] for s >= 1: d(g_i) as (generator j of P_{s-1}, coefficient).
    std::vector<std::vector<std::vector<std::pair<int, SteenrodElement>>>> diff;
    // aug[i]: d_0(g_i) as a module vector in degree gens[0][i].
    std::vector<F2Vector> aug;

    int gen_count(int s, int t) const;
    int max_gen_degree(int s) const;  // -infinity as INT_MIN when empty

    // Coordinate frame of P_s in degree t: pairs (generator, basis index).
    struct FrameEntry {
        int gen;
        int bdeg;  // algebra degree of the coefficient
        int bidx;
    };
    std::vector<FrameEntry> frame(int s, int t) const;

    // Matrix of d_s from P_s^t; rows are P_{s-1}^t coordinates (module
    // coordinates when s = 0).
    F2Matrix differential_matrix(int s, int t) const;

    // d(g_i) of P_s expressed in the degree-gens[s][i] frame of P_{s-1}.
    F2Vector diff_vector(int s, int i) const;

    std::string serialize() const;  // canonical cache text, round-trips bit-exactly
};

// Degreewise minimal resolution; deterministic for a fixed module and bounds.
// threads > 1 parallelizes the per-degree kernel computations inside a
// homological stage; results are identical to the serial run.
FreeResolution minimal_resolution(const ModulePtr& m, int s_max, int t_max, int threads = 1);

// The trust bound the resolution of m would get (LLONG_MAX when everything
// is exact).
long long resolution_trust_bound(const FpModule& m);

struct ExtChart {
    int stem_lo = 0, stem_hi = 0, s_max = 0;
    std::map<std::pair<int, int>, int> dims;          // (s, t) -> dimension
    std::set<std::pair<int, int>> h0, h1;             // line base (s, t)
    long long trust_t_hi = LLONG_MAX;                 // t <= this is trusted
    std::map<int, long long> trust_t_lo;              // per-s lower bounds

    bool trusted(int s, int t) const;
    int dim(int s, int t) const;
};

// Ext_B(M, F2): generator counting plus structure lines.
ExtChart ext_dims_f2(const FreeResolution& res, int chart_s_max, int stem_lo, int stem_hi);

// Ext_B(M, N) via the Hom complex into N; needs res computed one filtration
// beyond chart_s_max.
ExtChart ext_dims(const FreeResolution& res, const ModulePtr& n, int chart_s_max, int stem_lo,
                  int stem_hi);

// h0/h1 multiplication lines read off the minimal differentials: the Sq^1
// (resp. Sq^2) coefficient of g' in d(g).
std::pair<std::set<std::pair<int, int>>, std::set<std::pair<int, int>>> structure_lines(
    const FreeResolution& res);

// Chain-map lift of f : M -> M' over resolutions of M and M'; the returned
// matrices represent Ext^{s,t}(M') -> Ext^{s,t}(M) with rows indexed by the
// M-resolution generators.
std::map<std::pair<int, int>, F2Matrix> ext_of_hom(const ModuleHom& f, const FreeResolution& res_m,
                                                   const FreeResolution& res_mp);

// Independent verification oracle via the reduced bar complex; s_max <= 3.
ExtChart bar_ext_oracle(const ModulePtr& m, int s_max, int t_max);

struct ChangeOfRingsReport {
    bool agree = true;
    std::vector<std::string> mismatches;
    ExtChart left, right;
};

// Ext_A(A//A(n) (x) M, F2) vs Ext_{A(n)}(M, F2), both computed, compared on
// s <= s_max, t <= t_max.
ChangeOfRingsReport change_of_rings_check(const ModulePtr& m, int cap, int s_max, int t_max,
                                          int threads = 1);

// Cache files ------------------------------------------------------------
std::string module_content_hash(const FpModule& m);  // stable FNV-1a hex

void write_resolution_file(const FreeResolution& res, const std::string& path);

// Parses and verifies the header against the supplied module; throws on any
// mismatch.
FreeResolution read_resolution_file(const std::string& path, const ModulePtr& m);

}  // namespace stx
