#pragma once

#include "dq/multidiff.hpp"
#include "dq/poisson.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace dq::cohomlab {

// ---------------------------------------------------------------------------
// Coboundary operators
// ---------------------------------------------------------------------------

/// Hochschild coboundary of a k-cochain (for the pointwise product):
/// bC(u0..uk) = u0 C(u1..uk) + sum_i (-1)^i C(..., u_{i-1} u_i, ...)
///            + (-1)^{k+1} C(u0..u_{k-1}) uk.
inline MultiDiffOp hochschild_b(const MultiDiffOp& c) {
    int k = c.arity();
    int nv = c.nvars();
    VarKind kind = c.kind();
    MultiDiffOp r(k + 1, nv, kind);
    for (const auto& [key, coeff] : c.terms()) {
        {  // u0 * C(u1..uk)
            MultiDiffOp::SlotKey k2;
            k2.reserve(static_cast<std::size_t>(k) + 1);
            k2.push_back(MultiIndex::zero());
            for (const auto& mi : key) k2.push_back(mi);
            r.add_term(std::move(k2), coeff);
        }
        for (int i = 1; i <= k; ++i) {  // C(u0,..,u_{i-1} u_i,..,uk), sign (-1)^i
            const MultiIndex& alpha = key[static_cast<std::size_t>(i - 1)];
            Scalar sign = (i % 2 == 0) ? Scalar::one() : Scalar(-1);
            detail::for_each_split(alpha, nv, 2, [&](const std::vector<MultiIndex>& sp, const Scalar& mult) {
                MultiDiffOp::SlotKey k2;
                k2.reserve(static_cast<std::size_t>(k) + 1);
                for (int s = 0; s < i - 1; ++s) k2.push_back(key[static_cast<std::size_t>(s)]);
                k2.push_back(sp[0]);
                k2.push_back(sp[1]);
                for (int s = i; s < k; ++s) k2.push_back(key[static_cast<std::size_t>(s)]);
                r.add_term(std::move(k2), (sign * mult) * coeff);
            });
        }
        {  // (-1)^{k+1} C(u0..u_{k-1}) * uk
            MultiDiffOp::SlotKey k2;
            k2.reserve(static_cast<std::size_t>(k) + 1);
            for (const auto& mi : key) k2.push_back(mi);
            k2.push_back(MultiIndex::zero());
            Scalar sign = ((k + 1) % 2 == 0) ? Scalar::one() : Scalar(-1);
            r.add_term(std::move(k2), sign * coeff);
        }
    }
    return r;
}

/// Chevalley-Eilenberg coboundary of a skew k-cochain with respect to the
/// bracket induced by `tensor`:
/// dB(u0..uk) = sum_j (-1)^j {u_j, B(.. u_j omitted ..)}
///            + sum_{i<j} (-1)^{i+j} B({u_i,u_j}, .. u_i,u_j omitted ..).
inline MultiDiffOp chevalley_d(const MultiDiffOp& b, const PoissonTensor& tensor) {
    if (b.nvars() != tensor.dim() || b.kind() != tensor.kind())
        throw std::invalid_argument("chevalley_d: cochain/tensor context mismatch");
    if (b.arity() > 1 && !b.is_skew()) throw std::invalid_argument("chevalley_d: cochain must be skew-symmetric");
    int k = b.arity();
    int nv = b.nvars();
    VarKind kind = b.kind();
    MultiDiffOp r(k + 1, nv, kind);

    // Precollect tensor entries: (a, b, lambda) with a < b; skew completion
    // handled by emitting both orientations with signs.
    struct Entry {
        int a, bidx;
        Poly lam;
    };
    std::vector<Entry> entries;
    for (const auto& [ij, lam] : tensor.stored()) entries.push_back({ij.first, ij.second, lam});

    for (const auto& [key, coeff] : b.terms()) {
        // Type 1: (-1)^j {u_j, coeff * prod_s d^{a_s} u_{slot(s)}}
        // The new argument list is (u_0 .. u_k); u_j is the bracket partner,
        // B's slots map to the remaining arguments in order.
        for (int j = 0; j <= k; ++j) {
            Scalar sign = (j % 2 == 0) ? Scalar::one() : Scalar(-1);
            auto emit_type1 = [&](int da, int db, const Poly& lam) {
                // lam * (d_da u_j) * d_db(coeff * prod d^{a_s} u_s)
                // Leibniz on the second factor: over coeff and the k slots.
                // derivative on the coefficient:
                {
                    Poly c2 = sign * (lam * coeff.derive(db));
                    if (!c2.is_zero()) {
                        MultiDiffOp::SlotKey k2;
                        k2.reserve(static_cast<std::size_t>(k) + 1);
                        int s = 0;
                        for (int pos = 0; pos <= k; ++pos) {
                            if (pos == j)
                                k2.push_back(MultiIndex::unit(da));
                            else
                                k2.push_back(key[static_cast<std::size_t>(s++)]);
                        }
                        r.add_term(std::move(k2), std::move(c2));
                    }
                }
                // derivative bumps one slot:
                for (int bump = 0; bump < k; ++bump) {
                    Poly c2 = sign * (lam * coeff);
                    if (c2.is_zero()) continue;
                    MultiDiffOp::SlotKey k2;
                    k2.reserve(static_cast<std::size_t>(k) + 1);
                    int s = 0;
                    for (int pos = 0; pos <= k; ++pos) {
                        if (pos == j) {
                            k2.push_back(MultiIndex::unit(da));
                        } else {
                            MultiIndex mi = key[static_cast<std::size_t>(s)];
                            if (s == bump) mi = mi.bump(db);
                            k2.push_back(mi);
                            ++s;
                        }
                    }
                    r.add_term(std::move(k2), std::move(c2));
                }
            };
            for (const auto& e : entries) {
                emit_type1(e.a, e.bidx, e.lam);        // Lambda^{ab} d_a u_j d_b X
                emit_type1(e.bidx, e.a, -e.lam);       // skew completion
            }
        }

        // Type 2: (-1)^{i+j} B({u_i, u_j}, rest). B's first slot receives the
        // bracket; three-way Leibniz over (lambda, u_i, u_j).
        const MultiIndex& alpha = key[0];
        for (int i = 0; i < k + 1; ++i) {
            for (int j = i + 1; j < k + 1; ++j) {
                Scalar sign = ((i + j) % 2 == 0) ? Scalar::one() : Scalar(-1);
                for (const auto& e : entries) {
                    detail::for_each_split(alpha, nv, 3, [&](const std::vector<MultiIndex>& sp, const Scalar& mult) {
                        Poly dlam = apply_derivative(e.lam, sp[0]);
                        if (dlam.is_zero()) return;
                        Poly c2 = (sign * mult) * (coeff * dlam);
                        if (c2.is_zero()) return;
                        // orientation 1: d_a hits u_i, d_b hits u_j
                        auto build = [&](int da, int db, const Poly& cc) {
                            MultiDiffOp::SlotKey k2(static_cast<std::size_t>(k) + 1);
                            k2[static_cast<std::size_t>(i)] = sp[1].bump(da);
                            k2[static_cast<std::size_t>(j)] = sp[2].bump(db);
                            int s = 1;
                            for (int pos = 0; pos <= k; ++pos) {
                                if (pos == i || pos == j) continue;
                                k2[static_cast<std::size_t>(pos)] = key[static_cast<std::size_t>(s++)];
                            }
                            r.add_term(std::move(k2), cc);
                        };
                        build(e.a, e.bidx, c2);
                        build(e.bidx, e.a, -c2);
                    });
                }
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Deformation obstruction equations
// ---------------------------------------------------------------------------

/// The cochain list of a star product u*v = uv + sum_r nu^r C_r(u,v).
/// For Moyal on polynomials the series terminates; `exact` records that.
struct StarCochains {
    std::vector<MultiDiffOp> c;  // c[r-1] = C_r
    bool exact = false;

    int order() const { return static_cast<int>(c.size()); }
    const MultiDiffOp& at(int r) const {
        if (r < 1 || r > order()) throw std::out_of_range("StarCochains: order out of range");
        return c[static_cast<std::size_t>(r - 1)];
    }

    static StarCochains moyal(int ell, int order) {
        StarCochains s;
        s.exact = true;
        for (int r = 1; r <= order; ++r) s.c.push_back(MultiDiffOp::moyal_cochain(r, ell));
        return s;
    }
};

struct HochschildObstruction {
    std::function<Poly(const Poly&, const Poly&, const Poly&)> lhs;  // D_r evaluator
    MultiDiffOp rhs;                                                 // b C_r
};

/// Order-r associativity equation D_r = b C_r (j,k >= 1 in the sum).
inline HochschildObstruction obstruction_hochschild(const StarCochains& cs, int r) {
    if (r < 1 || cs.order() < r) throw std::invalid_argument("obstruction_hochschild: cochains must reach order r");
    auto cochains = cs;  // capture by value; cochains are immutable
    auto lhs = [cochains, r](const Poly& u, const Poly& v, const Poly& w) {
        Poly acc = Poly::zero(u.nvars(), u.kind());
        for (int j = 1; j < r; ++j) {
            int k = r - j;
            const auto& cj = cochains.at(j);
            const auto& ck = cochains.at(k);
            acc += cj.apply({ck.apply({u, v}), w}) - cj.apply({u, ck.apply({v, w})});
        }
        return acc;
    };
    return {lhs, hochschild_b(cs.at(r))};
}

struct ChevalleyObstruction {
    std::function<Poly(const Poly&, const Poly&, const Poly&)> lhs;  // E_r evaluator
    MultiDiffOp rhs;                                                 // d B_r
};

/// Order-r Jacobi equation E_r = dB_r for a deformed bracket
/// [u,v] = {u,v} + sum_r lambda^r B_r(u,v) with skew 2-cochains B_r.
inline ChevalleyObstruction obstruction_chevalley(const std::vector<MultiDiffOp>& bs, int r,
                                                  const PoissonTensor& tensor) {
    if (r < 1 || static_cast<int>(bs.size()) < r)
        throw std::invalid_argument("obstruction_chevalley: cochains must reach order r");
    for (const auto& b : bs)
        if (!b.is_skew()) throw std::invalid_argument("obstruction_chevalley: cochains must be skew");
    auto list = bs;
    auto lhs = [list, r](const Poly& u, const Poly& v, const Poly& w) {
        Poly acc = Poly::zero(u.nvars(), u.kind());
        for (int j = 1; j < r; ++j) {
            int k = r - j;
            const auto& bj = list[static_cast<std::size_t>(j - 1)];
            const auto& bk = list[static_cast<std::size_t>(k - 1)];
            // cyclic sum S B_j(B_k(u,v), w)
            acc += bj.apply({bk.apply({u, v}), w});
            acc += bj.apply({bk.apply({v, w}), u});
            acc += bj.apply({bk.apply({w, u}), v});
        }
        return acc;
    };
    return {lhs, chevalley_d(bs[static_cast<std::size_t>(r - 1)], tensor)};
}

// ---------------------------------------------------------------------------
// Probe-basis equality and the coboundary-preimage solver
// ---------------------------------------------------------------------------

/// All monomials of total degree <= bound in the given context (hbar-free).
inline std::vector<Poly> monomial_probes(int nvars, VarKind kind, int bound) {
    std::vector<Poly> out;
    std::vector<int> exp(static_cast<std::size_t>(nvars), 0);
    auto rec = [&](auto&& self, int var, int remaining) -> void {
        if (var == nvars) {
            Poly m = Poly::one(nvars, kind);
            for (int v = 0; v < nvars; ++v)
                for (int k = 0; k < exp[static_cast<std::size_t>(v)]; ++k) m = m * Poly::variable(nvars, kind, v);
            out.push_back(m);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            exp[static_cast<std::size_t>(var)] = e;
            self(self, var + 1, remaining - e);
        }
        exp[static_cast<std::size_t>(var)] = 0;
    };
    rec(rec, 0, bound);
    return out;
}

/// Decide cochain equality on the finite probe basis of monomial tuples up to
/// `bound` total degree per argument (default: max derivative order + 2).
inline bool probe_equal(const MultiDiffOp& a, const MultiDiffOp& b, int bound = -1) {
    if (a.arity() != b.arity() || a.nvars() != b.nvars() || a.kind() != b.kind()) return false;
    if (bound < 0) bound = std::max(a.max_order(), b.max_order()) + 2;
    auto probes = monomial_probes(a.nvars(), a.kind(), bound);
    std::vector<Poly> args(static_cast<std::size_t>(a.arity()), Poly::zero(a.nvars(), a.kind()));
    auto rec = [&](auto&& self, int slot) -> bool {
        if (slot == a.arity()) return a.apply(args) == b.apply(args);
        for (const auto& m : probes) {
            args[static_cast<std::size_t>(slot)] = m;
            if (!self(self, slot + 1)) return false;
        }
        return true;
    };
    return rec(rec, 0);
}

/// Ansatz bounds for the preimage search.
struct PreimageAnsatz {
    int max_derivative_order = 2;
    int max_coeff_degree = 2;
};

enum class CoboundaryTheory { Hochschild, Chevalley };

/// Solve bC = Z (or dC = Z) for C in the finite ansatz space by exact linear
/// algebra over the Gaussian rationals. Returns nullopt when no solution
/// exists within the ansatz (not a cohomological statement). Z must be a
/// cocycle of its theory; otherwise the call is rejected with the residual.
inline std::optional<MultiDiffOp> coboundary_preimage(const MultiDiffOp& z, CoboundaryTheory theory,
                                                      const PreimageAnsatz& ansatz,
                                                      const PoissonTensor* tensor = nullptr) {
    int nv = z.nvars();
    VarKind kind = z.kind();
    if (theory == CoboundaryTheory::Chevalley && tensor == nullptr)
        throw std::invalid_argument("coboundary_preimage: Chevalley theory needs a Poisson tensor");

    auto coboundary = [&](const MultiDiffOp& c) {
        return theory == CoboundaryTheory::Hochschild ? hochschild_b(c) : chevalley_d(c, *tensor);
    };

    // cocycle precheck
    MultiDiffOp residual = coboundary(z);
    if (!residual.is_zero())
        throw std::invalid_argument("coboundary_preimage: input is not a cocycle; residual = " + residual.to_string());

    if (z.arity() < 2) throw std::invalid_argument("coboundary_preimage: need a cochain of arity >= 2");
    int carity = z.arity() - 1;

    // Ansatz basis: one generator per (slot multi-indices, coefficient monomial).
    std::vector<MultiDiffOp> basis;
    {
        std::vector<MultiIndex> idxs;
        std::vector<int> exp(static_cast<std::size_t>(nv), 0);
        std::vector<MultiIndex> all_idx;
        auto rec_idx = [&](auto&& self, int var, int remaining) -> void {
            if (var == nv) {
                MultiIndex mi;
                for (int v = 0; v < nv; ++v) mi.m.set_exp(v, exp[static_cast<std::size_t>(v)]);
                all_idx.push_back(mi);
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                exp[static_cast<std::size_t>(var)] = e;
                self(self, var + 1, remaining - e);
            }
            exp[static_cast<std::size_t>(var)] = 0;
        };
        rec_idx(rec_idx, 0, ansatz.max_derivative_order);
        auto coeff_monos = monomial_probes(nv, kind, ansatz.max_coeff_degree);
        std::vector<MultiIndex> slots(static_cast<std::size_t>(carity));
        auto rec_slots = [&](auto&& self, int s) -> void {
            if (s == carity) {
                for (const auto& cm : coeff_monos) {
                    MultiDiffOp g(carity, nv, kind);
                    g.add_term(slots, cm);
                    basis.push_back(g);
                }
                return;
            }
            for (const auto& mi : all_idx) {
                slots[static_cast<std::size_t>(s)] = mi;
                self(self, s + 1);
            }
        };
        rec_slots(rec_slots, 0);
    }

    // Flatten coboundaries into exact linear equations over Scalar.
    using RowKey = std::pair<std::vector<std::uint64_t>, std::uint64_t>;  // (slot bits, coeff monomial bits)
    std::map<RowKey, std::size_t> row_of;
    auto rows_of_op = [&](const MultiDiffOp& op, std::vector<std::pair<std::size_t, Scalar>>& out, bool grow) {
        for (const auto& [key, coeff] : op.terms()) {
            std::vector<std::uint64_t> kb;
            kb.reserve(key.size());
            for (const auto& mi : key) kb.push_back(mi.m.bits);
            for (const auto& [mono, c] : coeff.terms()) {
                RowKey rk{kb, mono.bits};
                auto it = row_of.find(rk);
                if (it == row_of.end()) {
                    if (!grow) {
                        out.clear();
                        out.emplace_back(static_cast<std::size_t>(-1), Scalar::zero());  // marker: outside span
                        return;
                    }
                    it = row_of.emplace(rk, row_of.size()).first;
                }
                out.emplace_back(it->second, c);
            }
        }
    };

    std::vector<std::vector<std::pair<std::size_t, Scalar>>> cols;
    cols.reserve(basis.size());
    for (const auto& g : basis) {
        std::vector<std::pair<std::size_t, Scalar>> col;
        rows_of_op(coboundary(g), col, true);
        cols.push_back(std::move(col));
    }
    std::vector<std::pair<std::size_t, Scalar>> zcol;
    rows_of_op(z, zcol, false);
    if (zcol.size() == 1 && zcol[0].first == static_cast<std::size_t>(-1)) return std::nullopt;

    std::size_t nrows = row_of.size(), ncols = basis.size();
    std::vector<std::vector<Scalar>> m(nrows, std::vector<Scalar>(ncols + 1, Scalar::zero()));
    for (std::size_t c = 0; c < ncols; ++c)
        for (const auto& [r, val] : cols[c]) m[r][c] += val;
    for (const auto& [r, val] : zcol) m[r][ncols] += val;

    // exact Gaussian elimination
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t c = 0; c < ncols && rank < nrows; ++c) {
        std::size_t sel = nrows;
        for (std::size_t r = rank; r < nrows; ++r)
            if (!m[r][c].is_zero()) {
                sel = r;
                break;
            }
        if (sel == nrows) continue;
        std::swap(m[rank], m[sel]);
        Scalar inv = Scalar::one() / m[rank][c];
        for (std::size_t cc = c; cc <= ncols; ++cc) m[rank][cc] *= inv;
        for (std::size_t r = 0; r < nrows; ++r) {
            if (r == rank || m[r][c].is_zero()) continue;
            Scalar f = m[r][c];
            for (std::size_t cc = c; cc <= ncols; ++cc) m[r][cc] -= f * m[rank][cc];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    // consistency: no row (0 .. 0 | nonzero)
    for (std::size_t r = rank; r < nrows; ++r)
        if (!m[r][ncols].is_zero()) return std::nullopt;

    std::vector<Scalar> x(ncols, Scalar::zero());
    for (std::size_t r = 0; r < rank; ++r) x[pivot_col[r]] = m[r][ncols];

    MultiDiffOp result(carity, nv, kind);
    for (std::size_t c = 0; c < ncols; ++c)
        if (!x[c].is_zero()) result += x[c] * basis[c];
    // verify (guards against an ansatz basis whose coboundaries collide)
    if (coboundary(result) != z) return std::nullopt;
    return result;
}

// ---------------------------------------------------------------------------
// Schouten brackets of polynomial bivectors
// ---------------------------------------------------------------------------

/// Fully skew trivector; components stored for i<j<k.
struct Trivector {
    int dim;
    VarKind kind;
    std::map<std::tuple<int, int, int>, Poly> comps;

    Trivector(int d, VarKind k) : dim(d), kind(k) {}

    void add(int i, int j, int k, const Poly& v) {
        if (v.is_zero()) return;
        auto key = std::make_tuple(i, j, k);
        auto it = comps.find(key);
        if (it == comps.end())
            comps.emplace(key, v);
        else {
            it->second += v;
            if (it->second.is_zero()) comps.erase(it);
        }
    }
    bool is_zero() const { return comps.empty(); }
    Poly component(int i, int j, int k) const {
        auto it = comps.find(std::make_tuple(i, j, k));
        return it == comps.end() ? Poly::zero(dim, kind) : it->second;
    }
};

/// Mixed Schouten-Nijenhuis bracket of two bivectors (up to normalization):
/// [A,B]^{ijk} = sum_cyc(i,j,k) sum_l (A^{il} d_l B^{jk} + B^{il} d_l A^{jk}).
inline Trivector schouten_mixed(const PoissonTensor& a, const PoissonTensor& b) {
    if (a.dim() != b.dim() || a.kind() != b.kind())
        throw std::invalid_argument("schouten_mixed: dimension mismatch");
    int d = a.dim();
    Trivector t(d, a.kind());
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (int k = j + 1; k < d; ++k) {
                Poly acc = Poly::zero(d, a.kind());
                int cyc[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
                for (auto& c : cyc)
                    for (int l = 0; l < d; ++l) {
                        acc += a.component(c[0], l) * b.component(c[1], c[2]).derive(l);
                        acc += b.component(c[0], l) * a.component(c[1], c[2]).derive(l);
                    }
                t.add(i, j, k, acc);
            }
    return t;
}

/// Self-bracket [L, L]; zero iff the induced bracket satisfies Jacobi.
inline Trivector schouten_self(const PoissonTensor& l) { return schouten_mixed(l, l); }

/// Order-by-order Poisson-series check: residual per hbar order m is
/// sum_{a+b=m} [Lambda_a, Lambda_b] for the series sum_n Lambda_n hbar^n.
inline std::vector<Trivector> poisson_series_check(const std::vector<PoissonTensor>& ls) {
    if (ls.empty()) throw std::invalid_argument("poisson_series_check: empty series");
    int d = ls.front().dim();
    VarKind kind = ls.front().kind();
    for (const auto& l : ls)
        if (l.dim() != d || l.kind() != kind) throw std::invalid_argument("poisson_series_check: dimension mismatch");
    int kmax = static_cast<int>(ls.size());
    std::vector<Trivector> out;
    for (int m = 2; m <= 2 * kmax; ++m) {
        Trivector res(d, kind);
        for (int a = 1; a < m; ++a) {
            int b = m - a;
            if (a > kmax || b > kmax) continue;
            Trivector part = schouten_mixed(ls[static_cast<std::size_t>(a - 1)], ls[static_cast<std::size_t>(b - 1)]);
            for (const auto& [key, val] : part.comps) res.add(std::get<0>(key), std::get<1>(key), std::get<2>(key), val);
        }
        out.push_back(std::move(res));
    }
    return out;
}

/// Direct cyclic Jacobi residual of the induced bracket on coordinate triples;
/// cross-checks schouten_self through an independent route.
inline Poly jacobi_residual_on_coordinates(const PoissonTensor& l, int i, int j, int k) {
    Poly xi = Poly::variable(l.dim(), l.kind(), i);
    Poly xj = Poly::variable(l.dim(), l.kind(), j);
    Poly xk = Poly::variable(l.dim(), l.kind(), k);
    return l.bracket(l.bracket(xi, xj), xk) + l.bracket(l.bracket(xj, xk), xi) + l.bracket(l.bracket(xk, xi), xj);
}

}  // namespace dq::cohomlab
