#pragma once

#include "dq/poly.hpp"
#include "dq/series.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dq::starops {

using symcore::Poly;
using symcore::Scalar;
using symcore::TruncSeries;
using symcore::VarKind;

/// Skew contravariant 2-tensor with polynomial components; only i<j entries
/// are stored, skew completion is implied.
class PoissonTensor {
  public:
    PoissonTensor(int dim, VarKind kind) : dim_(dim), kind_(kind) {
        if (dim < 2) throw std::invalid_argument("PoissonTensor: dimension must be >= 2");
    }

    /// Canonical constant tensor on (p1..pl, q1..ql): block form (0 -I; I 0),
    /// i.e. Lambda^{q_i p_i} = +1, inducing P(u,v) = sum_i (du/dq_i dv/dp_i - du/dp_i dv/dq_i).
    static PoissonTensor canonical(int ell) {
        PoissonTensor t(2 * ell, VarKind::PhaseSpace);
        for (int i = 0; i < ell; ++i)
            t.set(i, ell + i, Poly::constant(2 * ell, VarKind::PhaseSpace, Scalar(-1)));  // Lambda^{p_i q_i} = -1
        return t;
    }

    /// Lie-Poisson tensor for so(3) on R^3: Lambda^{ij} = eps^{ijk} x_k.
    static PoissonTensor so3() {
        PoissonTensor t(3, VarKind::Cartesian);
        t.set(0, 1, Poly::x(3, 2));
        t.set(1, 2, Poly::x(3, 0));
        t.set(0, 2, -Poly::x(3, 1));
        return t;
    }

    int dim() const { return dim_; }
    VarKind kind() const { return kind_; }

    void set(int i, int j, Poly value) {
        check_index(i);
        check_index(j);
        if (i == j) throw std::invalid_argument("PoissonTensor: diagonal entries are zero by skewness");
        if (i > j) {
            std::swap(i, j);
            value = -value;
        }
        if (value.is_zero())
            comps_.erase({i, j});
        else
            comps_[{i, j}] = std::move(value);
    }

    /// Component with skew completion, any index order.
    Poly component(int i, int j) const {
        check_index(i);
        check_index(j);
        if (i == j) return Poly::zero(dim_, kind_);
        bool flip = i > j;
        if (flip) std::swap(i, j);
        auto it = comps_.find({i, j});
        if (it == comps_.end()) return Poly::zero(dim_, kind_);
        return flip ? -it->second : it->second;
    }

    /// Induced bracket P(u,v) = sum_{i<j} Lambda^{ij} (d_i u d_j v - d_j u d_i v).
    Poly bracket(const Poly& u, const Poly& v) const {
        if (u.nvars() != dim_ || v.nvars() != dim_)
            throw std::invalid_argument("PoissonTensor: dimension mismatch");
        Poly acc = Poly::zero(dim_, kind_);
        for (const auto& [ij, lam] : comps_)
            acc += lam * (u.derive(ij.first) * v.derive(ij.second) - u.derive(ij.second) * v.derive(ij.first));
        return acc;
    }

    const std::map<std::pair<int, int>, Poly>& stored() const { return comps_; }

  private:
    void check_index(int i) const {
        if (i < 0 || i >= dim_) throw std::invalid_argument("PoissonTensor: index out of range");
    }

    int dim_;
    VarKind kind_;
    std::map<std::pair<int, int>, Poly> comps_;
};

/// Canonical Poisson bracket on phase space, P(q_i, p_i) = +1.
inline Poly poisson(const Poly& u, const Poly& v) {
    if (u.nvars() != v.nvars() || u.kind() != v.kind())
        throw std::invalid_argument("poisson: dimension mismatch");
    if (u.kind() != VarKind::PhaseSpace) throw std::invalid_argument("poisson: phase-space polys required");
    int l = u.ell();
    Poly acc = Poly::zero(u.nvars(), u.kind());
    for (int i = 0; i < l; ++i)
        acc += u.derive(l + i) * v.derive(i) - u.derive(i) * v.derive(l + i);
    return acc;
}

/// Bracket induced by an arbitrary tensor.
inline Poly poisson(const PoissonTensor& t, const Poly& u, const Poly& v) { return t.bracket(u, v); }

namespace detail {

/// Enumerates multi-index pairs (a, b) over the ell coordinate pairs, building
/// the derivatives incrementally, and calls
///   f(r = |a|+|b|, 1/(a! b!) * (-1)^{|b|}, dq^a dp^b u, dp^a dq^b v)
/// for every assignment on which neither derivative vanished. P^r is the sum
/// of r! times these terms over |a|+|b| = r; the Moyal product weights them
/// with nu^r instead.
template <typename F>
void for_each_bidiff_term(const Poly& u, const Poly& v, int rmax, F&& f) {
    int l = u.ell();
    // slots 0..l-1 carry a_i (q-derivative on u, p-derivative on v),
    // slots l..2l-1 carry b_i (p-derivative on u, q-derivative on v).
    auto rec = [&](auto&& self, int slot, int used, const Poly& du, const Poly& dv, const Scalar& inv_denom,
                   int b_total) -> void {
        if (slot == 2 * l) {
            f(used, b_total % 2 == 0 ? inv_denom : -inv_denom, du, dv);
            return;
        }
        Poly cur_u = du, cur_v = dv;
        Scalar denom = inv_denom;
        for (int e = 0; used + e <= rmax; ++e) {
            if (e > 0) {
                int i = slot % l;
                bool is_b = slot >= l;
                cur_u = cur_u.derive(is_b ? i : l + i);
                if (cur_u.is_zero()) break;
                cur_v = cur_v.derive(is_b ? l + i : i);
                if (cur_v.is_zero()) break;
                denom /= Scalar(e);
            }
            self(self, slot + 1, used + e, cur_u, cur_v, denom, b_total + (slot >= l ? e : 0));
        }
    };
    rec(rec, 0, 0, u, v, Scalar::one(), 0);
}

}  // namespace detail

/// r-th power of the Poisson bidifferential operator on the canonical tensor:
/// P^r(u,v) = Lambda^{i1 j1} ... Lambda^{ir jr} (d_{i1..ir} u)(d_{j1..jr} v).
inline Poly poisson_power(const Poly& u, const Poly& v, int r) {
    if (u.nvars() != v.nvars() || u.kind() != v.kind())
        throw std::invalid_argument("poisson_power: dimension mismatch");
    if (u.kind() != VarKind::PhaseSpace) throw std::invalid_argument("poisson_power: phase-space polys required");
    if (r < 1) throw std::invalid_argument("poisson_power: r must be >= 1 (use plain multiplication for r = 0)");
    Poly acc = Poly::zero(u.nvars(), u.kind());
    Scalar rfact = symcore::factorial(static_cast<unsigned>(r));
    detail::for_each_bidiff_term(u, v, r, [&](int used, const Scalar& c, const Poly& du, const Poly& dv) {
        if (used == r) acc += (rfact * c) * (du * dv);
    });
    return acc;
}

/// Exact Moyal product u *_M v = exp(nu P)(u, v) with nu = i hbar / 2.
/// The sum over r terminates on polynomials, so the result is exact.
inline Poly moyal(const Poly& u, const Poly& v) {
    if (u.nvars() != v.nvars() || u.kind() != v.kind())
        throw std::invalid_argument("moyal: dimension mismatch");
    if (u.kind() != VarKind::PhaseSpace) throw std::invalid_argument("moyal: phase-space polys required");
    Poly acc = Poly::zero(u.nvars(), u.kind());
    int rmax = std::min(std::max(u.degree(), 0), std::max(v.degree(), 0));
    // nu^r = i^r 2^{-r} hbar^r, precomputed as scalars
    std::vector<Scalar> nu_scalar(static_cast<std::size_t>(rmax) + 1, Scalar::one());
    for (int r = 1; r <= rmax; ++r)
        nu_scalar[static_cast<std::size_t>(r)] = nu_scalar[static_cast<std::size_t>(r - 1)] * Scalar::i() * Scalar(1, 2);
    detail::for_each_bidiff_term(u, v, rmax, [&](int r, const Scalar& c, const Poly& du, const Poly& dv) {
        acc += ((nu_scalar[static_cast<std::size_t>(r)] * c) * (du * dv)).shift_hbar(r);
    });
    return acc;
}

/// Moyal bracket M(u,v) = (2 nu)^{-1} (u*v - v*u) = nu^{-1} sinh(nu P)(u,v).
inline Poly moyal_bracket(const Poly& u, const Poly& v) {
    Poly comm = moyal(u, v) - moyal(v, u);
    // (2 nu)^{-1} = (i hbar)^{-1} = -i hbar^{-1}
    return (Scalar::i_pow(-1) * comm).shift_hbar(-1);
}

/// Preferred observables for the canonical structure: polynomials of maximal
/// order 2 in the phase-space coordinates (all third partials vanish), which
/// is equivalent to the star-commutator action reducing to the Poisson action.
inline bool in_preferred_algebra(const Poly& a) {
    if (a.kind() != VarKind::PhaseSpace) throw std::invalid_argument("in_preferred_algebra: phase-space poly required");
    return a.degree() <= 2;
}

/// Conformal Poisson bracket P_beta(u,v) = f P(u,v) + u P(f,v) - P(f,u) v.
inline Poly conformal_poisson(const Poly& u, const Poly& v, const Poly& f) {
    return f * poisson(u, v) + u * poisson(f, v) - poisson(f, u) * v;
}

/// Rubio-type composition law u ~* v = u * f * v for a beta-series f with
/// invertible scalar constant term (typically f_0 = 1).
inline TruncSeries conformal_star(const Poly& u, const Poly& v, const TruncSeries& f) {
    if (f.var() != symcore::SeriesVar::Beta)
        throw std::invalid_argument("conformal_star: f must be a beta-series");
    const Poly& f0 = f[0];
    if (f0.is_zero()) throw std::invalid_argument("conformal_star: zero constant term in f");
    if (!f0.coordinate_free())
        throw std::invalid_argument("conformal_star: constant term of f must be scalar");
    TruncSeries r(f.var(), f.order(), f.nvars(), f.kind());
    for (int k = 0; k <= f.order(); ++k) r[k] = moyal(moyal(u, f[k]), v);
    return r;
}

}  // namespace dq::starops
