#pragma once

#include "dq/cohomology.hpp"
#include "dq/multidiff.hpp"
#include "dq/poisson.hpp"

#include <stdexcept>
#include <vector>

namespace dq::starops {

using cohomlab::MultiDiffOp;
using cohomlab::StarCochains;

/// Composition of 1-cochains (A o B)(u) = A(B(u)).
inline MultiDiffOp compose1(const MultiDiffOp& a, const MultiDiffOp& b) {
    if (a.arity() != 1 || b.arity() != 1) throw std::invalid_argument("compose1: 1-cochains required");
    return b.compose_outer(a);
}

/// Formal inverse of T = I + sum_r nu^r T_r through order R:
/// S_r = -T_r - sum_{j=1}^{r-1} S_j o T_{r-j}.
inline std::vector<MultiDiffOp> invert_transport(const std::vector<MultiDiffOp>& t, int order) {
    std::vector<MultiDiffOp> s;
    for (int r = 1; r <= order; ++r) {
        MultiDiffOp sr = -t[static_cast<std::size_t>(r - 1)];
        for (int j = 1; j < r; ++j)
            sr -= compose1(s[static_cast<std::size_t>(j - 1)], t[static_cast<std::size_t>(r - 1 - j)]);
        s.push_back(std::move(sr));
    }
    return s;
}

namespace detail_eq {

/// Validates a transport list T_0..T_R: leading term must be the identity.
inline void check_transport(const std::vector<MultiDiffOp>& ts, int order) {
    if (static_cast<int>(ts.size()) < order + 1)
        throw std::invalid_argument("transport: need T_0..T_R inclusive");
    const MultiDiffOp& t0 = ts.front();
    if (t0 != MultiDiffOp::identity(t0.nvars(), t0.kind()))
        throw std::invalid_argument("transport: non-invertible (leading term is not the identity)");
    for (const auto& t : ts)
        if (t.arity() != 1) throw std::invalid_argument("transport: T_r must be 1-cochains");
}

}  // namespace detail_eq

/// Cochains of the transported product *' = T^{-1}(T u * T v), expanded
/// through nu^R: C'_m = sum_{i+j+k+l=m} S_i o C_j o (T_k (x) T_l), where
/// C_j are the base star cochains (C_0 = multiplication).
inline StarCochains transported_cochains(const std::vector<MultiDiffOp>& ts, const StarCochains& base, int order) {
    detail_eq::check_transport(ts, order);
    if (!base.exact && base.order() < order)
        throw std::invalid_argument("transported_cochains: base truncated below requested order");
    int nv = ts.front().nvars();
    auto kind = ts.front().kind();
    auto tr = [&](int r) -> const MultiDiffOp& { return ts[static_cast<std::size_t>(r)]; };

    std::vector<MultiDiffOp> tails(ts.begin() + 1, ts.begin() + 1 + order);
    std::vector<MultiDiffOp> inv = invert_transport(tails, order);
    MultiDiffOp ident = MultiDiffOp::identity(nv, kind);
    auto sr = [&](int r) -> const MultiDiffOp& { return r == 0 ? ident : inv[static_cast<std::size_t>(r - 1)]; };
    auto cj = [&](int j) -> MultiDiffOp {
        if (j == 0) return MultiDiffOp::multiplication(nv, kind);
        if (j <= base.order()) return base.at(j);
        return MultiDiffOp::zero(2, nv, kind);  // exact base: series terminated
    };

    StarCochains out;
    out.exact = false;
    for (int m = 1; m <= order; ++m) {
        MultiDiffOp cm = MultiDiffOp::zero(2, nv, kind);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; i + j <= m; ++j)
                for (int k = 0; i + j + k <= m; ++k) {
                    int l = m - i - j - k;
                    MultiDiffOp piece = cj(j);
                    if (k > 0) piece = piece.compose_slot(0, tr(k));
                    if (l > 0) piece = piece.compose_slot(1, tr(l));
                    if (i > 0) piece = piece.compose_outer(sr(i));
                    cm += piece;
                }
        out.c.push_back(std::move(cm));
    }
    return out;
}

/// u *' v through nu^R for the transported product.
inline Poly transported_product(const Poly& u, const Poly& v, const std::vector<MultiDiffOp>& ts,
                                const StarCochains& base, int order) {
    StarCochains cs = transported_cochains(ts, base, order);
    Poly acc = u * v;
    for (int m = 1; m <= order; ++m)
        acc += symcore::nu_pow(u.nvars(), u.kind(), m) * cs.at(m).apply({u, v});
    return acc;
}

// ---------------------------------------------------------------------------
// Fixed ordering transports (exact on polynomials: the operator exponentials
// terminate because the generators lower the degree)
// ---------------------------------------------------------------------------

enum class Ordering { Weyl, Standard, Normal };

namespace detail_eq {

/// exp(scale * hbar^{k} * D^k / k!) expansion applied to u; D is supplied as a
/// one-step operator. Terminates because D lowers the coordinate degree.
template <typename Step>
inline Poly apply_operator_exp(const Poly& u, const Scalar& scale, Step&& step) {
    Poly acc = u;
    Poly term = u;
    Scalar c = Scalar::one();
    for (int k = 1; !term.is_zero(); ++k) {
        term = step(term);
        if (term.is_zero()) break;
        c *= scale / Scalar(k);
        acc += (c * term).shift_hbar(k);
    }
    return acc;
}

/// exp(scale * hbar * D) u where D = sum_i d2/dp_i dq_i.
inline Poly apply_exp_mixed(const Poly& u, const Scalar& scale) {
    int l = u.ell();
    return apply_operator_exp(u, scale, [l](const Poly& t) {
        Poly d = Poly::zero(t.nvars(), t.kind());
        for (int i = 0; i < l; ++i) d += t.derive(i).derive(l + i);
        return d;
    });
}

/// exp(scale * hbar * E) u where E = sum_i (d2/dp_i^2 + d2/dq_i^2).
inline Poly apply_exp_laplace(const Poly& u, const Scalar& scale) {
    int l = u.ell();
    return apply_operator_exp(u, scale, [l](const Poly& t) {
        Poly d = Poly::zero(t.nvars(), t.kind());
        for (int i = 0; i < l; ++i) d += t.derive(i).derive(i) + t.derive(l + i).derive(l + i);
        return d;
    });
}

}  // namespace detail_eq

/// T_standard = exp(nu sum d2/dp dq); T_standard^{-1} applies -nu.
inline Poly standard_transport(const Poly& u, bool inverse = false) {
    Scalar nu = Scalar::imag_rational(1, 2);  // i/2, with one hbar power per order
    return detail_eq::apply_exp_mixed(u, inverse ? -nu : nu);
}

/// T_normal = exp((hbar/4) sum (d2/dp^2 + d2/dq^2)).
inline Poly normal_transport(const Poly& u, bool inverse = false) {
    Scalar c = Scalar::rational(1, 4);
    return detail_eq::apply_exp_laplace(u, inverse ? -c : c);
}

/// Ordering products realized as equivalence transports of Moyal:
/// u *_O v = T^{-1}(T u * T v). Exact on polynomials.
inline Poly ordering_product(const Poly& u, const Poly& v, Ordering ordering) {
    switch (ordering) {
        case Ordering::Weyl: return moyal(u, v);
        case Ordering::Standard:
            return standard_transport(moyal(standard_transport(u), standard_transport(v)), true);
        case Ordering::Normal:
            return normal_transport(moyal(normal_transport(u), normal_transport(v)), true);
    }
    throw std::logic_error("ordering_product: unreachable");
}

}  // namespace dq::starops
