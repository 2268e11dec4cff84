#pragma once

#include "dq/poisson.hpp"
#include "dq/series.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace dq::spectral {

using symcore::Poly;
using symcore::Scalar;
using symcore::SeriesVar;
using symcore::TruncSeries;
using symcore::VarKind;
using starops::moyal;
using starops::moyal_bracket;

/// n-th star power (H*)^n under the exact Moyal product.
inline Poly star_power(const Poly& h, int n) {
    if (n < 0) throw std::invalid_argument("star_power: negative power");
    Poly r = Poly::one(h.nvars(), h.kind());
    for (int k = 0; k < n; ++k) r = moyal(r, h);
    return r;
}

/// Star exponential Exp(Ht) = sum_n (1/n!) (t / i hbar)^n (H*)^n through t^K.
inline TruncSeries star_exp(const Poly& h, int order) {
    if (order < 0) throw std::invalid_argument("star_exp: negative order");
    TruncSeries r(SeriesVar::T, order, h.nvars(), h.kind());
    Poly pw = Poly::one(h.nvars(), h.kind());
    Scalar inv_fact = Scalar::one();
    for (int n = 0; n <= order; ++n) {
        if (n > 0) {
            pw = moyal(pw, h);
            inv_fact /= Scalar(n);
        }
        // (1 / i hbar)^n = (-i)^n hbar^{-n}
        Scalar c = inv_fact * Scalar::i_pow(-n);
        r[n] = (c * pw).shift_hbar(-n);
    }
    return r;
}

/// d = 0 closed-form branch exp(Ht / i hbar), valid for any H whose star
/// powers coincide with plain powers along the series (used via the quadratic
/// dispatcher, and directly for examples like H = p).
inline TruncSeries exp_flat_series(const Poly& h, int order) {
    auto arg = TruncSeries::linear(SeriesVar::T, order, (Scalar::i_pow(-1) * h).shift_hbar(-1));
    return arg.exp();
}

/// Quadratic Hamiltonian H = alpha |p|^2 + beta p.q + gamma |q|^2 on R^{2l}.
/// The sl(2) invariant d = det [[alpha, beta/2], [beta/2, gamma]] decides the
/// closed-form branch; delta = sqrt(|d|) must be rational.
class QuadraticHamiltonian {
  public:
    QuadraticHamiltonian(Scalar alpha, Scalar beta, Scalar gamma, int ell)
        : alpha_(std::move(alpha)), beta_(std::move(beta)), gamma_(std::move(gamma)), ell_(ell) {
        if (ell < 1) throw std::invalid_argument("QuadraticHamiltonian: ell must be >= 1");
        if (!alpha_.is_real() || !beta_.is_real() || !gamma_.is_real())
            throw std::invalid_argument("QuadraticHamiltonian: coefficients must be real");
        d_ = alpha_ * gamma_ - beta_ * beta_ * Scalar::rational(1, 4);
    }

    int ell() const { return ell_; }
    const Scalar& d() const { return d_; }
    int d_sign() const { return sgn(d_.re()); }

    Poly hamiltonian() const {
        int nv = 2 * ell_;
        Poly h = Poly::zero(nv, VarKind::PhaseSpace);
        for (int i = 0; i < ell_; ++i) {
            h += alpha_ * (Poly::p(ell_, i) * Poly::p(ell_, i));
            h += beta_ * (Poly::p(ell_, i) * Poly::q(ell_, i));
            h += gamma_ * (Poly::q(ell_, i) * Poly::q(ell_, i));
        }
        return h;
    }

    /// Rational square root of |d|, if it exists.
    std::optional<Scalar> delta() const {
        mpq_class a = abs(d_.re());
        if (a == 0) return Scalar::zero();
        mpz_class num = a.get_num(), den = a.get_den();
        mpz_class rn, rd;
        if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), 2)) return std::nullopt;
        if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), 2)) return std::nullopt;
        return Scalar(mpq_class(rn, rd), mpq_class(0));
    }

  private:
    Scalar alpha_, beta_, gamma_;
    int ell_;
    Scalar d_;
};

/// Taylor series through t^K of the closed forms
///   (cos delta t)^{-l}  exp((H / i hbar delta) tan(delta t))    d > 0
///   exp(Ht / i hbar)                                            d = 0
///   (cosh delta t)^{-l} exp((H / i hbar delta) tanh(delta t))   d < 0
/// Agrees exactly with star_exp(H, K); irrational delta is rejected.
inline TruncSeries quadratic_closed_form(const QuadraticHamiltonian& qh, int order) {
    int nv = 2 * qh.ell();
    Poly h = qh.hamiltonian();
    int sign = qh.d_sign();
    if (sign == 0) return exp_flat_series(h, order);

    auto delta_opt = qh.delta();
    if (!delta_opt)
        throw std::invalid_argument(
            "quadratic_closed_form: irrational delta = sqrt(|alpha gamma - beta^2/4|); rescale the Hamiltonian so "
            "|d| is a perfect rational square");
    Scalar delta = *delta_opt;

    TruncSeries trig = sign > 0 ? symcore::series_tan(SeriesVar::T, order, delta, nv, VarKind::PhaseSpace)
                                : symcore::series_tanh(SeriesVar::T, order, delta, nv, VarKind::PhaseSpace);
    TruncSeries cos_ser = sign > 0 ? symcore::series_cos(SeriesVar::T, order, delta, nv, VarKind::PhaseSpace)
                                   : symcore::series_cosh(SeriesVar::T, order, delta, nv, VarKind::PhaseSpace);
    // (H / (i hbar delta)) * trig-series, then exp, times (cos delta t)^{-l}
    Poly front = (Scalar::i_pow(-1) / delta * h).shift_hbar(-1);
    TruncSeries arg = front * trig;
    TruncSeries result = arg.exp();
    TruncSeries pref = cos_ser.inverse().pow(qh.ell());
    return pref * result;
}

/// Angular-momentum Casimir C = |p|^2 |q|^2 - (p.q)^2 - l(l-1) hbar^2 / 4.
inline Poly casimir(int ell) {
    if (ell < 2) throw std::invalid_argument("casimir: ell must be >= 2");
    int nv = 2 * ell;
    Poly p2 = Poly::zero(nv, VarKind::PhaseSpace), q2 = p2, pq = p2;
    for (int i = 0; i < ell; ++i) {
        p2 += Poly::p(ell, i) * Poly::p(ell, i);
        q2 += Poly::q(ell, i) * Poly::q(ell, i);
        pq += Poly::p(ell, i) * Poly::q(ell, i);
    }
    Scalar c = Scalar(-(ell * (ell - 1))) * Scalar::rational(1, 4);
    return p2 * q2 - pq * pq + (c * Poly::one(nv, VarKind::PhaseSpace)).shift_hbar(2);
}

/// Angular momentum generator L_ij = q_i p_j - q_j p_i.
inline Poly angular_momentum(int ell, int i, int j) {
    return Poly::q(ell, i) * Poly::p(ell, j) - Poly::q(ell, j) * Poly::p(ell, i);
}

// ---------------------------------------------------------------------------
// BCH group law at the formal (s, t) level
// ---------------------------------------------------------------------------

/// Bivariate series in (s, t), truncated at joint total order K, with star
/// multiplication on the Poly coefficients.
class BivarSeries {
  public:
    BivarSeries(int order, int nvars, VarKind kind)
        : order_(order), nvars_(nvars), kind_(kind),
          c_(static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(order + 1), Poly::zero(nvars, kind)) {
        if (order < 0) throw std::invalid_argument("BivarSeries: negative order");
    }

    int order() const { return order_; }
    const Poly& at(int m, int n) const { return c_[idx(m, n)]; }
    Poly& at(int m, int n) { return c_[idx(m, n)]; }

    bool is_zero() const {
        for (int m = 0; m <= order_; ++m)
            for (int n = 0; m + n <= order_; ++n)
                if (!at(m, n).is_zero()) return false;
        return true;
    }

    BivarSeries& operator+=(const BivarSeries& o) {
        check(o);
        for (int m = 0; m <= order_; ++m)
            for (int n = 0; m + n <= order_; ++n) at(m, n) += o.at(m, n);
        return *this;
    }
    BivarSeries& operator-=(const BivarSeries& o) {
        check(o);
        for (int m = 0; m <= order_; ++m)
            for (int n = 0; m + n <= order_; ++n) at(m, n) -= o.at(m, n);
        return *this;
    }
    friend BivarSeries operator+(BivarSeries a, const BivarSeries& b) { return a += b; }
    friend BivarSeries operator-(BivarSeries a, const BivarSeries& b) { return a -= b; }

    /// Star-Cauchy product truncated at joint order K.
    BivarSeries star(const BivarSeries& o) const {
        check(o);
        BivarSeries r(order_, nvars_, kind_);
        for (int m1 = 0; m1 <= order_; ++m1)
            for (int n1 = 0; m1 + n1 <= order_; ++n1) {
                if (at(m1, n1).is_zero()) continue;
                for (int m2 = 0; m1 + n1 + m2 <= order_; ++m2)
                    for (int n2 = 0; m1 + n1 + m2 + n2 <= order_; ++n2) {
                        if (o.at(m2, n2).is_zero()) continue;
                        r.at(m1 + m2, n1 + n2) += moyal(at(m1, n1), o.at(m2, n2));
                    }
            }
        return r;
    }

    /// Star exponential Exp(W) = sum_k (1/k!) (W / i hbar)^{*k} for a series
    /// with zero constant term.
    BivarSeries star_exp() const {
        if (!at(0, 0).is_zero()) throw std::invalid_argument("BivarSeries: star_exp needs zero constant term");
        BivarSeries acc(order_, nvars_, kind_);
        acc.at(0, 0) = Poly::one(nvars_, kind_);
        BivarSeries pw = acc;
        Scalar inv_fact = Scalar::one();
        for (int k = 1; k <= order_; ++k) {
            pw = pw.star(*this);
            inv_fact /= Scalar(k);
            Scalar c = inv_fact * Scalar::i_pow(-k);
            for (int m = 0; m <= order_; ++m)
                for (int n = 0; m + n <= order_; ++n) acc.at(m, n) += (c * pw.at(m, n)).shift_hbar(-k);
        }
        return acc;
    }

  private:
    std::size_t idx(int m, int n) const {
        if (m < 0 || n < 0 || m + n > order_) throw std::out_of_range("BivarSeries: index out of range");
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(order_ + 1) + static_cast<std::size_t>(n);
    }
    void check(const BivarSeries& o) const {
        if (order_ != o.order_ || nvars_ != o.nvars_ || kind_ != o.kind_)
            throw std::invalid_argument("BivarSeries: order/context mismatch");
    }

    int order_, nvars_;
    VarKind kind_;
    std::vector<Poly> c_;
};

/// Residual Exp(us) * Exp(vt) - Exp(BCH(us, vt)) through joint order K, with
/// the bracket [a,b] = (2 nu)^{-1}(a*b - b*a). BCH is expanded through total
/// order 4; when [u,v] star-commutes with u and v the two-term BCH is exact
/// and any K is accepted.
inline BivarSeries bch_group_law(const Poly& u, const Poly& v, int order) {
    if (u.degree() > 2 || v.degree() > 2)
        throw std::invalid_argument("bch_group_law: inputs must have degree <= 2 (preferred algebra)");
    int nv = u.nvars();
    VarKind kind = u.kind();

    Poly br = moyal_bracket(u, v);
    bool central = moyal_bracket(u, br).is_zero() && moyal_bracket(v, br).is_zero();
    if (!central && order > 4)
        throw std::invalid_argument("bch_group_law: BCH implemented through joint order 4 for non-terminating brackets");

    // Exp(us) as a bivariate series: coefficient of s^m is (1/m!)(1/i hbar)^m (u*)^m.
    auto exp_line = [&](const Poly& h, bool s_var) {
        BivarSeries e(order, nv, kind);
        Poly pw = Poly::one(nv, kind);
        Scalar inv_fact = Scalar::one();
        for (int n = 0; n <= order; ++n) {
            if (n > 0) {
                pw = moyal(pw, h);
                inv_fact /= Scalar(n);
            }
            Poly coeff = (inv_fact * Scalar::i_pow(-n) * pw).shift_hbar(-n);
            if (s_var)
                e.at(n, 0) = coeff;
            else
                e.at(0, n) = coeff;
        }
        return e;
    };

    BivarSeries lhs = exp_line(u, true).star(exp_line(v, false));

    // BCH(us, vt) through total order 4 (all shown nested brackets):
    // A + B + 1/2 [A,B] + 1/12 [A,[A,B]] + 1/12 [B,[B,A]] - 1/24 [B,[A,[A,B]]]
    BivarSeries w(order, nv, kind);
    if (order >= 1) {
        w.at(1, 0) = u;
        w.at(0, 1) = v;
    }
    if (order >= 2) w.at(1, 1) += Scalar::rational(1, 2) * br;
    if (!central) {
        if (order >= 3) {
            w.at(2, 1) += Scalar::rational(1, 12) * moyal_bracket(u, br);
            w.at(1, 2) += Scalar::rational(1, 12) * moyal_bracket(v, moyal_bracket(v, u));
        }
        if (order >= 4) w.at(2, 2) -= Scalar::rational(1, 24) * moyal_bracket(v, moyal_bracket(u, br));
    }

    return lhs - w.star_exp();
}

// ---------------------------------------------------------------------------
// Weyl-algebra homomorphism verifier
// ---------------------------------------------------------------------------

/// Element of the Weyl algebra in canonical normal order: every term is
/// Q^a P^b hbar^c with all Q factors left of all P factors, and the rewriting
/// respects [Q_i, P_j] = i hbar delta_ij.
class WeylElem {
  public:
    explicit WeylElem(int ell) : ell_(ell), terms_(Poly::zero(2 * ell, VarKind::PhaseSpace)) {}

    static WeylElem identity(int ell) {
        WeylElem w(ell);
        w.terms_ = Poly::one(2 * ell, VarKind::PhaseSpace);
        return w;
    }

    /// Internal carrier: a Poly whose variable i is P_i and ell+i is Q_i;
    /// monomials are read in normal order (Q's left of P's).
    static WeylElem from_normal_poly(int ell, Poly p) {
        WeylElem w(ell);
        w.terms_ = std::move(p);
        return w;
    }

    int ell() const { return ell_; }
    const Poly& normal_poly() const { return terms_; }
    bool is_zero() const { return terms_.is_zero(); }

    friend bool operator==(const WeylElem& a, const WeylElem& b) {
        return a.ell_ == b.ell_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const WeylElem& a, const WeylElem& b) { return !(a == b); }

    WeylElem operator+(const WeylElem& o) const { return from_normal_poly(ell_, terms_ + o.terms_); }
    WeylElem operator-(const WeylElem& o) const { return from_normal_poly(ell_, terms_ - o.terms_); }

    std::string to_string() const { return terms_.to_string(); }

  private:
    int ell_;
    Poly terms_;  // normal-ordered representation
};

/// Product of normal-ordered words per pair (independent pairs commute):
/// P^b Q^g = sum_k C(b,k) C(g,k) k! (-i hbar)^k Q^{g-k} P^{b-k}.
inline WeylElem weyl_mul(const WeylElem& a, const WeylElem& b) {
    if (a.ell() != b.ell()) throw std::invalid_argument("weyl_mul: rank mismatch");
    int l = a.ell();
    int nv = 2 * l;
    Poly acc = Poly::zero(nv, VarKind::PhaseSpace);
    for (const auto& [ma, ca] : a.normal_poly().terms()) {
        for (const auto& [mb, cb] : b.normal_poly().terms()) {
            // start: coefficient and hbar exponents combine; per pair i,
            // reorder P_i^{beta_i} Q_i^{gamma_i}.
            Poly term = Poly::constant(nv, VarKind::PhaseSpace, ca * cb)
                            .shift_hbar(ma.hbar_exp() + mb.hbar_exp());
            for (int i = 0; i < l; ++i) {
                int qa = ma.exp(l + i), pa = ma.exp(i);
                int qb = mb.exp(l + i), pb = mb.exp(i);
                // (Q^qa P^pa)(Q^qb P^pb): reorder P^pa Q^qb
                Poly pair = Poly::zero(nv, VarKind::PhaseSpace);
                int kmax = std::min(pa, qb);
                for (int k = 0; k <= kmax; ++k) {
                    Scalar c = symcore::binomial(static_cast<unsigned>(pa), static_cast<unsigned>(k)) *
                               symcore::binomial(static_cast<unsigned>(qb), static_cast<unsigned>(k)) *
                               symcore::factorial(static_cast<unsigned>(k)) * Scalar::i_pow(k);
                    if (k % 2 != 0) c = -c;  // (-i hbar)^k
                    Poly word = Poly::one(nv, VarKind::PhaseSpace);
                    word = word * Poly::q(l, i).pow(qa + qb - k) * Poly::p(l, i).pow(pa + pb - k);
                    pair += (c * word).shift_hbar(k);
                }
                term = term * pair;
            }
            acc += term;
        }
    }
    return WeylElem::from_normal_poly(l, acc);
}

/// Weyl (symmetric) quantization: each monomial maps to the full
/// symmetrization of the operator word, normal-ordered via McCoy's formula
/// W(q^a p^b) = 2^{-a} sum_k C(a,k) Q^k P^b Q^{a-k}.
inline WeylElem weyl_quantize(const Poly& u) {
    int l = u.ell();
    int nv = 2 * l;
    WeylElem out(l);
    for (const auto& [m, c] : u.terms()) {
        WeylElem term = WeylElem::from_normal_poly(
            l, Poly::constant(nv, VarKind::PhaseSpace, c).shift_hbar(m.hbar_exp()));
        for (int i = 0; i < l; ++i) {
            int a = m.exp(l + i);  // q exponent
            int b = m.exp(i);      // p exponent
            if (a == 0 && b == 0) continue;
            // per-pair McCoy symmetrization, already normal-ordered by
            // rewriting P^b Q^{a-k}
            Poly pair = Poly::zero(nv, VarKind::PhaseSpace);
            mpz_class half = 1;
            mpz_mul_2exp(half.get_mpz_t(), half.get_mpz_t(), static_cast<mp_bitcnt_t>(a));
            Scalar inv2a = Scalar::one() / Scalar(mpq_class(half), mpq_class(0));
            for (int k = 0; k <= a; ++k) {
                // Q^k P^b Q^{a-k}: reorder P^b Q^{a-k}
                int g = a - k;
                int jmax = std::min(b, g);
                for (int j = 0; j <= jmax; ++j) {
                    Scalar cc = symcore::binomial(static_cast<unsigned>(a), static_cast<unsigned>(k)) *
                                symcore::binomial(static_cast<unsigned>(b), static_cast<unsigned>(j)) *
                                symcore::binomial(static_cast<unsigned>(g), static_cast<unsigned>(j)) *
                                symcore::factorial(static_cast<unsigned>(j)) * Scalar::i_pow(j) * inv2a;
                    if (j % 2 != 0) cc = -cc;
                    Poly word = Poly::q(l, i).pow(k + g - j) * Poly::p(l, i).pow(b - j);
                    pair += (cc * word).shift_hbar(j);
                }
            }
            term = weyl_mul(term, WeylElem::from_normal_poly(l, pair));
        }
        out = out + term;
    }
    return out;
}

}  // namespace dq::spectral
