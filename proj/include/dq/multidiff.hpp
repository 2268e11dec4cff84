#pragma once

#include "dq/poisson.hpp"
#include "dq/poly.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dq::cohomlab {

using starops::PoissonTensor;
using symcore::Poly;
using symcore::Scalar;
using symcore::VarKind;

/// Derivative multi-index over the coordinates (no hbar component).
/// Reuses the packed monomial layout from Poly.
struct MultiIndex {
    symcore::detail::Mono m;

    static MultiIndex zero() { return {}; }
    static MultiIndex unit(int var) {
        MultiIndex r;
        r.m.set_exp(var, 1);
        return r;
    }

    int exp(int var) const { return m.exp(var); }
    int order(int nvars) const { return m.total_degree(nvars); }

    MultiIndex plus(const MultiIndex& o, int nvars) const {
        MultiIndex r;
        for (int v = 0; v < nvars; ++v) r.m.set_exp(v, exp(v) + o.exp(v));
        return r;
    }
    MultiIndex bump(int var) const {
        MultiIndex r = *this;
        r.m.set_exp(var, exp(var) + 1);
        return r;
    }

    friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.m.bits < b.m.bits; }
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.m.bits == b.m.bits; }

    std::string to_string(const Poly& proto) const {
        std::string s = "d[";
        bool first = true;
        for (int v = 0; v < proto.nvars(); ++v) {
            for (int k = 0; k < exp(v); ++k) {
                if (!first) s += ",";
                first = false;
                s += proto.variable_name(v);
            }
        }
        return s + "]";
    }
};

/// Apply the formal derivative d^alpha to a polynomial.
inline Poly apply_derivative(const Poly& u, const MultiIndex& a) {
    Poly r = u;
    for (int v = 0; v < u.nvars(); ++v)
        for (int k = 0; k < a.exp(v); ++k) {
            r = r.derive(v);
            if (r.is_zero()) return r;
        }
    return r;
}

namespace detail {

/// Enumerate all splits of `total` into `parts` multi-indices, calling
/// f(split vector, multinomial coefficient). Used for the Leibniz rule.
template <typename F>
void for_each_split(const MultiIndex& total, int nvars, int parts, F&& f) {
    std::vector<MultiIndex> split(static_cast<std::size_t>(parts));
    Scalar multinom = Scalar::one();
    auto rec = [&](auto&& self, int var) -> void {
        if (var == nvars) {
            f(split, multinom);
            return;
        }
        int e = total.exp(var);
        // distribute e among `parts` receivers
        std::vector<int> take(static_cast<std::size_t>(parts), 0);
        auto dist = [&](auto&& dself, int part, int remaining, Scalar coeff) -> void {
            if (part == parts - 1) {
                take[static_cast<std::size_t>(part)] = remaining;
                // multinomial factor for this variable: e! / prod take_i!
                Scalar save = multinom;
                multinom *= coeff;
                for (int i = 0; i < parts; ++i) {
                    auto& mi = split[static_cast<std::size_t>(i)];
                    mi.m.set_exp(var, take[static_cast<std::size_t>(i)]);
                }
                self(self, var + 1);
                multinom = save;
                return;
            }
            for (int k = 0; k <= remaining; ++k) {
                take[static_cast<std::size_t>(part)] = k;
                dself(dself, part + 1, remaining - k, coeff * symcore::binomial(static_cast<unsigned>(remaining), static_cast<unsigned>(k)));
            }
        };
        dist(dist, 0, e, Scalar::one());
    };
    rec(rec, 0);
}

}  // namespace detail

/// k-linear multidifferential cochain: C(u_1..u_k) = sum coeff * prod d^{a_s} u_s.
/// Terms are kept normalized (merged multi-index tuples, no zero coefficients).
class MultiDiffOp {
  public:
    using SlotKey = std::vector<MultiIndex>;

    MultiDiffOp(int arity, int nvars, VarKind kind) : arity_(arity), nvars_(nvars), kind_(kind) {
        if (arity < 1) throw std::invalid_argument("MultiDiffOp: arity must be >= 1");
    }

    static MultiDiffOp identity(int nvars, VarKind kind) {
        MultiDiffOp c(1, nvars, kind);
        c.add_term({MultiIndex::zero()}, Poly::one(nvars, kind));
        return c;
    }
    static MultiDiffOp zero(int arity, int nvars, VarKind kind) { return MultiDiffOp(arity, nvars, kind); }
    /// The multiplication 2-cochain (u,v) -> uv.
    static MultiDiffOp multiplication(int nvars, VarKind kind) {
        MultiDiffOp c(2, nvars, kind);
        c.add_term({MultiIndex::zero(), MultiIndex::zero()}, Poly::one(nvars, kind));
        return c;
    }
    /// Canonical Poisson bracket as a constant-coefficient 2-cochain.
    static MultiDiffOp poisson_cochain(int ell) {
        MultiDiffOp c(2, 2 * ell, VarKind::PhaseSpace);
        for (int i = 0; i < ell; ++i) {
            c.add_term({MultiIndex::unit(ell + i), MultiIndex::unit(i)}, Poly::one(2 * ell, VarKind::PhaseSpace));
            c.add_term({MultiIndex::unit(i), MultiIndex::unit(ell + i)},
                       Poly::constant(2 * ell, VarKind::PhaseSpace, Scalar(-1)));
        }
        return c;
    }
    /// Moyal cochain C_r = P^r / r! on the canonical structure.
    static MultiDiffOp moyal_cochain(int r, int ell);

    int arity() const { return arity_; }
    int nvars() const { return nvars_; }
    VarKind kind() const { return kind_; }
    const std::map<SlotKey, Poly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(SlotKey key, Poly coeff) {
        if (static_cast<int>(key.size()) != arity_) throw std::invalid_argument("MultiDiffOp: slot count mismatch");
        if (coeff.is_zero()) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(std::move(key), std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    /// Multilinear evaluation on polynomial arguments.
    Poly apply(const std::vector<Poly>& args) const {
        if (static_cast<int>(args.size()) != arity_) throw std::invalid_argument("MultiDiffOp: arity mismatch");
        Poly acc = Poly::zero(nvars_, kind_);
        for (const auto& [key, coeff] : terms_) {
            Poly term = coeff;
            for (int s = 0; s < arity_ && !term.is_zero(); ++s)
                term = term * apply_derivative(args[static_cast<std::size_t>(s)], key[static_cast<std::size_t>(s)]);
            acc += term;
        }
        return acc;
    }

    MultiDiffOp operator-() const {
        MultiDiffOp r(arity_, nvars_, kind_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }
    MultiDiffOp& operator+=(const MultiDiffOp& o) {
        check_compatible(o);
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    MultiDiffOp& operator-=(const MultiDiffOp& o) {
        check_compatible(o);
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    friend MultiDiffOp operator+(MultiDiffOp a, const MultiDiffOp& b) { return a += b; }
    friend MultiDiffOp operator-(MultiDiffOp a, const MultiDiffOp& b) { return a -= b; }
    friend MultiDiffOp operator*(const Scalar& s, const MultiDiffOp& a) {
        MultiDiffOp r(a.arity_, a.nvars_, a.kind_);
        if (s.is_zero()) return r;
        for (const auto& [k, c] : a.terms_) r.terms_.emplace(k, s * c);
        return r;
    }
    friend bool operator==(const MultiDiffOp& a, const MultiDiffOp& b) {
        return a.arity_ == b.arity_ && a.nvars_ == b.nvars_ && a.kind_ == b.kind_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const MultiDiffOp& a, const MultiDiffOp& b) { return !(a == b); }

    /// Largest derivative order appearing in any slot.
    int max_order() const {
        int d = 0;
        for (const auto& [k, c] : terms_)
            for (const auto& mi : k) d = std::max(d, mi.order(nvars_));
        return d;
    }

    /// Exact skewness check (all adjacent transpositions flip the sign).
    bool is_skew() const {
        for (int s = 0; s + 1 < arity_; ++s) {
            MultiDiffOp swapped(arity_, nvars_, kind_);
            for (const auto& [k, c] : terms_) {
                SlotKey k2 = k;
                std::swap(k2[static_cast<std::size_t>(s)], k2[static_cast<std::size_t>(s + 1)]);
                swapped.add_term(std::move(k2), c);
            }
            if (swapped != -(*this)) return false;
        }
        return true;
    }

    /// Substitute the 1-cochain t into slot `slot`.
    MultiDiffOp compose_slot(int slot, const MultiDiffOp& t) const {
        if (t.arity() != 1) throw std::invalid_argument("MultiDiffOp: compose_slot needs a 1-cochain");
        check_context(t);
        MultiDiffOp r(arity_, nvars_, kind_);
        for (const auto& [key, coeff] : terms_) {
            const MultiIndex& alpha = key[static_cast<std::size_t>(slot)];
            for (const auto& [tkey, tcoeff] : t.terms_) {
                const MultiIndex& beta = tkey[0];
                // d^alpha (t * d^beta u) via two-way Leibniz
                detail::for_each_split(alpha, nvars_, 2, [&](const std::vector<MultiIndex>& sp, const Scalar& mult) {
                    Poly c2 = coeff * apply_derivative(tcoeff, sp[0]) * mult;
                    if (c2.is_zero()) return;
                    SlotKey k2 = key;
                    k2[static_cast<std::size_t>(slot)] = sp[1].plus(beta, nvars_);
                    r.add_term(std::move(k2), std::move(c2));
                });
            }
        }
        return r;
    }

    /// Post-compose with the 1-cochain s: (s o C)(u...) = s(C(u...)).
    MultiDiffOp compose_outer(const MultiDiffOp& s) const {
        if (s.arity() != 1) throw std::invalid_argument("MultiDiffOp: compose_outer needs a 1-cochain");
        check_context(s);
        MultiDiffOp r(arity_, nvars_, kind_);
        for (const auto& [skey, scoeff] : s.terms_) {
            const MultiIndex& beta = skey[0];
            for (const auto& [key, coeff] : terms_) {
                // d^beta (coeff * prod d^{a_i} u_i): split beta over arity_+1 factors
                detail::for_each_split(beta, nvars_, arity_ + 1, [&](const std::vector<MultiIndex>& sp, const Scalar& mult) {
                    Poly c2 = scoeff * apply_derivative(coeff, sp[0]) * mult;
                    if (c2.is_zero()) return;
                    SlotKey k2 = key;
                    for (int i = 0; i < arity_; ++i)
                        k2[static_cast<std::size_t>(i)] =
                            k2[static_cast<std::size_t>(i)].plus(sp[static_cast<std::size_t>(i + 1)], nvars_);
                    r.add_term(std::move(k2), std::move(c2));
                });
            }
        }
        return r;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        Poly proto = Poly::zero(nvars_, kind_);
        std::string s;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) s += " + ";
            first = false;
            s += "(" + c.to_string() + ")";
            for (const auto& mi : k) s += " " + mi.to_string(proto);
        }
        return s;
    }

  private:
    void check_compatible(const MultiDiffOp& o) const {
        if (arity_ != o.arity_) throw std::invalid_argument("MultiDiffOp: arity mismatch");
        check_context(o);
    }
    void check_context(const MultiDiffOp& o) const {
        if (nvars_ != o.nvars_ || kind_ != o.kind_)
            throw std::invalid_argument("MultiDiffOp: variable context mismatch");
    }

    int arity_;
    int nvars_;
    VarKind kind_;
    std::map<SlotKey, Poly> terms_;
};

inline MultiDiffOp MultiDiffOp::moyal_cochain(int r, int ell) {
    if (r == 0) return multiplication(2 * ell, VarKind::PhaseSpace);
    int nv = 2 * ell;
    MultiDiffOp c(2, nv, VarKind::PhaseSpace);
    // P^r / r! = sum_{|a|+|b|=r} (-1)^{|b|}/(a! b!) dq^a dp^b (x) dp^a dq^b
    std::vector<int> a(static_cast<std::size_t>(ell)), b(static_cast<std::size_t>(ell));
    auto rec = [&](auto&& self, int slot, int remaining) -> void {
        if (slot == 2 * ell) {
            if (remaining != 0) return;
            Scalar denom = Scalar::one();
            int btot = 0;
            MultiIndex left, right;
            for (int i = 0; i < ell; ++i) {
                for (int k = 2; k <= a[static_cast<std::size_t>(i)]; ++k) denom *= Scalar(k);
                for (int k = 2; k <= b[static_cast<std::size_t>(i)]; ++k) denom *= Scalar(k);
                btot += b[static_cast<std::size_t>(i)];
                left.m.set_exp(ell + i, a[static_cast<std::size_t>(i)]);   // dq^a on slot 1
                left.m.set_exp(i, left.exp(i) + b[static_cast<std::size_t>(i)]);  // dp^b on slot 1
                right.m.set_exp(i, right.exp(i) + a[static_cast<std::size_t>(i)]); // dp^a on slot 2
                right.m.set_exp(ell + i, right.exp(ell + i) + b[static_cast<std::size_t>(i)]); // dq^b
            }
            Scalar coeff = Scalar::one() / denom;
            if (btot % 2 != 0) coeff = -coeff;
            c.add_term({left, right}, Poly::constant(nv, VarKind::PhaseSpace, coeff));
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            (slot < ell ? a[static_cast<std::size_t>(slot)] : b[static_cast<std::size_t>(slot - ell)]) = e;
            self(self, slot + 1, remaining - e);
        }
    };
    rec(rec, 0, r);
    return c;
}

}  // namespace dq::cohomlab
