#pragma once

#include "dq/scalar.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dq::symcore {

/// Variable naming scheme carried by every Poly.
/// PhaseSpace: nvars = 2*ell, coordinates ordered (p1..pl, q1..ql).
/// Cartesian:  coordinates x1..xn (Poisson tensors, Nambu systems).
enum class VarKind : std::uint8_t { PhaseSpace, Cartesian };

namespace detail {

constexpr int kMaxVars = 8;
constexpr int kMaxExp = 63;          // 6 bits per coordinate exponent
constexpr std::int32_t kHbarBias = 1 << 15;

/// Monomial key: coordinate exponents in the high bits (var 0 highest, so the
/// integer order is lexicographic over (vars..., hbar)), biased Laurent hbar
/// exponent in the low 16 bits.
struct Mono {
    std::uint64_t bits = static_cast<std::uint64_t>(kHbarBias);

    static Mono unit() { return {}; }

    int exp(int var) const {
        return static_cast<int>((bits >> (58 - 6 * var)) & 0x3f);
    }
    std::int32_t hbar_exp() const {
        return static_cast<std::int32_t>(bits & 0xffff) - kHbarBias;
    }
    void set_exp(int var, int e) {
        if (e < 0 || e > kMaxExp) throw std::overflow_error("Poly: coordinate exponent out of range");
        int sh = 58 - 6 * var;
        bits = (bits & ~(0x3fULL << sh)) | (static_cast<std::uint64_t>(e) << sh);
    }
    void set_hbar_exp(std::int32_t e) {
        std::int64_t b = static_cast<std::int64_t>(e) + kHbarBias;
        if (b < 0 || b > 0xffff) throw std::overflow_error("Poly: hbar exponent out of range");
        bits = (bits & ~0xffffULL) | static_cast<std::uint64_t>(b);
    }

    int total_degree(int nvars) const {
        int d = 0;
        for (int v = 0; v < nvars; ++v) d += exp(v);
        return d;
    }

    Mono times(const Mono& o, int nvars) const {
        Mono r;
        for (int v = 0; v < nvars; ++v) {
            int e = exp(v) + o.exp(v);
            if (e > kMaxExp) throw std::overflow_error("Poly: coordinate exponent out of range");
            r.set_exp(v, e);
        }
        r.set_hbar_exp(hbar_exp() + o.hbar_exp());
        return r;
    }

    friend bool operator<(const Mono& a, const Mono& b) { return a.bits < b.bits; }
    friend bool operator==(const Mono& a, const Mono& b) { return a.bits == b.bits; }
};

}  // namespace detail

/// Multivariate polynomial over Gaussian rationals, Laurent in the central
/// deformation variable hbar. Immutable value semantics; no zero coefficients
/// are ever stored. Binary operations require matching nvars and kind.
class Poly {
  public:
    using Mono = detail::Mono;
    using TermMap = std::map<Mono, Scalar>;

    Poly() : nvars_(0), kind_(VarKind::Cartesian) {}
    Poly(int nvars, VarKind kind) : nvars_(check_nvars(nvars, kind)), kind_(kind) {}

    static Poly zero(int nvars, VarKind kind) { return Poly(nvars, kind); }
    static Poly constant(int nvars, VarKind kind, Scalar c) {
        Poly r(nvars, kind);
        if (!c.is_zero()) r.terms_.emplace(Mono::unit(), std::move(c));
        return r;
    }
    static Poly one(int nvars, VarKind kind) { return constant(nvars, kind, Scalar::one()); }

    static Poly variable(int nvars, VarKind kind, int var) {
        Poly r(nvars, kind);
        if (var < 0 || var >= nvars) throw std::invalid_argument("Poly: variable index out of range");
        Mono m;
        m.set_exp(var, 1);
        r.terms_.emplace(m, Scalar::one());
        return r;
    }
    /// hbar^e as a polynomial (e may be negative).
    static Poly hbar(int nvars, VarKind kind, std::int32_t e = 1) {
        Poly r(nvars, kind);
        Mono m;
        m.set_hbar_exp(e);
        r.terms_.emplace(m, Scalar::one());
        return r;
    }

    // Phase-space accessors; index i is 0-based, ell = nvars/2.
    static Poly p(int ell, int i) { return variable(2 * ell, VarKind::PhaseSpace, i); }
    static Poly q(int ell, int i) { return variable(2 * ell, VarKind::PhaseSpace, ell + i); }
    static Poly x(int n, int i) { return variable(n, VarKind::Cartesian, i); }

    int nvars() const { return nvars_; }
    VarKind kind() const { return kind_; }
    int ell() const {
        if (kind_ != VarKind::PhaseSpace) throw std::logic_error("Poly: ell on non-phase-space poly");
        return nvars_ / 2;
    }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && terms_.begin()->first == Mono::unit();
    }
    /// Scalar (possibly hbar-dependent terms excluded) content of a constant poly.
    Scalar constant_value() const {
        auto it = terms_.find(Mono::unit());
        return it == terms_.end() ? Scalar::zero() : it->second;
    }
    /// True when no coordinate appears (pure scalar-times-hbar-powers content).
    bool coordinate_free() const {
        for (const auto& [m, c] : terms_)
            if (m.total_degree(nvars_) != 0) return false;
        return true;
    }

    /// Total degree in the coordinates (hbar excluded); -1 for the zero poly.
    int degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree(nvars_));
        return d;
    }
    int degree_in(int var) const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.exp(var));
        return d;
    }
    std::int32_t hbar_min() const {
        std::int32_t d = 0;
        for (const auto& [m, c] : terms_) d = std::min(d, m.hbar_exp());
        return d;
    }

    Poly operator-() const {
        Poly r(nvars_, kind_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    Poly& operator+=(const Poly& o) {
        check_same(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_same(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r(a.nvars_, a.kind_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(ma.times(mb, a.nvars_), ca * cb);
        return r;
    }

    friend Poly operator*(const Scalar& s, const Poly& a) {
        Poly r(a.nvars_, a.kind_);
        if (s.is_zero()) return r;
        for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, s * c);
        return r;
    }
    friend Poly operator*(const Poly& a, const Scalar& s) { return s * a; }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.kind_ == b.kind_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly pow(int e) const {
        if (e < 0) throw std::invalid_argument("Poly: negative power");
        Poly r = one(nvars_, kind_);
        for (int k = 0; k < e; ++k) r = r * (*this);
        return r;
    }

    /// Multiply by hbar^e (central, always invertible).
    Poly shift_hbar(std::int32_t e) const {
        Poly r(nvars_, kind_);
        for (const auto& [m, c] : terms_) {
            Mono m2 = m;
            m2.set_hbar_exp(m.hbar_exp() + e);
            r.terms_.emplace(m2, c);
        }
        return r;
    }

    /// Formal partial derivative in coordinate `var`. hbar is not a coordinate.
    Poly derive(int var) const {
        if (var < 0 || var >= nvars_)
            throw std::invalid_argument("Poly: derivative variable out of range (hbar is not differentiable)");
        Poly r(nvars_, kind_);
        for (const auto& [m, c] : terms_) {
            int e = m.exp(var);
            if (e == 0) continue;
            Mono m2 = m;
            m2.set_exp(var, e - 1);
            r.add_term(m2, Scalar(e) * c);
        }
        return r;
    }

    /// Terms with hbar exponent exactly k, with the hbar factor stripped.
    Poly hbar_coefficient(std::int32_t k) const {
        Poly r(nvars_, kind_);
        for (const auto& [m, c] : terms_) {
            if (m.hbar_exp() != k) continue;
            Mono m2 = m;
            m2.set_hbar_exp(0);
            r.terms_.emplace(m2, c);
        }
        return r;
    }

    /// Substitute hbar = 0: keeps hbar-free terms, drops positive powers,
    /// rejects if a negative power carries a nonzero coefficient.
    Poly at_hbar_zero() const {
        Poly r(nvars_, kind_);
        for (const auto& [m, c] : terms_) {
            if (m.hbar_exp() < 0)
                throw std::domain_error("Poly: negative hbar power has no hbar=0 limit");
            if (m.hbar_exp() == 0) r.terms_.emplace(m, c);
        }
        return r;
    }

    /// Exact-to-float substitution at a real phase-space point.
    std::complex<double> eval_numeric(std::span<const double> point, double hbar_value) const {
        if (static_cast<int>(point.size()) != nvars_)
            throw std::invalid_argument("Poly: evaluation point has wrong length");
        if (hbar_value == 0.0 && hbar_min() < 0)
            throw std::domain_error("Poly: negative hbar power at hbar = 0");
        // Iterative power tables keep the substitution stable.
        std::array<std::vector<double>, detail::kMaxVars> pows;
        for (int v = 0; v < nvars_; ++v) {
            pows[v].assign(static_cast<std::size_t>(degree_in(v)) + 1, 1.0);
            for (std::size_t k = 1; k < pows[v].size(); ++k) pows[v][k] = pows[v][k - 1] * point[v];
        }
        std::complex<double> acc{0.0, 0.0};
        for (const auto& [m, c] : terms_) {
            double mag = 1.0;
            for (int v = 0; v < nvars_; ++v) mag *= pows[v][static_cast<std::size_t>(m.exp(v))];
            std::int32_t he = m.hbar_exp();
            double hf = 1.0;
            for (std::int32_t k = 0; k < std::abs(he); ++k) hf *= hbar_value;
            if (he < 0) hf = 1.0 / hf;
            acc += c.to_complex() * (mag * hf);
        }
        return acc;
    }

    std::string variable_name(int var) const {
        if (kind_ == VarKind::Cartesian) return "x" + std::to_string(var + 1);
        int l = nvars_ / 2;
        if (var < l) return "p" + std::to_string(var + 1);
        return "q" + std::to_string(var - l + 1);
    }

    /// Canonical text form: monomials sorted graded-lexicographically
    /// (descending) over (p1..pl, q1..ql, hbar); q factors printed first.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::vector<const std::pair<const Mono, Scalar>*> order;
        order.reserve(terms_.size());
        for (const auto& t : terms_) order.push_back(&t);
        std::sort(order.begin(), order.end(), [this](const auto* a, const auto* b) {
            return grlex_less(b->first, a->first);  // descending
        });
        std::string out;
        bool first = true;
        for (const auto* t : order) {
            const auto& [m, c] = *t;
            Scalar coeff = c;
            bool neg = false;
            if (c.is_real() && c.re() < 0) {  // pull the sign out for readable joins
                neg = true;
                coeff = -c;
            }
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            first = false;
            out += term_string(m, coeff);
        }
        return out;
    }

  private:
    static int check_nvars(int nvars, VarKind kind) {
        if (nvars < 0 || nvars > detail::kMaxVars) throw std::invalid_argument("Poly: unsupported variable count");
        if (kind == VarKind::PhaseSpace && nvars % 2 != 0)
            throw std::invalid_argument("Poly: phase-space poly needs an even variable count");
        return nvars;
    }

    void check_same(const Poly& o) const {
        if (nvars_ != o.nvars_ || kind_ != o.kind_)
            throw std::invalid_argument("Poly: dimension/kind mismatch in binary operation");
    }

    void add_term(const Mono& m, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool grlex_less(const Mono& a, const Mono& b) const {
        int da = a.total_degree(nvars_), db = b.total_degree(nvars_);
        if (da != db) return da < db;
        return a.bits < b.bits;
    }

    std::string term_string(const Mono& m, const Scalar& coeff) const {
        std::string vars;
        int l = kind_ == VarKind::PhaseSpace ? nvars_ / 2 : 0;
        auto emit = [&](int v) {
            int e = m.exp(v);
            if (e == 0) return;
            if (!vars.empty()) vars += "*";
            vars += variable_name(v);
            if (e > 1) vars += "^" + std::to_string(e);
        };
        if (kind_ == VarKind::PhaseSpace) {
            for (int i = 0; i < l; ++i) emit(l + i);  // q's first
            for (int i = 0; i < l; ++i) emit(i);
        } else {
            for (int v = 0; v < nvars_; ++v) emit(v);
        }
        std::int32_t he = m.hbar_exp();
        if (he != 0) {
            if (!vars.empty()) vars += "*";
            vars += "hbar";
            if (he != 1) vars += "^" + std::to_string(he);
        }
        std::string c = coeff.to_string();
        if (vars.empty()) return c;
        if (c == "1") return vars;
        if (c == "-1") return "-" + vars;
        return c + "*" + vars;
    }

    int nvars_;
    VarKind kind_;
    TermMap terms_;
};

/// nu = i*hbar/2 as a polynomial factor (nu^k for Laurent k).
inline Poly nu_pow(int nvars, VarKind kind, int k) {
    Scalar c = Scalar::i_pow(k);
    mpz_class two = 1;
    mpz_mul_2exp(two.get_mpz_t(), two.get_mpz_t(), static_cast<mp_bitcnt_t>(std::abs(k)));
    mpq_class f(two);
    if (k > 0) f = 1 / f;
    c *= Scalar(f, mpq_class(0));
    return Poly::constant(nvars, kind, c).shift_hbar(k);
}

}  // namespace dq::symcore
