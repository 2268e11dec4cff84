#pragma once

#include "dq/poly.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dq::symcore {

/// Formal-variable tag for truncated series.
enum class SeriesVar : std::uint8_t { T, S, Beta };

inline const char* series_var_name(SeriesVar v) {
    switch (v) {
        case SeriesVar::T: return "t";
        case SeriesVar::S: return "s";
        default: return "beta";
    }
}

/// Power series in one formal variable, truncated at an explicit order K;
/// coefficients are Poly values sharing one variable context. All arithmetic
/// truncates consistently at K.
class TruncSeries {
  public:
    TruncSeries(SeriesVar var, int order, int nvars, VarKind kind)
        : var_(var), coeffs_(static_cast<std::size_t>(check_order(order)) + 1, Poly::zero(nvars, kind)) {}

    static TruncSeries constant(SeriesVar var, int order, Poly c) {
        TruncSeries s(var, order, c.nvars(), c.kind());
        s.coeffs_[0] = std::move(c);
        return s;
    }
    /// c * x (the formal variable times a polynomial).
    static TruncSeries linear(SeriesVar var, int order, Poly c) {
        TruncSeries s(var, order, c.nvars(), c.kind());
        if (order >= 1) s.coeffs_[1] = std::move(c);
        return s;
    }

    SeriesVar var() const { return var_; }
    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    int nvars() const { return coeffs_[0].nvars(); }
    VarKind kind() const { return coeffs_[0].kind(); }

    const Poly& operator[](int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
    Poly& operator[](int k) { return coeffs_.at(static_cast<std::size_t>(k)); }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    TruncSeries operator-() const {
        TruncSeries r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    TruncSeries& operator+=(const TruncSeries& o) {
        check_compatible(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    TruncSeries& operator-=(const TruncSeries& o) {
        check_compatible(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }
    friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
    friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }

    /// Exact Cauchy product truncated at K.
    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
        a.check_compatible(b);
        TruncSeries r(a.var_, a.order(), a.nvars(), a.kind());
        for (int i = 0; i <= a.order(); ++i) {
            if (a.coeffs_[static_cast<std::size_t>(i)].is_zero()) continue;
            for (int j = 0; i + j <= a.order(); ++j)
                r.coeffs_[static_cast<std::size_t>(i + j)] +=
                    a.coeffs_[static_cast<std::size_t>(i)] * b.coeffs_[static_cast<std::size_t>(j)];
        }
        return r;
    }

    friend TruncSeries operator*(const Poly& c, const TruncSeries& a) {
        TruncSeries r = a;
        for (auto& x : r.coeffs_) x = c * x;
        return r;
    }
    friend TruncSeries operator*(const Scalar& c, const TruncSeries& a) {
        TruncSeries r = a;
        for (auto& x : r.coeffs_) x = c * x;
        return r;
    }

    friend bool operator==(const TruncSeries& a, const TruncSeries& b) {
        return a.var_ == b.var_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const TruncSeries& a, const TruncSeries& b) { return !(a == b); }

    /// Substitute series b for this series' formal variable; b must have zero
    /// constant term. The result lives in b's variable.
    TruncSeries compose(const TruncSeries& b) const {
        if (order() != b.order()) throw std::invalid_argument("TruncSeries: compose needs matching order");
        if (!b.coeffs_[0].is_zero())
            throw std::invalid_argument("TruncSeries: compose argument must have zero constant term");
        TruncSeries r = TruncSeries::constant(b.var_, b.order(), coeffs_[0]);
        TruncSeries bp = TruncSeries::constant(b.var_, b.order(), Poly::one(nvars(), kind()));
        for (int k = 1; k <= order(); ++k) {
            bp = bp * b;
            r += coeffs_[static_cast<std::size_t>(k)] * bp;
        }
        return r;
    }

    /// exp of a series with zero constant term (nilpotent in the truncated ring).
    TruncSeries exp() const {
        if (!coeffs_[0].is_zero())
            throw std::invalid_argument("TruncSeries: exp needs zero constant term");
        TruncSeries r = TruncSeries::constant(var_, order(), Poly::one(nvars(), kind()));
        TruncSeries pow = r;
        Scalar inv_fact = Scalar::one();
        for (int k = 1; k <= order(); ++k) {
            pow = pow * (*this);
            inv_fact /= Scalar(k);
            r += inv_fact * pow;
        }
        return r;
    }

    /// Multiplicative inverse; requires the constant term to be the unit poly.
    TruncSeries inverse() const {
        if (coeffs_[0] != Poly::one(nvars(), kind()))
            throw std::invalid_argument("TruncSeries: inverse needs unit constant term");
        TruncSeries r = TruncSeries::constant(var_, order(), Poly::one(nvars(), kind()));
        for (int k = 1; k <= order(); ++k) {
            Poly acc = Poly::zero(nvars(), kind());
            for (int j = 0; j < k; ++j)
                acc += r.coeffs_[static_cast<std::size_t>(j)] * coeffs_[static_cast<std::size_t>(k - j)];
            r.coeffs_[static_cast<std::size_t>(k)] = -acc;
        }
        return r;
    }

    TruncSeries pow(int e) const {
        if (e < 0) throw std::invalid_argument("TruncSeries: negative power");
        TruncSeries r = TruncSeries::constant(var_, order(), Poly::one(nvars(), kind()));
        for (int k = 0; k < e; ++k) r = r * (*this);
        return r;
    }

    /// Re-truncate to a lower order.
    TruncSeries truncate(int new_order) const {
        if (new_order > order()) throw std::invalid_argument("TruncSeries: cannot extend order");
        TruncSeries r(var_, new_order, nvars(), kind());
        for (int k = 0; k <= new_order; ++k) r.coeffs_[static_cast<std::size_t>(k)] = coeffs_[static_cast<std::size_t>(k)];
        return r;
    }

    std::string to_string() const {
        std::string out;
        const char* x = series_var_name(var_);
        bool first = true;
        for (int k = 0; k <= order(); ++k) {
            const Poly& c = coeffs_[static_cast<std::size_t>(k)];
            if (c.is_zero()) continue;
            if (!first) out += " + ";
            first = false;
            out += "(" + c.to_string() + ")";
            if (k >= 1) {
                out += std::string("*") + x;
                if (k > 1) out += "^" + std::to_string(k);
            }
        }
        return first ? "0" : out;
    }

  private:
    static int check_order(int order) {
        if (order < 0) throw std::invalid_argument("TruncSeries: negative order");
        return order;
    }
    void check_compatible(const TruncSeries& o) const {
        if (var_ != o.var_ || coeffs_.size() != o.coeffs_.size() || nvars() != o.nvars() || kind() != o.kind())
            throw std::invalid_argument("TruncSeries: variable/order mismatch");
    }

    SeriesVar var_;
    std::vector<Poly> coeffs_;
};

// ---------------------------------------------------------------------------
// Scalar-coefficient series builders (exact rational Taylor coefficients).
// ---------------------------------------------------------------------------

/// tan(c*x) through order K: T' = c(1 + T^2), T(0) = 0.
inline TruncSeries series_tan(SeriesVar var, int order, const Scalar& c, int nvars, VarKind kind) {
    std::vector<Scalar> a(static_cast<std::size_t>(order) + 1, Scalar::zero());
    if (order >= 1) a[1] = c;
    for (int k = 1; k < order; ++k) {
        // (k+1) a_{k+1} = c * ([k==0] + sum_{i+j=k} a_i a_j)
        Scalar conv = Scalar::zero();
        for (int i = 0; i <= k; ++i) conv += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(k - i)];
        a[static_cast<std::size_t>(k + 1)] = c * conv / Scalar(k + 1);
    }
    TruncSeries r(var, order, nvars, kind);
    for (int k = 0; k <= order; ++k) r[k] = Poly::constant(nvars, kind, a[static_cast<std::size_t>(k)]);
    return r;
}

/// tanh(c*x) = -i*tan(i*c*x); computed directly: T' = c(1 - T^2).
inline TruncSeries series_tanh(SeriesVar var, int order, const Scalar& c, int nvars, VarKind kind) {
    std::vector<Scalar> a(static_cast<std::size_t>(order) + 1, Scalar::zero());
    if (order >= 1) a[1] = c;
    for (int k = 1; k < order; ++k) {
        Scalar conv = Scalar::zero();
        for (int i = 0; i <= k; ++i) conv += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(k - i)];
        a[static_cast<std::size_t>(k + 1)] = -c * conv / Scalar(k + 1);
    }
    TruncSeries r(var, order, nvars, kind);
    for (int k = 0; k <= order; ++k) r[k] = Poly::constant(nvars, kind, a[static_cast<std::size_t>(k)]);
    return r;
}

/// cos(c*x) through order K.
inline TruncSeries series_cos(SeriesVar var, int order, const Scalar& c, int nvars, VarKind kind) {
    TruncSeries r(var, order, nvars, kind);
    Scalar term = Scalar::one();  // (-1)^m c^{2m} / (2m)!
    r[0] = Poly::one(nvars, kind);
    for (int m = 1; 2 * m <= order; ++m) {
        term *= -(c * c) / Scalar(2 * m - 1) / Scalar(2 * m);
        r[2 * m] = Poly::constant(nvars, kind, term);
    }
    return r;
}

/// cosh(c*x) through order K.
inline TruncSeries series_cosh(SeriesVar var, int order, const Scalar& c, int nvars, VarKind kind) {
    TruncSeries r(var, order, nvars, kind);
    Scalar term = Scalar::one();
    r[0] = Poly::one(nvars, kind);
    for (int m = 1; 2 * m <= order; ++m) {
        term *= (c * c) / Scalar(2 * m - 1) / Scalar(2 * m);
        r[2 * m] = Poly::constant(nvars, kind, term);
    }
    return r;
}

}  // namespace dq::symcore
