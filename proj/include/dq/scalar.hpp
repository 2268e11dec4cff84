#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dq::symcore {

/// Exact Gaussian rational a + b*i with arbitrary-precision components.
/// mpq_class keeps denominators positive and coprime with numerators,
/// which is exactly the canonical form the rest of the engine relies on.
class Scalar {
  public:
    Scalar() : re_(0), im_(0) {}
    Scalar(long n) : re_(n), im_(0) {}
    Scalar(long num, long den) : re_(num, den), im_(0) { re_.canonicalize(); }
    Scalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static Scalar zero() { return Scalar(); }
    static Scalar one() { return Scalar(1); }
    static Scalar i() { return Scalar(mpq_class(0), mpq_class(1)); }
    static Scalar rational(long num, long den) { return Scalar(num, den); }
    static Scalar imag_rational(long num, long den) {
        mpq_class q(num, den);
        q.canonicalize();
        return Scalar(mpq_class(0), q);
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_one() const { return re_ == 1 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    Scalar operator-() const { return Scalar(-re_, -im_); }

    Scalar& operator+=(const Scalar& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    Scalar& operator*=(const Scalar& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw std::domain_error("Scalar: division by zero");
        mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar conj() const { return Scalar(re_, -im_); }

    /// i^k for integer k (k may be negative).
    static Scalar i_pow(long k) {
        long m = ((k % 4) + 4) % 4;
        switch (m) {
            case 0: return one();
            case 1: return i();
            case 2: return Scalar(-1);
            default: return Scalar(mpq_class(0), mpq_class(-1));
        }
    }

    std::complex<double> to_complex() const {
        return {re_.get_d(), im_.get_d()};
    }

    /// Deterministic text form: "0", "3/4", "i", "-2*i", "(1/2)*i",
    /// "(1/2 + 3*i)". Parenthesization keeps products re-parseable.
    std::string to_string() const {
        auto rat = [](const mpq_class& q) {
            std::string s = q.get_str();
            if (s.find('/') != std::string::npos) return "(" + s + ")";
            return s;
        };
        if (im_ == 0) return rat(re_);
        if (re_ == 0) {
            if (im_ == 1) return "i";
            if (im_ == -1) return "-i";
            return rat(im_) + "*i";
        }
        std::string s = "(" + re_.get_str();
        if (sgn(im_) >= 0)
            s += " + " + (im_ == 1 ? std::string("i") : im_.get_str() + "*i");
        else {
            mpq_class a = -im_;
            s += " - " + (a == 1 ? std::string("i") : a.get_str() + "*i");
        }
        return s + ")";
    }

    /// Total order for deterministic containers (lexicographic on re, im).
    friend bool operator<(const Scalar& a, const Scalar& b) {
        int c = cmp(a.re_, b.re_);
        if (c != 0) return c < 0;
        return cmp(a.im_, b.im_) < 0;
    }

  private:
    mpq_class re_, im_;
};

/// n! as an exact scalar.
inline Scalar factorial(unsigned n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Scalar(mpq_class(f), mpq_class(0));
}

/// Binomial coefficient as an exact scalar.
inline Scalar binomial(unsigned n, unsigned k) {
    if (k > n) return Scalar::zero();
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Scalar(mpq_class(b), mpq_class(0));
}

}  // namespace dq::symcore
