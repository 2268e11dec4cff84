#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/poly.hpp"
#include "dq/series.hpp"

#include <random>

using namespace dq::symcore;

namespace {

Poly P(int ell, int i) { return Poly::p(ell, i); }
Poly Q(int ell, int i) { return Poly::q(ell, i); }

/// Random sparse poly for property tests: up to `terms` monomials, degree cap,
/// integer coefficients in [-9, 9].
Poly random_poly(std::mt19937& rng, int ell, int max_deg, int terms) {
    Poly r = Poly::zero(2 * ell, VarKind::PhaseSpace);
    std::uniform_int_distribution<int> coeff(-9, 9);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> var(0, 2 * ell - 1);
    for (int t = 0; t < terms; ++t) {
        Poly mono = Poly::constant(2 * ell, VarKind::PhaseSpace, Scalar(coeff(rng)));
        int d = deg(rng);
        for (int k = 0; k < d; ++k) mono = mono * Poly::variable(2 * ell, VarKind::PhaseSpace, var(rng));
        r += mono;
    }
    return r;
}

}  // namespace

TEST_CASE("scalar field arithmetic") {
    Scalar a = Scalar::rational(1, 3) + Scalar::rational(1, 6);
    CHECK(a == Scalar::rational(1, 2));
    Scalar z = Scalar::i() * Scalar::i();
    CHECK(z == Scalar(-1));
    Scalar w = (Scalar(3) + Scalar::i()) / (Scalar(1) - Scalar::i());
    CHECK(w == Scalar(mpq_class(1), mpq_class(2)));
    CHECK((w * (Scalar(1) - Scalar::i())) == Scalar(3) + Scalar::i());
    CHECK(Scalar::i_pow(-1) == -Scalar::i());
    CHECK(factorial(5) == Scalar(120));
    CHECK(binomial(6, 2) == Scalar(15));
}

TEST_CASE("poly ring identities") {
    int ell = 1;
    Poly q = Q(ell, 0), p = P(ell, 0);
    CHECK((q + p) + (-p) == q);
    CHECK((q + p) * (q - p) == q * q - p * p);
    Poly lhs = Poly::hbar(2, VarKind::PhaseSpace, -1) * q * (Poly::hbar(2, VarKind::PhaseSpace, 1) * p);
    CHECK(lhs == q * p);
}

TEST_CASE("poly dimension mismatch rejected") {
    Poly a = Q(1, 0);
    Poly b = Q(2, 0);
    CHECK_THROWS_AS((void)(a + b), std::invalid_argument);
    CHECK_THROWS_AS((void)(a * b), std::invalid_argument);
    Poly c = Poly::x(2, 0);
    CHECK_THROWS_AS((void)(b + c), std::invalid_argument);  // kind mismatch
}

TEST_CASE("derive: monomial rule, constants, linearity") {
    int ell = 1;
    Poly q = Q(ell, 0), p = P(ell, 0);
    CHECK((q * q * p).derive(1) == Scalar(2) * q * p);            // d(q^2 p)/dq
    CHECK(Poly::constant(2, VarKind::PhaseSpace, Scalar(7)).derive(0).is_zero());
    CHECK((p * p + q * q).derive(0) == Scalar(2) * p);            // d/dp
    CHECK_THROWS_AS(q.derive(2), std::invalid_argument);          // hbar not differentiable
    // mixed partials commute
    std::mt19937 rng(42);
    for (int it = 0; it < 20; ++it) {
        Poly u = random_poly(rng, 2, 5, 6);
        CHECK(u.derive(0).derive(3) == u.derive(3).derive(0));
    }
}

TEST_CASE("poly_arith properties on randomized inputs") {
    std::mt19937 rng(7);
    for (int it = 0; it < 40; ++it) {
        Poly u = random_poly(rng, 2, 4, 5);
        Poly v = random_poly(rng, 2, 4, 5);
        Poly w = random_poly(rng, 2, 4, 5);
        CHECK(u + v == v + u);
        CHECK(u * v == v * u);
        CHECK((u * v) * w == u * (v * w));
        CHECK(u * (v + w) == u * v + u * w);
    }
}

TEST_CASE("eval_numeric substitution") {
    int ell = 1;
    Poly q = Q(ell, 0), p = P(ell, 0);
    Poly u = q * q * p;
    double pt[2] = {2.0, 3.0};  // (p, q)
    CHECK(u.eval_numeric(pt, 1.0).real() == doctest::Approx(18.0));
    Poly h = Poly::hbar(2, VarKind::PhaseSpace);
    CHECK(h.eval_numeric(pt, 0.5).real() == doctest::Approx(0.5));
    Poly hh = Scalar::rational(1, 2) * (p * p + q * q);
    double pt2[2] = {1.0, 1.0};
    CHECK(hh.eval_numeric(pt2, 1.0).real() == doctest::Approx(1.0));
    Poly laurent = Poly::hbar(2, VarKind::PhaseSpace, -1);
    CHECK_THROWS_AS(laurent.eval_numeric(pt, 0.0), std::domain_error);
}

TEST_CASE("hbar slicing and classical limit helpers") {
    int ell = 1;
    Poly q = Q(ell, 0), p = P(ell, 0);
    Poly u = q * p + Poly::hbar(2, VarKind::PhaseSpace, 2) * q;
    CHECK(u.at_hbar_zero() == q * p);
    CHECK(u.hbar_coefficient(2) == q);
    Poly bad = Poly::hbar(2, VarKind::PhaseSpace, -1);
    CHECK_THROWS_AS(bad.at_hbar_zero(), std::domain_error);
}

TEST_CASE("series: exp of t*H at K=2") {
    int ell = 1;
    Poly H = Scalar::rational(1, 2) * (P(ell, 0) * P(ell, 0) + Q(ell, 0) * Q(ell, 0));
    auto tH = TruncSeries::linear(SeriesVar::T, 2, H);
    auto e = tH.exp();
    CHECK(e[0] == Poly::one(2, VarKind::PhaseSpace));
    CHECK(e[1] == H);
    CHECK(e[2] == Scalar::rational(1, 2) * H * H);
    // exp with nonzero constant term is rejected
    auto c = TruncSeries::constant(SeriesVar::T, 2, Poly::one(2, VarKind::PhaseSpace));
    CHECK_THROWS_AS(c.exp(), std::invalid_argument);
}

TEST_CASE("series compose matches direct expansion at K=3") {
    // exp(tan(t/2)) through t^3: tan(t/2) = t/2 + t^3/24
    int nv = 2;
    auto tanser = series_tan(SeriesVar::T, 3, Scalar::rational(1, 2), nv, VarKind::PhaseSpace);
    CHECK(tanser[1] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(1, 2)));
    CHECK(tanser[3] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(1, 24)));
    // identity exp-series in the abstract variable, composed with tan
    TruncSeries expser(SeriesVar::S, 3, nv, VarKind::PhaseSpace);
    Scalar inv_fact = Scalar::one();
    expser[0] = Poly::one(nv, VarKind::PhaseSpace);
    for (int k = 1; k <= 3; ++k) {
        inv_fact /= Scalar(k);
        expser[k] = Poly::constant(nv, VarKind::PhaseSpace, inv_fact);
    }
    auto composed = expser.compose(tanser);
    // hand expansion: 1 + t/2 + t^2/8 + (1/48 + 1/24) t^3 = 1 + t/2 + t^2/8 + t^3/16
    CHECK(composed[0] == Poly::one(nv, VarKind::PhaseSpace));
    CHECK(composed[1] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(1, 2)));
    CHECK(composed[2] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(1, 8)));
    CHECK(composed[3] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(1, 16)));
    // compose with nonzero constant term rejected
    auto shifted = tanser;
    shifted[0] = Poly::one(nv, VarKind::PhaseSpace);
    CHECK_THROWS_AS(expser.compose(shifted), std::invalid_argument);
}

TEST_CASE("series multiplication truncation consistency") {
    std::mt19937 rng(11);
    for (int it = 0; it < 10; ++it) {
        TruncSeries a(SeriesVar::T, 5, 2, VarKind::PhaseSpace);
        TruncSeries b(SeriesVar::T, 5, 2, VarKind::PhaseSpace);
        for (int k = 0; k <= 5; ++k) {
            a[k] = random_poly(rng, 1, 2, 2);
            b[k] = random_poly(rng, 1, 2, 2);
        }
        auto full = (a * b).truncate(3);
        auto cut = a.truncate(3) * b.truncate(3);
        CHECK(full == cut);
    }
}

TEST_CASE("series inverse and scalar builders") {
    int nv = 2;
    auto c = series_cos(SeriesVar::T, 6, Scalar::rational(1, 2), nv, VarKind::PhaseSpace);
    auto sec = c.inverse();
    CHECK((c * sec).truncate(6)[0] == Poly::one(nv, VarKind::PhaseSpace));
    for (int k = 1; k <= 6; ++k) CHECK((c * sec)[k].is_zero());
    // sec(t/2) = 1 + t^2/8 + 5 t^4/384 + 61 t^6/46080
    CHECK(sec[2] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(1, 8)));
    CHECK(sec[4] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(5, 384)));
    CHECK(sec[6] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(61, 46080)));
    auto th = series_tanh(SeriesVar::T, 5, Scalar::one(), nv, VarKind::PhaseSpace);
    CHECK(th[3] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(-1, 3)));
    CHECK(th[5] == Poly::constant(nv, VarKind::PhaseSpace, Scalar::rational(2, 15)));
}

TEST_CASE("canonical text form") {
    int ell = 1;
    Poly u = Q(ell, 0) * Q(ell, 0) * P(ell, 0) + Scalar::rational(1, 2) * Poly::hbar(2, VarKind::PhaseSpace);
    CHECK(u.to_string() == "q1^2*p1 + (1/2)*hbar");
    Poly v = Q(ell, 0) * P(ell, 0) + Scalar::imag_rational(1, 2) * Poly::hbar(2, VarKind::PhaseSpace);
    CHECK(v.to_string() == "q1*p1 + (1/2)*i*hbar");
    CHECK(Poly::zero(2, VarKind::PhaseSpace).to_string() == "0");
}

TEST_CASE("series composition is associative") {
    std::mt19937 rng(29);
    for (int it = 0; it < 6; ++it) {
        TruncSeries a(SeriesVar::T, 4, 2, VarKind::PhaseSpace);
        TruncSeries b(SeriesVar::S, 4, 2, VarKind::PhaseSpace);
        TruncSeries c(SeriesVar::Beta, 4, 2, VarKind::PhaseSpace);
        for (int k = 0; k <= 4; ++k) {
            a[k] = random_poly(rng, 1, 2, 2);
            if (k > 0) {
                b[k] = random_poly(rng, 1, 2, 2);
                c[k] = random_poly(rng, 1, 2, 2);
            }
        }
        CHECK(a.compose(b).compose(c) == a.compose(b.compose(c)));
    }
}

TEST_CASE("exponent capacity limits are enforced") {
    Poly q = Poly::q(1, 0);
    Poly big = q.pow(60);
    CHECK_THROWS_AS((void)(big * q.pow(10)), std::overflow_error);
    CHECK_THROWS_AS(Poly::variable(9, VarKind::Cartesian, 0), std::invalid_argument);
}
