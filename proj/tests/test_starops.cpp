#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/poisson.hpp"

#include <random>

using namespace dq::symcore;
using namespace dq::starops;

namespace {

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

Poly oscillator(int ell) {
    Poly h = Poly::zero(2 * ell, VarKind::PhaseSpace);
    for (int i = 0; i < ell; ++i) h += Poly::p(ell, i) * Poly::p(ell, i) + Poly::q(ell, i) * Poly::q(ell, i);
    return Scalar::rational(1, 2) * h;
}

}  // namespace

TEST_CASE("poisson bracket convention and basics") {
    int ell = 1;
    Poly q = Poly::q(ell, 0), p = Poly::p(ell, 0);
    CHECK(poisson(q, p) == Poly::one(2, VarKind::PhaseSpace));
    std::mt19937 rng(3);
    Poly u = random_poly(rng, 1, 4, 4);
    CHECK(poisson(u, u).is_zero());
    Poly H = oscillator(1);
    CHECK(poisson(H, q) == -p);
}

TEST_CASE("poisson Leibniz rule") {
    std::mt19937 rng(5);
    for (int it = 0; it < 25; ++it) {
        Poly u = random_poly(rng, 2, 3, 4);
        Poly v = random_poly(rng, 2, 3, 4);
        Poly w = random_poly(rng, 2, 3, 4);
        CHECK(poisson(u * v, w) == poisson(u, w) * v + u * poisson(v, w));
    }
}

TEST_CASE("poisson_power values") {
    Poly H = oscillator(1);
    CHECK(poisson_power(H, H, 2) == Poly::constant(2, VarKind::PhaseSpace, Scalar(2)));
    Poly q = Poly::q(1, 0);
    CHECK(poisson_power(q * q, H * H * H, 3).is_zero());
    std::mt19937 rng(9);
    for (int it = 0; it < 10; ++it) {
        Poly u = random_poly(rng, 1, 3, 3), v = random_poly(rng, 1, 3, 3);
        CHECK(poisson_power(u, v, 1) == poisson(u, v));
    }
    CHECK_THROWS_AS(poisson_power(q, q, 0), std::invalid_argument);
    // parity: P^r symmetric for even r, skew for odd r
    for (int it = 0; it < 6; ++it) {
        Poly u = random_poly(rng, 1, 4, 3), v = random_poly(rng, 1, 4, 3);
        CHECK(poisson_power(u, v, 2) == poisson_power(v, u, 2));
        CHECK(poisson_power(u, v, 3) == -poisson_power(v, u, 3));
    }
    Poly K = Poly::p(1, 0) * Poly::q(1, 0);
    CHECK(poisson_power(K, K, 2) == Poly::constant(2, VarKind::PhaseSpace, Scalar(-2)));
}

TEST_CASE("moyal product worked examples") {
    int ell = 1;
    Poly q = Poly::q(ell, 0), p = Poly::p(ell, 0);
    Poly one = Poly::one(2, VarKind::PhaseSpace);
    Poly hb = Poly::hbar(2, VarKind::PhaseSpace);
    CHECK(moyal(one, q * p + hb) == q * p + hb);
    CHECK(moyal(q, p) == q * p + Scalar::imag_rational(1, 2) * hb);
    // q^2 * p^2 = q^2 p^2 + 2 i hbar q p - hbar^2 / 2
    Poly expect = q * q * p * p + Scalar(mpq_class(0), mpq_class(2)) * hb * q * p -
                  Scalar::rational(1, 2) * hb * hb;
    CHECK(moyal(q * q, p * p) == expect);
}

TEST_CASE("moyal bracket worked examples") {
    int ell = 1;
    Poly q = Poly::q(ell, 0), p = Poly::p(ell, 0);
    CHECK(moyal_bracket(q, p) == Poly::one(2, VarKind::PhaseSpace));
    CHECK(moyal_bracket(p * p, q * q) == Scalar(-4) * p * q);
    std::mt19937 rng(13);
    for (int it = 0; it < 10; ++it) {
        Poly u = random_poly(rng, 1, 4, 4), v = random_poly(rng, 1, 4, 4);
        CHECK((moyal_bracket(u, v) + moyal_bracket(v, u)).is_zero());
    }
}

TEST_CASE("moyal associativity and Jacobi on randomized inputs") {
    std::mt19937 rng(101);
    for (int it = 0; it < 15; ++it) {
        int ell = 1 + static_cast<int>(rng() % 2);
        Poly u = random_poly(rng, ell, 4, 4);
        Poly v = random_poly(rng, ell, 4, 4);
        Poly w = random_poly(rng, ell, 4, 4);
        CHECK(moyal(moyal(u, v), w) == moyal(u, moyal(v, w)));
        Poly jac = moyal_bracket(moyal_bracket(u, v), w) + moyal_bracket(moyal_bracket(v, w), u) +
                   moyal_bracket(moyal_bracket(w, u), v);
        CHECK(jac.is_zero());
    }
}

TEST_CASE("moyal degree bound and classical limit") {
    std::mt19937 rng(77);
    for (int it = 0; it < 10; ++it) {
        Poly u = random_poly(rng, 1, 5, 4), v = random_poly(rng, 1, 5, 4);
        Poly prod = moyal(u, v);
        CHECK(prod.at_hbar_zero() == u * v);
        Poly comm = moyal(u, v) - moyal(v, u);
        CHECK(comm.hbar_coefficient(1) == Scalar::i() * poisson(u, v));
        // hbar-degree of the correction is bounded by min(deg u, deg v)
        Poly corr = prod - u * v;
        for (const auto& [m, c] : corr.terms())
            CHECK(m.hbar_exp() <= std::min(u.degree(), v.degree()));
    }
}

TEST_CASE("in_preferred_algebra") {
    Poly p = Poly::p(1, 0), q = Poly::q(1, 0);
    CHECK(in_preferred_algebra(p * p + p * q));
    CHECK_FALSE(in_preferred_algebra(p * p * p));
    CHECK(in_preferred_algebra(Poly::constant(2, VarKind::PhaseSpace, Scalar(5))));
    // quadratic a acts classically: M(a,u) = P(a,u); cubic does not
    std::mt19937 rng(19);
    Poly a = p * p + p * q;
    for (int it = 0; it < 8; ++it) {
        Poly u = random_poly(rng, 1, 4, 4);
        CHECK(moyal_bracket(a, u) == poisson(a, u));
    }
    Poly cubic = p * p * p;
    Poly probe = q * q * q;
    CHECK(moyal_bracket(cubic, probe) != poisson(cubic, probe));
}

TEST_CASE("conformal poisson bracket") {
    std::mt19937 rng(23);
    Poly p = Poly::p(1, 0), q = Poly::q(1, 0);
    Poly f1 = Poly::one(2, VarKind::PhaseSpace);
    for (int it = 0; it < 8; ++it) {
        Poly u = random_poly(rng, 1, 3, 3), v = random_poly(rng, 1, 3, 3), f = random_poly(rng, 1, 3, 3);
        CHECK(conformal_poisson(u, v, f1) == poisson(u, v));
        CHECK((conformal_poisson(u, v, f) + conformal_poisson(v, u, f)).is_zero());
    }
    Poly f = random_poly(rng, 1, 3, 3), v = random_poly(rng, 1, 3, 3);
    CHECK(conformal_poisson(Poly::one(2, VarKind::PhaseSpace), v, f) == poisson(f, v));
}

TEST_CASE("conformal star product") {
    int nv = 2;
    std::mt19937 rng(31);
    Poly u = random_poly(rng, 1, 3, 3), v = random_poly(rng, 1, 3, 3), w = random_poly(rng, 1, 3, 3);

    // f == 1 reduces to Moyal
    auto f1 = TruncSeries::constant(SeriesVar::Beta, 2, Poly::one(nv, VarKind::PhaseSpace));
    auto r = conformal_star(u, v, f1);
    CHECK(r[0] == moyal(u, v));
    CHECK(r[1].is_zero());

    // associativity residual vanishes identically at any truncation order
    Poly H = oscillator(1);
    TruncSeries f(SeriesVar::Beta, 3, nv, VarKind::PhaseSpace);
    f[0] = Poly::one(nv, VarKind::PhaseSpace);
    f[1] = Scalar::rational(-1, 2) * H;
    f[2] = random_poly(rng, 1, 2, 2);
    auto uv = conformal_star(u, v, f);
    // (u ~* v) ~* w coefficientwise: star each coefficient with w through f
    TruncSeries lhs(SeriesVar::Beta, 3, nv, VarKind::PhaseSpace);
    for (int a = 0; a <= 3; ++a) {
        auto part = conformal_star(uv[a], w, f);
        for (int b = 0; a + b <= 3; ++b) lhs[a + b] += part[b];
    }
    auto vw = conformal_star(v, w, f);
    TruncSeries rhs(SeriesVar::Beta, 3, nv, VarKind::PhaseSpace);
    for (int a = 0; a <= 3; ++a) {
        auto part = conformal_star(u, vw[a], f);
        for (int b = 0; a + b <= 3; ++b) rhs[a + b] += part[b];
    }
    CHECK(lhs == rhs);

    // zero constant term rejected
    TruncSeries fz(SeriesVar::Beta, 1, nv, VarKind::PhaseSpace);
    fz[1] = H;
    CHECK_THROWS_AS(conformal_star(u, v, fz), std::invalid_argument);
}

TEST_CASE("conformal star beta^1 commutator matches conformal poisson driver") {
    // f = 1 - beta*H/2: the hbar^1 slice of the beta^1 antisymmetrized product
    // equals i*hbar * P_beta-correction with f_beta = -H/2.
    int nv = 2;
    std::mt19937 rng(37);
    Poly H = oscillator(1);
    TruncSeries f(SeriesVar::Beta, 1, nv, VarKind::PhaseSpace);
    f[0] = Poly::one(nv, VarKind::PhaseSpace);
    f[1] = Scalar::rational(-1, 2) * H;
    for (int it = 0; it < 6; ++it) {
        Poly u = random_poly(rng, 1, 3, 3), v = random_poly(rng, 1, 3, 3);
        Poly anti = conformal_star(u, v, f)[1] - conformal_star(v, u, f)[1];
        Poly g = Scalar::rational(-1, 2) * H;
        Poly driver = conformal_poisson(u, v, g);  // g P(u,v) + u P(g,v) - P(g,u) v
        CHECK(anti.hbar_coefficient(1) == Scalar(mpq_class(0), mpq_class(1)) * driver);
    }
}

TEST_CASE("conformal star with an order-2 star-exponential factor") {
    // f = exp_*(-beta H / 2) through beta^2: f_1 = -H/2, f_2 = (H*H)/8
    int nv = 2;
    Poly H = oscillator(1);
    TruncSeries f(SeriesVar::Beta, 2, nv, VarKind::PhaseSpace);
    f[0] = Poly::one(nv, VarKind::PhaseSpace);
    f[1] = Scalar::rational(-1, 2) * H;
    f[2] = Scalar::rational(1, 8) * moyal(H, H);
    std::mt19937 rng(41);
    Poly u = random_poly(rng, 1, 3, 3), v = random_poly(rng, 1, 3, 3), w = random_poly(rng, 1, 3, 3);
    // associativity coefficientwise through beta^2
    auto uv = conformal_star(u, v, f);
    auto vw = conformal_star(v, w, f);
    TruncSeries lhs(SeriesVar::Beta, 2, nv, VarKind::PhaseSpace);
    TruncSeries rhs(SeriesVar::Beta, 2, nv, VarKind::PhaseSpace);
    for (int a = 0; a <= 2; ++a) {
        auto l = conformal_star(uv[a], w, f);
        auto r = conformal_star(u, vw[a], f);
        for (int b = 0; a + b <= 2; ++b) {
            lhs[a + b] += l[b];
            rhs[a + b] += r[b];
        }
    }
    CHECK(lhs == rhs);
    // beta^0 slice is plain Moyal
    CHECK(uv[0] == moyal(u, v));
}
