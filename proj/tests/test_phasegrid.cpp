#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/grid.hpp"
#include "dq/poisson.hpp"

#include <fstream>
#include <sstream>

using namespace dq::phasegrid;
using dq::symcore::Poly;
using dq::symcore::Scalar;
using dq::symcore::VarKind;

namespace {

constexpr int kN = 128;
constexpr double kL = 8.0;
constexpr double kHbar = 1.0;

Grid2D sample_poly(const Poly& u, int n, double l, double hbar, bool windowed, double r0 = 6.0, double w = 0.35) {
    return Grid2D::sample(n, l, hbar, [&](double p, double q) {
        double pt[2] = {p, q};
        cplx v = u.eval_numeric(pt, hbar);
        if (windowed) v *= radial_window(p, q, r0, w);
        return v;
    });
}

/// Exact symbolic oracle for u * (w e^{-(p^2+q^2)/hbar}) with polynomial u, w
/// at ell = 1: the Moyal sum terminates at deg u, and derivatives of w G stay
/// in the ring (Laurent-hbar polynomial) x G. Returns the polynomial factor.
Poly moyal_poly_times_gauss(const Poly& u, const Poly& w) {
    // twisted derivatives on the w-representation: d_x(w G) = (w' - 2x/hbar w) G
    auto dp = [](const Poly& f) {
        return f.derive(0) - (Scalar(2) * Poly::p(1, 0) * f).shift_hbar(-1);
    };
    auto dq = [](const Poly& f) {
        return f.derive(1) - (Scalar(2) * Poly::q(1, 0) * f).shift_hbar(-1);
    };
    Poly acc = Poly::zero(2, VarKind::PhaseSpace);
    // sum over (a, b): nu^{a+b} (-1)^b / (a! b!) (dq^a dp^b u) (Dp^a Dq^b wG)
    int dmax = std::max(u.degree(), 0);
    for (int a = 0; a <= dmax; ++a) {
        for (int b = 0; a + b <= dmax; ++b) {
            Poly du = u;
            for (int k = 0; k < a; ++k) du = du.derive(1);
            for (int k = 0; k < b; ++k) du = du.derive(0);
            if (du.is_zero()) continue;
            Poly dw = w;
            for (int k = 0; k < a; ++k) dw = dp(dw);
            for (int k = 0; k < b; ++k) dw = dq(dw);
            // nu^{a+b} = (i/2)^{a+b} hbar^{a+b}
            Scalar coeff = Scalar::i_pow(a + b);
            mpz_class twok = 1;
            mpz_mul_2exp(twok.get_mpz_t(), twok.get_mpz_t(), static_cast<mp_bitcnt_t>(a + b));
            coeff = coeff / Scalar(mpq_class(twok), mpq_class(0));
            coeff = coeff / dq::symcore::factorial(static_cast<unsigned>(a)) /
                    dq::symcore::factorial(static_cast<unsigned>(b));
            if (b % 2 != 0) coeff = -coeff;
            acc += ((coeff * du) * dw).shift_hbar(a + b);
        }
    }
    return acc;
}

Grid2D sample_poly_times_gauss(const Poly& w, int n, double l, double hbar) {
    return Grid2D::sample(n, l, hbar, [&](double p, double q) {
        double pt[2] = {p, q};
        return w.eval_numeric(pt, hbar) * std::exp(-(p * p + q * q) / hbar);
    });
}

double rel_l2_against(const Grid2D& a, const Grid2D& ref) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        num += std::norm(a.values()[i] - ref.values()[i]);
        den += std::norm(ref.values()[i]);
    }
    return std::sqrt(num / den);
}

double interior_rel_l2(const Grid2D& a, const Grid2D& ref) {
    int n = a.n();
    double num = 0, den = 0;
    for (int ip = 0; ip < n; ++ip)
        for (int iq = 0; iq < n; ++iq) {
            if (std::abs(a.coord(ip)) > a.half_extent() / 2 || std::abs(a.coord(iq)) > a.half_extent() / 2) continue;
            num += std::norm(a.at(ip, iq) - ref.at(ip, iq));
            den += std::norm(ref.at(ip, iq));
        }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("hermite_wigner ground state is the Gaussian 2 e^{-2H/hbar}") {
    auto w00 = hermite_wigner(0, 0, kN, kL, kHbar);
    double max_err = 0;
    for (int ip = 0; ip < kN; ++ip)
        for (int iq = 0; iq < kN; ++iq) {
            double p = w00.coord(ip), q = w00.coord(iq);
            double expect = 2.0 * std::exp(-(p * p + q * q) / kHbar);
            max_err = std::max(max_err, std::abs(w00.at(ip, iq) - cplx{expect, 0.0}));
        }
    CHECK(max_err < 1e-8);
}

TEST_CASE("hermite_wigner parity and realness") {
    auto w11 = hermite_wigner(1, 1, kN, kL, kHbar);
    // value at the origin is -2 (parity of the first excited state)
    CHECK(w11.at(kN / 2, kN / 2).real() == doctest::Approx(-2.0).epsilon(1e-8));
    double max_imag = 0;
    for (const auto& z : w11.values()) max_imag = std::max(max_imag, std::abs(z.imag()));
    CHECK(max_imag < 1e-10);

    auto w01 = hermite_wigner(0, 1, kN, kL, kHbar);
    // odd under (p,q) -> (-p,-q); compare grid point to its mirror
    double max_parity = 0;
    for (int ip = 1; ip < kN; ++ip)
        for (int iq = 1; iq < kN; ++iq) {
            cplx a = w01.at(ip, iq);
            cplx b = w01.at(kN - ip, kN - iq);
            max_parity = std::max(max_parity, std::abs(a + b));
        }
    CHECK(max_parity < 1e-8);
}

TEST_CASE("hermite_wigner trace normalization") {
    for (int n = 0; n <= 3; ++n) {
        auto w = hermite_wigner(n, n, kN, kL, kHbar);
        CHECK(phase_space_trace(w).real() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(phase_space_trace(w).imag()) < 1e-12);
    }
    // off-diagonal symbols are traceless
    auto w01 = hermite_wigner(0, 1, kN, kL, kHbar);
    CHECK(std::abs(phase_space_trace(w01)) < 1e-10);
}

TEST_CASE("hermite_wigner resolution gate") {
    CHECK_THROWS_AS(hermite_wigner(40, 40, kN, kL, kHbar), std::invalid_argument);
    CHECK_THROWS_AS(hermite_wigner(0, 0, 16, 0.5, kHbar), std::invalid_argument);
}

TEST_CASE("oscillator_projector matches the hermite_wigner oracle") {
    for (int n = 0; n <= 5; ++n) {
        auto closed = oscillator_projector(n, kN, kL, kHbar);
        auto oracle = hermite_wigner(n, n, kN, kL, kHbar);
        CHECK(rel_l2_against(closed, oracle) < 1e-8);
    }
}

TEST_CASE("numeric_moyal: projector idempotency and orthogonality") {
    auto p0 = oscillator_projector(0, kN, kL, kHbar);
    auto p1 = oscillator_projector(1, kN, kL, kHbar);
    auto p00 = numeric_moyal(p0, p0);
    CHECK_FALSE(p00.boundary_warning());
    CHECK(rel_l2_against(p00, p0) < 1e-6);
    // orthogonality via the matrix oracle: |0><0| * |1><1| = 0
    auto zero_matrix = HermiteMatrix::projector(0, 4) * HermiteMatrix::projector(1, 4);
    bool all_zero = true;
    for (const auto& z : zero_matrix.a)
        if (z != cplx{0.0, 0.0}) all_zero = false;
    CHECK(all_zero);
    auto p01 = numeric_moyal(p0, p1);
    double rel = p01.l2_norm() / p0.l2_norm();
    CHECK(rel < 1e-6);
}

TEST_CASE("numeric_moyal orientation: pi_0 * a = |0><1| symbol, a * pi_0 = 0") {
    // a(q,p) = (q + i p)/sqrt(2 hbar) is the annihilation symbol; |0><0| A has
    // symbol pi_0 * a = W_01 while A |0><0| vanishes. This pins the sign of
    // the twist phase.
    auto p0 = oscillator_projector(0, kN, kL, kHbar);
    Poly a_poly = Poly::q(1, 0) + Scalar::i() * Poly::p(1, 0);
    auto a_grid = sample_poly(a_poly, kN, kL, kHbar, true);
    for (auto& z : a_grid.values()) z /= std::sqrt(2.0 * kHbar);

    auto left = numeric_moyal(p0, a_grid);
    auto w01 = hermite_wigner(0, 1, kN, kL, kHbar);
    CHECK(rel_l2_against(left, w01) < 1e-6);

    auto right = numeric_moyal(a_grid, p0);
    CHECK(right.l2_norm() / p0.l2_norm() < 1e-6);
}

TEST_CASE("numeric_moyal: oscillator spectrum H * pi_n = (n + 1/2) hbar pi_n") {
    Poly h = Scalar::rational(1, 2) * (Poly::p(1, 0) * Poly::p(1, 0) + Poly::q(1, 0) * Poly::q(1, 0));
    auto hg = sample_poly(h, kN, kL, kHbar, true);
    for (int n = 0; n <= 3; ++n) {
        auto pn = oscillator_projector(n, kN, kL, kHbar);
        auto lhs = numeric_moyal(hg, pn);
        auto rhs = (n + 0.5) * kHbar * pn;
        CHECK(rel_l2_against(lhs, rhs) < 1e-6);
    }
}

TEST_CASE("numeric_moyal agrees with symbolic moyal on Gaussian-windowed polynomials") {
    Poly u = Poly::q(1, 0) * Poly::q(1, 0) + Poly::p(1, 0);  // degree-2 observable
    Poly w = Poly::q(1, 0) + Poly::one(2, VarKind::PhaseSpace);
    auto ug = sample_poly(u, kN, kL, kHbar, true);
    auto wg = sample_poly_times_gauss(w, kN, kL, kHbar);
    auto numeric = numeric_moyal(ug, wg);
    Poly exact_factor = moyal_poly_times_gauss(u, w);
    auto exact = sample_poly_times_gauss(exact_factor, kN, kL, kHbar);
    CHECK(interior_rel_l2(numeric, exact) < 1e-6);

    // linearity in the first argument
    auto u2g = sample_poly(u, kN, kL, kHbar, true);
    for (auto& z : u2g.values()) z *= 2.0;
    auto doubled = numeric_moyal(u2g, wg);
    CHECK(rel_l2_against(doubled, 2.0 * numeric) < 1e-12);
}

TEST_CASE("numeric_moyal classical limit is O(hbar)") {
    auto gauss = [&](double hbar) {
        Grid2D f = Grid2D::sample(kN, kL, hbar, [](double p, double q) {
            return cplx{std::exp(-((p - 0.7) * (p - 0.7) + q * q) / 1.5), 0.0};
        });
        Grid2D g = Grid2D::sample(kN, kL, hbar, [](double p, double q) {
            return cplx{std::exp(-(p * p + (q - 0.4) * (q - 0.4)) / 2.0) * q, 0.0};
        });
        auto prod = numeric_moyal(f, g);
        Grid2D point = f;
        for (std::size_t i = 0; i < point.values().size(); ++i) point.values()[i] = f.values()[i] * g.values()[i];
        return (prod - point).l2_norm();
    };
    double e1 = gauss(0.5), e2 = gauss(0.25), e3 = gauss(0.125);
    CHECK(e1 / e2 >= std::pow(2.0, 0.9));
    CHECK(e2 / e3 >= std::pow(2.0, 0.9));
}

TEST_CASE("numeric_moyal gates") {
    auto p0 = oscillator_projector(0, kN, kL, kHbar);
    Grid2D other(kN, 4.0, kHbar);
    CHECK_THROWS_AS(numeric_moyal(p0, other), std::invalid_argument);
    // non-decaying input trips the boundary warning
    Grid2D flat = Grid2D::sample(kN, kL, kHbar, [](double, double) { return cplx{1.0, 0.0}; });
    auto res = numeric_moyal(flat, p0);
    CHECK(res.boundary_warning());
}

TEST_CASE("spectral_fourier recovers projector values") {
    SUBCASE("n = 0 at the origin") {
        auto r = spectral_fourier(0.5, 1e-3, {{0.0, 0.0}}, kHbar);
        REQUIRE(r.size() == 1);
        CHECK(r[0].converged);
        CHECK(std::abs(r[0].value - cplx{2.0, 0.0}) < 1e-4);
    }
    SUBCASE("off-spectrum probe has negligible coefficient") {
        auto r = spectral_fourier(0.75, 1e-3, {{0.0, 0.0}}, kHbar);
        CHECK(std::abs(r[0].value) < 1e-3);
    }
    SUBCASE("n = 3 at (1, 0)") {
        auto p3 = oscillator_projector(3, kN, kL, kHbar);
        double expect = p3.at(kN / 2 + kN / 16, kN / 2).real();  // p = 1, q = 0
        auto r = spectral_fourier(3.5, 1e-3, {{1.0, 0.0}}, kHbar);
        CHECK(std::abs(r[0].value.real() - expect) < 1e-4);
        CHECK(std::abs(r[0].value.imag()) < 1e-4);
    }
    SUBCASE("eps out of range rejected") {
        CHECK_THROWS_AS(spectral_fourier(0.5, 0.5, {{0.0, 0.0}}, kHbar), std::invalid_argument);
    }
    SUBCASE("irrational frequency has no joint period") {
        CHECK_THROWS_AS(spectral_fourier(0.30000001, 1e-3, {{0.0, 0.0}}, kHbar), std::invalid_argument);
    }
}

TEST_CASE("grid dump round trip") {
    auto p2 = oscillator_projector(2, 32, kL, kHbar);
    std::stringstream ss;
    p2.dump(ss);
    auto back = Grid2D::load(ss);
    CHECK(back.n() == p2.n());
    CHECK(back.half_extent() == p2.half_extent());
    CHECK(back.hbar() == p2.hbar());
    CHECK(back.values() == p2.values());
}

TEST_CASE("hermite matrix wigner synthesis matches direct symbols") {
    // symbol of |2><2| through the matrix route equals hermite_wigner(2,2)
    auto m = HermiteMatrix::projector(2, 4);
    auto viaMatrix = m.wigner_symbol(kN, kL, kHbar);
    auto direct = hermite_wigner(2, 2, kN, kL, kHbar);
    CHECK(rel_l2_against(viaMatrix, direct) < 1e-12);
}

TEST_CASE("grid load rejects truncated dumps") {
    auto g = oscillator_projector(0, 32, kL, kHbar);
    std::stringstream ss;
    g.dump(ss);
    std::string full = ss.str();
    std::stringstream cut_header(full.substr(0, 12));
    CHECK_THROWS_AS(Grid2D::load(cut_header), std::runtime_error);
    std::stringstream cut_payload(full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(Grid2D::load(cut_payload), std::runtime_error);
}

TEST_CASE("grid geometry validation") {
    CHECK_THROWS_AS(Grid2D(17, 8.0, 1.0), std::invalid_argument);   // not a power of two
    CHECK_THROWS_AS(Grid2D(8, 8.0, 1.0), std::invalid_argument);    // below minimum
    CHECK_THROWS_AS(Grid2D(32, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid2D(32, 8.0, 0.0), std::invalid_argument);
}
