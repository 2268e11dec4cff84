#pragma once

#include "dq/poly.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace dq::nambu {

using symcore::Poly;
using symcore::Scalar;
using symcore::VarKind;

/// Nambu n-bracket {f_1, .., f_n} = det(d f_i / d x_j), exact and fully skew.
inline Poly nambu_bracket(const std::vector<Poly>& fs) {
    if (fs.empty()) throw std::invalid_argument("nambu_bracket: empty argument list");
    int n = static_cast<int>(fs.size());
    for (const auto& f : fs)
        if (f.nvars() != n || f.kind() != VarKind::Cartesian)
            throw std::invalid_argument("nambu_bracket: need n functions of n cartesian variables");
    // Jacobian determinant by Leibniz expansion over permutations (n is small).
    std::vector<std::vector<Poly>> jac(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) jac[static_cast<std::size_t>(i)].push_back(fs[static_cast<std::size_t>(i)].derive(j));
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Poly det = Poly::zero(n, VarKind::Cartesian);
    // iterate permutations with parity tracking
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::vector<int> chosen;
    auto rec = [&](auto&& self, int row, int inversions) -> void {
        if (row == n) {
            Poly term = Poly::one(n, VarKind::Cartesian);
            for (int i = 0; i < n && !term.is_zero(); ++i)
                term = term * jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(chosen[static_cast<std::size_t>(i)])];
            det += (inversions % 2 == 0) ? term : -term;
            return;
        }
        for (int c = 0; c < n; ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            int inv = 0;
            for (int prev : chosen)
                if (prev > c) ++inv;
            used[static_cast<std::size_t>(c)] = true;
            chosen.push_back(c);
            self(self, row + 1, inversions + inv);
            chosen.pop_back();
            used[static_cast<std::size_t>(c)] = false;
        }
    };
    rec(rec, 0, 0);
    return det;
}

/// Left side of the Fundamental Identity with the Jacobian bracket:
/// [x_1..x_{n-1}, [y_1..y_n]]
///   - sum_i [y_1..y_{i-1}, y_{i+1}..y_n, [x_1..x_{i-1}, y_i, x_i..x_{n-1}]].
/// Identically zero for Nambu brackets.
inline Poly fi_residual(const std::vector<Poly>& xs, const std::vector<Poly>& ys) {
    int n = static_cast<int>(ys.size());
    if (static_cast<int>(xs.size()) != n - 1)
        throw std::invalid_argument("fi_residual: need n-1 x's and n y's");
    std::vector<Poly> outer = xs;
    outer.push_back(nambu_bracket(ys));
    Poly acc = nambu_bracket(outer);
    for (int i = 0; i < n; ++i) {
        std::vector<Poly> inner;
        for (int k = 0; k < i; ++k) inner.push_back(xs[static_cast<std::size_t>(k)]);
        inner.push_back(ys[static_cast<std::size_t>(i)]);
        for (int k = i; k < n - 1; ++k) inner.push_back(xs[static_cast<std::size_t>(k)]);
        std::vector<Poly> args;
        for (int k = 0; k < n; ++k)
            if (k != i) args.push_back(ys[static_cast<std::size_t>(k)]);
        args.push_back(nambu_bracket(inner));
        acc -= nambu_bracket(args);
    }
    return acc;
}

/// Leibniz-rule residual {x0 x1, x2..xn} - x0 {x1, x2..xn} - {x0, x2..xn} x1.
inline Poly leibniz_residual(const std::vector<Poly>& args) {
    if (args.size() < 3) throw std::invalid_argument("leibniz_residual: need n+1 arguments with n >= 2");
    std::vector<Poly> a(args.begin() + 1, args.end());
    a[0] = args[0] * args[1];
    Poly lhs = nambu_bracket(a);
    a[0] = args[1];
    Poly r1 = args[0] * nambu_bracket(a);
    a[0] = args[0];
    Poly r2 = nambu_bracket(a) * args[1];
    return lhs - r1 - r2;
}

/// Divergence of the Nambu velocity field: div(grad g x grad h) on R^3, exact.
inline Poly divergence_check(const Poly& g, const Poly& h) {
    if (g.nvars() != 3 || h.nvars() != 3) throw std::invalid_argument("divergence_check: dimension 3 required");
    Poly acc = Poly::zero(3, VarKind::Cartesian);
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        acc += (g.derive(j) * h.derive(k) - g.derive(k) * h.derive(j)).derive(i);
    }
    return acc;
}

/// n-dimensional Nambu system: n-1 polynomial Hamiltonians.
struct NambuSystem {
    int n;
    std::vector<Poly> hamiltonians;

    NambuSystem(int dim, std::vector<Poly> hams) : n(dim), hamiltonians(std::move(hams)) {
        if (static_cast<int>(hamiltonians.size()) != n - 1)
            throw std::invalid_argument("NambuSystem: need n-1 Hamiltonians");
        for (const auto& h : hamiltonians)
            if (h.nvars() != n || h.kind() != VarKind::Cartesian)
                throw std::invalid_argument("NambuSystem: Hamiltonian dimension mismatch");
    }

    /// Euler rigid-body system: g = kinetic energy, h = |L|^2.
    static NambuSystem euler_top(long ix, long iy, long iz) {
        Poly x = Poly::x(3, 0), y = Poly::x(3, 1), z = Poly::x(3, 2);
        Poly g = Scalar::rational(1, 2 * ix) * (x * x) + Scalar::rational(1, 2 * iy) * (y * y) +
                 Scalar::rational(1, 2 * iz) * (z * z);
        Poly h = x * x + y * y + z * z;
        return NambuSystem(3, {g, h});
    }

    /// Nahm system normalized so the flow is exactly xdot_i = x_j x_k.
    static NambuSystem nahm() {
        Poly x = Poly::x(3, 0), y = Poly::x(3, 1), z = Poly::x(3, 2);
        Poly g = Scalar::rational(1, 2) * (x * x - z * z);
        Poly h = Scalar::rational(1, 2) * (y * y - x * x);
        return NambuSystem(3, {g, h});
    }

    /// Velocity field components {x_i, f_2, .., f_n} as exact polynomials.
    std::vector<Poly> velocity_field() const {
        std::vector<Poly> out;
        for (int i = 0; i < n; ++i) {
            std::vector<Poly> args;
            args.push_back(Poly::x(n, i));
            for (const auto& h : hamiltonians) args.push_back(h);
            out.push_back(nambu_bracket(args));
        }
        return out;
    }
};

/// Trajectory samples plus per-Hamiltonian conservation drift.
struct FlowResult {
    std::vector<double> times;
    std::vector<std::vector<double>> states;       // steps+1 samples
    std::vector<double> drift;                     // max |f_i(r(t)) - f_i(r0)|
};

/// Classical fixed-step RK4 on dr/dt = velocity field of the system (n = 3).
/// Conservation drift is reported, not enforced. Non-finite states abort.
inline FlowResult integrate(const NambuSystem& sys, std::vector<double> r0, double dt, long steps) {
    if (sys.n != 3) throw std::invalid_argument("integrate: only n = 3 dynamics in this release");
    if (dt <= 0) throw std::invalid_argument("integrate: dt must be positive");
    if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
    if (static_cast<int>(r0.size()) != sys.n) throw std::invalid_argument("integrate: initial state dimension");

    auto field = sys.velocity_field();
    auto eval_field = [&](const std::vector<double>& x, std::array<double, 3>& out) {
        for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = field[static_cast<std::size_t>(i)].eval_numeric(x, 1.0).real();
    };

    FlowResult res;
    res.times.reserve(static_cast<std::size_t>(steps) + 1);
    res.states.reserve(static_cast<std::size_t>(steps) + 1);
    res.drift.assign(sys.hamiltonians.size(), 0.0);

    std::vector<double> h0;
    for (const auto& h : sys.hamiltonians) h0.push_back(h.eval_numeric(r0, 1.0).real());

    std::vector<double> x = r0;
    res.times.push_back(0.0);
    res.states.push_back(x);
    std::array<double, 3> k1{}, k2{}, k3{}, k4{};
    std::vector<double> tmp(3);
    for (long s = 1; s <= steps; ++s) {
        eval_field(x, k1);
        for (int i = 0; i < 3; ++i) tmp[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * dt * k1[static_cast<std::size_t>(i)];
        eval_field(tmp, k2);
        for (int i = 0; i < 3; ++i) tmp[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * dt * k2[static_cast<std::size_t>(i)];
        eval_field(tmp, k3);
        for (int i = 0; i < 3; ++i) tmp[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + dt * k3[static_cast<std::size_t>(i)];
        eval_field(tmp, k4);
        for (int i = 0; i < 3; ++i)
            x[static_cast<std::size_t>(i)] += dt / 6.0 *
                                              (k1[static_cast<std::size_t>(i)] + 2 * k2[static_cast<std::size_t>(i)] +
                                               2 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
        for (double c : x)
            if (!std::isfinite(c)) throw std::runtime_error("integrate: non-finite state at step " + std::to_string(s));
        res.times.push_back(static_cast<double>(s) * dt);
        res.states.push_back(x);
        for (std::size_t i = 0; i < sys.hamiltonians.size(); ++i) {
            double hv = sys.hamiltonians[i].eval_numeric(x, 1.0).real();
            res.drift[i] = std::max(res.drift[i], std::abs(hv - h0[i]));
        }
    }
    return res;
}

/// Newline-delimited trajectory records: t, x_1..x_n, then running drifts.
inline void write_trajectory(std::ostream& os, const FlowResult& r) {
    for (std::size_t s = 0; s < r.times.size(); ++s) {
        os << r.times[s];
        for (double c : r.states[s]) os << ' ' << c;
        if (s + 1 == r.times.size())
            for (double d : r.drift) os << ' ' << d;
        os << '\n';
    }
}

}  // namespace dq::nambu
