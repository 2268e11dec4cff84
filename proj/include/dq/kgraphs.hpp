#pragma once

#include "dq/poisson.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dq::kgraphs {

using starops::PoissonTensor;
using symcore::Poly;
using symcore::Scalar;

/// Labeled oriented graph with n aerial vertices (0..n-1) and two ground
/// vertices L, R. Each aerial vertex has an ordered pair of distinct targets,
/// neither of which is the vertex itself. 2n edges total.
struct AdmissibleGraph {
    int n = 0;
    // target encoding: 0..n-1 aerial, n = L, n+1 = R
    std::vector<std::array<int, 2>> targets;

    static constexpr int ground_l(int n) { return n; }
    static constexpr int ground_r(int n) { return n + 1; }

    bool valid() const {
        if (static_cast<int>(targets.size()) != n) return false;
        for (int v = 0; v < n; ++v) {
            auto [a, b] = targets[static_cast<std::size_t>(v)];
            if (a == b) return false;
            for (int t : {a, b}) {
                if (t < 0 || t > n + 1) return false;
                if (t == v) return false;
            }
        }
        return true;
    }

    std::string target_name(int t) const {
        if (t == ground_l(n)) return "L";
        if (t == ground_r(n)) return "R";
        return std::to_string(t + 1);
    }

    /// Text form "n; v1:(a,b); v2:(c,d); ..." with targets 1..n, L, R.
    std::string to_string() const {
        std::string s = std::to_string(n);
        for (int v = 0; v < n; ++v) {
            s += "; v" + std::to_string(v + 1) + ":(" + target_name(targets[static_cast<std::size_t>(v)][0]) + "," +
                 target_name(targets[static_cast<std::size_t>(v)][1]) + ")";
        }
        return s;
    }

    friend bool operator==(const AdmissibleGraph& a, const AdmissibleGraph& b) {
        return a.n == b.n && a.targets == b.targets;
    }
};

/// Exhaustive duplicate-free enumeration of G_n; |G_n| = (n(n+1))^n with the
/// n = 0 convention of a single bare graph.
inline std::vector<AdmissibleGraph> enumerate(int n, int bound = 4) {
    if (n < 0) throw std::invalid_argument("kgraphs: n must be >= 0");
    if (n > bound) throw std::invalid_argument("kgraphs: n exceeds the configured bound");
    std::vector<AdmissibleGraph> out;
    // per-vertex choices: ordered pairs of distinct non-self targets
    std::vector<std::array<int, 2>> choices;
    for (int a = 0; a <= n + 1; ++a)
        for (int b = 0; b <= n + 1; ++b) {
            if (a == b) continue;
            choices.push_back({a, b});
        }
    AdmissibleGraph g;
    g.n = n;
    g.targets.assign(static_cast<std::size_t>(n), {0, 0});
    auto rec = [&](auto&& self, int v) -> void {
        if (v == n) {
            out.push_back(g);
            return;
        }
        for (const auto& c : choices) {
            if (c[0] == v || c[1] == v) continue;
            g.targets[static_cast<std::size_t>(v)] = c;
            self(self, v + 1);
        }
    };
    rec(rec, 0);
    return out;
}

/// Kontsevich assembly of the bidifferential operator B_Gamma for a Poisson
/// tensor: each aerial vertex k contributes Lambda^{i_k j_k}, the first edge
/// differentiates its target by i_k and the second by j_k; ground vertices
/// carry u and v; all coordinate indices are summed. Total derivative order
/// is 2n; weights are out of scope.
inline Poly graph_operator(const AdmissibleGraph& g, const PoissonTensor& lam, const Poly& u, const Poly& v) {
    if (!g.valid()) throw std::invalid_argument("graph_operator: invalid graph");
    if (u.nvars() != lam.dim() || v.nvars() != lam.dim() || u.kind() != lam.kind() || v.kind() != lam.kind())
        throw std::invalid_argument("graph_operator: dimension mismatch");
    int d = lam.dim();
    int n = g.n;
    Poly acc = Poly::zero(d, lam.kind());
    std::vector<std::array<int, 2>> idx(static_cast<std::size_t>(n), {0, 0});
    auto rec = [&](auto&& self, int vertex) -> void {
        if (vertex == n) {
            // collect derivative lists per object
            std::vector<std::vector<int>> derivs(static_cast<std::size_t>(n) + 2);
            for (int k = 0; k < n; ++k) {
                derivs[static_cast<std::size_t>(g.targets[static_cast<std::size_t>(k)][0])].push_back(
                    idx[static_cast<std::size_t>(k)][0]);
                derivs[static_cast<std::size_t>(g.targets[static_cast<std::size_t>(k)][1])].push_back(
                    idx[static_cast<std::size_t>(k)][1]);
            }
            Poly term = Poly::one(d, lam.kind());
            for (int k = 0; k < n && !term.is_zero(); ++k) {
                Poly f = lam.component(idx[static_cast<std::size_t>(k)][0], idx[static_cast<std::size_t>(k)][1]);
                for (int dv : derivs[static_cast<std::size_t>(k)]) f = f.derive(dv);
                term = term * f;
            }
            if (!term.is_zero()) {
                Poly fu = u;
                for (int dv : derivs[static_cast<std::size_t>(AdmissibleGraph::ground_l(n))]) fu = fu.derive(dv);
                Poly fv = v;
                for (int dv : derivs[static_cast<std::size_t>(AdmissibleGraph::ground_r(n))]) fv = fv.derive(dv);
                term = term * fu * fv;
            }
            acc += term;
            return;
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                idx[static_cast<std::size_t>(vertex)] = {i, j};
                self(self, vertex + 1);
            }
    };
    rec(rec, 0);
    return acc;
}

}  // namespace dq::kgraphs
