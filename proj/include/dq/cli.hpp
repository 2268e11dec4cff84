#pragma once

#include "dq/cohomology.hpp"
#include "dq/equivalence.hpp"
#include "dq/expr.hpp"
#include "dq/grid.hpp"
#include "dq/kgraphs.hpp"
#include "dq/nambu.hpp"
#include "dq/poisson.hpp"
#include "dq/report.hpp"
#include "dq/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace dq::shell {

namespace detail_cli {

using symcore::Poly;
using symcore::Scalar;
using symcore::VarKind;

inline int max_probe_degree(int wanted) {
    if (const char* env = std::getenv("DQ_MAX_DEGREE")) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(wanted, cap);
    }
    return wanted;
}

inline std::vector<double> parse_doubles(const std::string& text, std::size_t expect) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (expect != 0 && out.size() != expect)
        throw std::invalid_argument("expected " + std::to_string(expect) + " comma-separated values");
    return out;
}

/// Parse the graph text form "n; v1:(a,b); v2:(c,d); ...".
inline kgraphs::AdmissibleGraph parse_graph(const std::string& text) {
    kgraphs::AdmissibleGraph g;
    std::stringstream ss(text);
    std::string head;
    if (!std::getline(ss, head, ';')) throw std::invalid_argument("graph: missing vertex count");
    g.n = std::stoi(head);
    auto target = [&](const std::string& t) -> int {
        if (t == "L") return kgraphs::AdmissibleGraph::ground_l(g.n);
        if (t == "R") return kgraphs::AdmissibleGraph::ground_r(g.n);
        return std::stoi(t) - 1;
    };
    std::string entry;
    while (std::getline(ss, entry, ';')) {
        auto colon = entry.find(':');
        auto open = entry.find('(', colon);
        auto comma = entry.find(',', open);
        auto close = entry.find(')', comma);
        if (colon == std::string::npos || open == std::string::npos || comma == std::string::npos ||
            close == std::string::npos)
            throw std::invalid_argument("graph: malformed vertex entry '" + entry + "'");
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        g.targets.push_back({target(trim(entry.substr(open + 1, comma - open - 1))),
                             target(trim(entry.substr(comma + 1, close - comma - 1)))});
    }
    if (!g.valid()) throw std::invalid_argument("graph: fails the admissibility invariants");
    return g;
}

inline Poly oscillator_poly(int ell) {
    Poly h = Poly::zero(2 * ell, VarKind::PhaseSpace);
    for (int i = 0; i < ell; ++i)
        h += Poly::p(ell, i) * Poly::p(ell, i) + Poly::q(ell, i) * Poly::q(ell, i);
    return Scalar::rational(1, 2) * h;
}

inline Poly dilation_poly(int ell) {
    Poly h = Poly::zero(2 * ell, VarKind::PhaseSpace);
    for (int i = 0; i < ell; ++i) h += Poly::p(ell, i) * Poly::q(ell, i);
    return h;
}

struct GridDefaults {
    int n = 256;
    double l = 8.0;
    double hbar = 1.0;
};

inline GridDefaults load_config(const std::string& path) {
    GridDefaults d;
    if (path.empty()) return d;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "grid.n")
            d.n = std::stoi(val);
        else if (key == "grid.l")
            d.l = std::stod(val);
        else if (key == "grid.hbar")
            d.hbar = std::stod(val);
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return d;
}

inline void dump_grid_if_requested(const phasegrid::Grid2D& g, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open dump path " + path);
    g.dump(out);
}

}  // namespace detail_cli

/// Batch CLI entry point: parses argv, runs one subcommand, prints a JSON
/// report on stdout. Exit 0 iff all checks passed, 1 on a failed check,
/// 2 on usage errors (machine-readable JSON on stderr).
inline int run(int argc, const char* const* argv) {
    using namespace detail_cli;
    using symcore::SeriesVar;
    using symcore::TruncSeries;

    CLI::App app{"deformation quantization workbench"};
    app.require_subcommand(1);
    bool timing = false;
    std::string config_path;
    app.add_flag("--timing", timing, "include timing_ms in the report");
    app.add_option("--config", config_path, "key=value config file for grid defaults");

    Report report;
    auto t0 = std::chrono::steady_clock::now();

    // ---- star ----
    auto* star = app.add_subcommand("star", "Moyal star products and brackets");
    star->require_subcommand(1);
    struct {
        int ell = 1;
        std::string u, v;
        int order = 4;
    } star_args;
    auto add_star_common = [&](CLI::App* cmd, bool need_v) {
        cmd->add_option("--ell", star_args.ell, "number of (p,q) pairs")->check(CLI::Range(1, 4));
        cmd->add_option("-u,--u", star_args.u, "first operand")->required();
        if (need_v) cmd->add_option("-v,--v", star_args.v, "second operand")->required();
    };
    auto* star_mul = star->add_subcommand("mul", "u * v");
    add_star_common(star_mul, true);
    star_mul->callback([&] {
        ParseContext ctx{VarKind::PhaseSpace, star_args.ell};
        Poly u = parse_poly(star_args.u, ctx), v = parse_poly(star_args.v, ctx);
        Poly prod = starops::moyal(u, v);
        report.command = "star mul";
        report.inputs = {{"ell", star_args.ell}, {"u", star_args.u}, {"v", star_args.v}};
        report.result = {{"product", prod.to_string()}};
        report.checks.push_back(exact_check("unit-preservation", starops::moyal(Poly::one(ctx.nvars(), ctx.kind), v) - v));
        report.checks.push_back(
            exact_check("bracket-skew", starops::moyal_bracket(u, v) + starops::moyal_bracket(v, u)));
        report.checks.push_back(exact_check("classical-limit", prod.at_hbar_zero() - (u * v).at_hbar_zero()));
    });
    auto* star_bracket = star->add_subcommand("bracket", "Moyal bracket M(u,v)");
    add_star_common(star_bracket, true);
    star_bracket->callback([&] {
        ParseContext ctx{VarKind::PhaseSpace, star_args.ell};
        Poly u = parse_poly(star_args.u, ctx), v = parse_poly(star_args.v, ctx);
        Poly br = starops::moyal_bracket(u, v);
        report.command = "star bracket";
        report.inputs = {{"ell", star_args.ell}, {"u", star_args.u}, {"v", star_args.v}};
        report.result = {{"bracket", br.to_string()}};
        report.checks.push_back(exact_check("skew", br + starops::moyal_bracket(v, u)));
        Poly corr = br - starops::poisson(u, v);
        report.checks.push_back(exact_check("classical-limit",
                                            corr.hbar_coefficient(0) + corr.hbar_coefficient(1)));
    });
    auto* star_exp_cmd = star->add_subcommand("exp", "star exponential series");
    add_star_common(star_exp_cmd, false);
    star_exp_cmd->add_option("--order", star_args.order, "truncation order K")->check(CLI::Range(0, 16));
    star_exp_cmd->callback([&] {
        ParseContext ctx{VarKind::PhaseSpace, star_args.ell};
        Poly u = parse_poly(star_args.u, ctx);
        auto series = spectral::star_exp(u, star_args.order);
        report.command = "star exp";
        report.inputs = {{"ell", star_args.ell}, {"u", star_args.u}, {"order", star_args.order}};
        report.result = {{"series", series.to_string()}};
        report.checks.push_back(
            exact_check("constant-term-one", series[0] - Poly::one(ctx.nvars(), ctx.kind)));
        if (star_args.order >= 1) {
            Poly t1 = (Scalar::i_pow(-1) * u).shift_hbar(-1);
            report.checks.push_back(exact_check("t1-coefficient", series[1] - t1));
        }
    });

    // ---- spectrum ----
    auto* spectrum = app.add_subcommand("spectrum", "star-exponential closed forms");
    spectrum->require_subcommand(1);
    struct {
        int ell = 1;
        int order = 8;
    } spec_args;
    for (const char* which : {"oscillator", "dilation"}) {
        auto* cmd = spectrum->add_subcommand(which, which);
        cmd->add_option("--ell", spec_args.ell)->check(CLI::Range(1, 3));
        cmd->add_option("--order", spec_args.order)->check(CLI::Range(0, 12));
        std::string name = which;
        cmd->callback([&, name] {
            bool osc = name == "oscillator";
            spectral::QuadraticHamiltonian qh =
                osc ? spectral::QuadraticHamiltonian(Scalar::rational(1, 2), Scalar::zero(), Scalar::rational(1, 2),
                                                     spec_args.ell)
                    : spectral::QuadraticHamiltonian(Scalar::zero(), Scalar::one(), Scalar::zero(), spec_args.ell);
            auto closed = spectral::quadratic_closed_form(qh, spec_args.order);
            auto direct = spectral::star_exp(qh.hamiltonian(), spec_args.order);
            report.command = "spectrum " + name;
            report.inputs = {{"ell", spec_args.ell}, {"order", spec_args.order}};
            report.result = {{"branch", qh.d_sign() > 0 ? "d>0" : (qh.d_sign() < 0 ? "d<0" : "d=0")},
                             {"series", closed.to_string()}};
            Poly residual = Poly::zero(2 * spec_args.ell, VarKind::PhaseSpace);
            for (int k = 0; k <= spec_args.order; ++k) residual += closed[k] - direct[k];
            report.checks.push_back(exact_check("closed-form-match", residual));
        });
    }

    // ---- cohomology ----
    auto* cohom = app.add_subcommand("cohomology", "coboundaries and obstructions");
    cohom->require_subcommand(1);
    struct {
        int ell = 1;
        int r = 2;
    } coh_args;
    auto* coh_b = cohom->add_subcommand("b", "Hochschild coboundary checks");
    coh_b->add_option("--ell", coh_args.ell)->check(CLI::Range(1, 2));
    coh_b->callback([&] {
        using namespace cohomlab;
        int nv = 2 * coh_args.ell;
        report.command = "cohomology b";
        report.inputs = {{"ell", coh_args.ell}};
        auto pc = MultiDiffOp::poisson_cochain(coh_args.ell);
        report.checks.push_back(exact_flag_check("bP-zero", hochschild_b(pc).is_zero()));
        report.checks.push_back(exact_flag_check(
            "b-identity-is-multiplication",
            hochschild_b(MultiDiffOp::identity(nv, VarKind::PhaseSpace)) ==
                MultiDiffOp::multiplication(nv, VarKind::PhaseSpace)));
        report.checks.push_back(exact_flag_check("b-squared-zero", hochschild_b(hochschild_b(pc)).is_zero()));
        report.result = {{"bP", hochschild_b(pc).to_string()}};
    });
    auto* coh_d = cohom->add_subcommand("d", "Chevalley coboundary checks");
    coh_d->add_option("--ell", coh_args.ell)->check(CLI::Range(1, 2));
    coh_d->callback([&] {
        using namespace cohomlab;
        int nv = 2 * coh_args.ell;
        auto canon = starops::PoissonTensor::canonical(coh_args.ell);
        report.command = "cohomology d";
        report.inputs = {{"ell", coh_args.ell}};
        auto pc = MultiDiffOp::poisson_cochain(coh_args.ell);
        report.checks.push_back(exact_flag_check("dP-zero", chevalley_d(pc, canon).is_zero()));
        report.checks.push_back(exact_flag_check(
            "d-identity-is-P", chevalley_d(MultiDiffOp::identity(nv, VarKind::PhaseSpace), canon) == pc));
        report.checks.push_back(
            exact_flag_check("d-squared-zero", chevalley_d(chevalley_d(pc, canon), canon).is_zero()));
        report.result = {{"dP", chevalley_d(pc, canon).to_string()}};
    });
    auto* coh_ob = cohom->add_subcommand("obstruction", "order-r associativity equation");
    coh_ob->add_option("--r", coh_args.r, "deformation order")->check(CLI::Range(1, 4));
    coh_ob->add_option("--ell", coh_args.ell)->check(CLI::Range(1, 2));
    coh_ob->callback([&] {
        using namespace cohomlab;
        auto cs = StarCochains::moyal(coh_args.ell, coh_args.r);
        auto ob = obstruction_hochschild(cs, coh_args.r);
        int deg = max_probe_degree(3);
        auto probes = monomial_probes(2 * coh_args.ell, VarKind::PhaseSpace, deg);
        Poly residual = Poly::zero(2 * coh_args.ell, VarKind::PhaseSpace);
        for (const auto& u : probes)
            for (const auto& v : probes)
                for (const auto& w : probes) residual += ob.lhs(u, v, w) - ob.rhs.apply({u, v, w});
        report.command = "cohomology obstruction";
        report.inputs = {{"ell", coh_args.ell}, {"r", coh_args.r}, {"probe_degree", deg}};
        report.result = {{"probes", static_cast<int>(probes.size())}};
        report.checks.push_back(exact_check("obstruction-equation", residual));
    });

    // ---- schouten ----
    auto* schouten = app.add_subcommand("schouten", "Schouten bracket checks");
    bool corrupt = false;
    schouten->add_flag("--corrupt", corrupt, "add a corrupted-tensor negative control");
    schouten->callback([&] {
        using namespace cohomlab;
        report.command = "schouten";
        report.inputs = {{"corrupt", corrupt}};
        auto canon = starops::PoissonTensor::canonical(2);
        report.checks.push_back(exact_flag_check("canonical-zero", schouten_self(canon).is_zero()));
        auto so3 = starops::PoissonTensor::so3();
        report.checks.push_back(exact_flag_check("so3-zero", schouten_self(so3).is_zero()));
        report.result = {{"tensors", {"canonical(ell=2)", "so3"}}};
        if (corrupt) {
            starops::PoissonTensor bad(3, VarKind::Cartesian);
            bad.set(0, 1, Poly::x(3, 2));
            bad.set(1, 2, Poly::x(3, 0) + Poly::x(3, 1));
            bad.set(0, 2, -Poly::x(3, 1));
            report.checks.push_back(exact_flag_check("corrupt-nonzero", !schouten_self(bad).is_zero()));
        }
    });

    // ---- nambu ----
    auto* nambu_cmd = app.add_subcommand("nambu", "Nambu brackets and flows");
    nambu_cmd->require_subcommand(1);
    struct {
        int n = 3;
        std::vector<std::string> fs;
        unsigned seed = 2024;
        std::string system = "euler";
        std::string r0 = "1,1,1";
        std::string inertia = "1,2,3";
        double dt = 1e-3;
        long steps = 10000;
        double tol = 1e-9;
        std::string export_path;
    } nb;
    auto* nb_bracket = nambu_cmd->add_subcommand("bracket", "Jacobian n-bracket");
    nb_bracket->add_option("--n", nb.n)->check(CLI::Range(2, 4));
    nb_bracket->add_option("-f,--f", nb.fs, "bracket arguments (repeat n times)")->required();
    nb_bracket->callback([&] {
        ParseContext ctx{VarKind::Cartesian, nb.n};
        if (static_cast<int>(nb.fs.size()) != nb.n)
            throw CLI::ValidationError("nambu bracket", "need exactly n arguments");
        std::vector<Poly> fs;
        for (const auto& s : nb.fs) fs.push_back(parse_poly(s, ctx));
        Poly br = nambu::nambu_bracket(fs);
        report.command = "nambu bracket";
        report.inputs = {{"n", nb.n}, {"f", nb.fs}};
        report.result = {{"bracket", br.to_string()}};
        std::swap(fs[0], fs[1]);
        report.checks.push_back(exact_check("skew-under-transposition", nambu::nambu_bracket(fs) + br));
    });
    auto* nb_fi = nambu_cmd->add_subcommand("fi", "fundamental identity residuals on random probes");
    nb_fi->add_option("--n", nb.n)->check(CLI::Range(3, 3));
    nb_fi->add_option("--seed", nb.seed);
    nb_fi->callback([&] {
        std::mt19937 rng(nb.seed);
        std::uniform_int_distribution<int> coeff(-5, 5);
        auto rand_poly = [&] {
            Poly r = Poly::zero(3, VarKind::Cartesian);
            for (int t = 0; t < 3; ++t) {
                Poly mono = Poly::constant(3, VarKind::Cartesian, Scalar(coeff(rng)));
                int d = static_cast<int>(rng() % 3);
                for (int k = 0; k < d; ++k)
                    mono = mono * Poly::variable(3, VarKind::Cartesian, static_cast<int>(rng() % 3));
                r += mono;
            }
            return r;
        };
        Poly residual = Poly::zero(3, VarKind::Cartesian);
        for (int it = 0; it < 5; ++it) {
            std::vector<Poly> xs{rand_poly(), rand_poly()};
            std::vector<Poly> ys{rand_poly(), rand_poly(), rand_poly()};
            residual += nambu::fi_residual(xs, ys);
            std::vector<Poly> args{rand_poly(), rand_poly(), rand_poly(), rand_poly()};
            residual += nambu::leibniz_residual(args);
        }
        report.command = "nambu fi";
        report.inputs = {{"n", nb.n}, {"seed", nb.seed}};
        report.result = {{"probes", 5}};
        report.checks.push_back(exact_check("fi-and-leibniz", residual));
    });
    auto* nb_sim = nambu_cmd->add_subcommand("simulate", "conservative RK4 flow");
    nb_sim->add_option("--system", nb.system)->check(CLI::IsMember({"euler", "nahm"}));
    nb_sim->add_option("--r0", nb.r0, "initial state x,y,z");
    nb_sim->add_option("--inertia", nb.inertia, "Euler inertia (integers)");
    nb_sim->add_option("--dt", nb.dt);
    nb_sim->add_option("--steps", nb.steps);
    nb_sim->add_option("--tol", nb.tol, "conservation drift tolerance");
    nb_sim->add_option("--export", nb.export_path, "trajectory output path");
    nb_sim->callback([&] {
        auto r0 = parse_doubles(nb.r0, 3);
        nambu::NambuSystem sys = [&] {
            if (nb.system == "nahm") return nambu::NambuSystem::nahm();
            auto in = parse_doubles(nb.inertia, 3);
            return nambu::NambuSystem::euler_top(static_cast<long>(in[0]), static_cast<long>(in[1]),
                                                 static_cast<long>(in[2]));
        }();
        auto res = nambu::integrate(sys, r0, nb.dt, nb.steps);
        if (!nb.export_path.empty()) {
            std::ofstream out(nb.export_path);
            if (!out) throw CLI::ValidationError("--export", "cannot open path");
            nambu::write_trajectory(out, res);
        }
        report.command = "nambu simulate";
        report.inputs = {{"system", nb.system}, {"r0", nb.r0}, {"dt", nb.dt}, {"steps", nb.steps}};
        const auto& last = res.states.back();
        report.result = {{"endpoint", {last[0], last[1], last[2]}},
                         {"drift", {decimal(res.drift[0]), decimal(res.drift[1])}}};
        report.checks.push_back(numeric_check("conservation-f2", res.drift[0], nb.tol));
        report.checks.push_back(numeric_check("conservation-f3", res.drift[1], nb.tol));
    });

    // ---- graphs ----
    auto* graphs = app.add_subcommand("graphs", "Kontsevich admissible graphs");
    graphs->require_subcommand(1);
    struct {
        int n = 2;
        std::string graph;
        int ell = 1;
        std::string u, v;
    } gr;
    auto* gr_enum = graphs->add_subcommand("enumerate", "count G_n");
    gr_enum->add_option("--n", gr.n)->required()->check(CLI::Range(0, 4));
    gr_enum->callback([&] {
        auto gs = kgraphs::enumerate(gr.n);
        long expect = 1;
        for (int k = 0; k < gr.n; ++k) expect *= static_cast<long>(gr.n) * (gr.n + 1);
        report.command = "graphs enumerate";
        report.inputs = {{"n", gr.n}};
        report.result = {{"count", static_cast<long>(gs.size())}};
        report.checks.push_back(exact_flag_check("count-formula", static_cast<long>(gs.size()) == expect));
        bool all_valid = true;
        for (const auto& g : gs) all_valid = all_valid && g.valid();
        report.checks.push_back(exact_flag_check("invariants", all_valid));
    });
    auto* gr_op = graphs->add_subcommand("operator", "evaluate B_Gamma on canonical Lambda");
    gr_op->add_option("--n", gr.n)->check(CLI::Range(0, 4));
    gr_op->add_option("--graph", gr.graph, "graph text form, e.g. \"1; v1:(L,R)\"")->required();
    gr_op->add_option("--ell", gr.ell)->check(CLI::Range(1, 2));
    gr_op->add_option("-u,--u", gr.u)->required();
    gr_op->add_option("-v,--v", gr.v)->required();
    gr_op->callback([&] {
        auto g = parse_graph(gr.graph);
        ParseContext ctx{VarKind::PhaseSpace, gr.ell};
        Poly u = parse_poly(gr.u, ctx), v = parse_poly(gr.v, ctx);
        auto canon = starops::PoissonTensor::canonical(gr.ell);
        Poly result = kgraphs::graph_operator(g, canon, u, v);
        report.command = "graphs operator";
        report.inputs = {{"graph", gr.graph}, {"ell", gr.ell}, {"u", gr.u}, {"v", gr.v}};
        report.result = {{"graph", g.to_string()}, {"operator_value", result.to_string()}};
        report.checks.push_back(exact_flag_check("graph-valid", g.valid()));
        if (g.n == 0) report.checks.push_back(exact_check("n0-is-product", result - u * v));
    });

    // ---- grid ----
    auto* grid = app.add_subcommand("grid", "numeric phase-space backend");
    grid->require_subcommand(1);
    struct {
        int n = 0;  // 0 = use config default
        double l = 0;
        double hbar = 0;
        int level = 0;
        double eps = 1e-3;
        std::vector<std::string> points;
        std::string dump_path;
    } gd;
    auto add_grid_common = [&](CLI::App* cmd) {
        cmd->add_option("--grid-n", gd.n, "samples per axis (power of two)");
        cmd->add_option("--grid-l", gd.l, "half extent");
        cmd->add_option("--hbar", gd.hbar, "Planck parameter");
        cmd->add_option("--dump-grid", gd.dump_path, "binary grid dump path");
    };
    auto grid_geometry = [&]() {
        auto d = load_config(config_path);
        int n = gd.n > 0 ? gd.n : d.n;
        double l = gd.l > 0 ? gd.l : d.l;
        double hbar = gd.hbar > 0 ? gd.hbar : d.hbar;
        return std::tuple<int, double, double>{n, l, hbar};
    };
    auto* grid_moyal = grid->add_subcommand("moyal", "numeric star product demo checks");
    add_grid_common(grid_moyal);
    grid_moyal->callback([&] {
        auto [n, l, hbar] = grid_geometry();
        auto p0 = phasegrid::oscillator_projector(0, n, l, hbar);
        auto prod = phasegrid::numeric_moyal(p0, p0);
        report.command = "grid moyal";
        report.inputs = {{"grid_n", n}, {"grid_l", l}, {"hbar", hbar}};
        double idem = phasegrid::Grid2D::rel_l2_error(prod, p0);
        report.result = {{"boundary_warning", prod.boundary_warning()}};
        report.checks.push_back(numeric_check("projector-idempotency", idem, 1e-6));
        dump_grid_if_requested(prod, gd.dump_path);
    });
    auto* grid_proj = grid->add_subcommand("projector", "oscillator eigenprojector vs the Wigner oracle");
    add_grid_common(grid_proj);
    grid_proj->add_option("--level", gd.level)->check(CLI::Range(0, 8));
    grid_proj->callback([&] {
        auto [n, l, hbar] = grid_geometry();
        auto closed = phasegrid::oscillator_projector(gd.level, n, l, hbar);
        auto oracle = phasegrid::hermite_wigner(gd.level, gd.level, n, l, hbar);
        report.command = "grid projector";
        report.inputs = {{"level", gd.level}, {"grid_n", n}, {"grid_l", l}, {"hbar", hbar}};
        report.result = {{"trace", decimal(phasegrid::phase_space_trace(closed).real())}};
        report.checks.push_back(
            numeric_check("wigner-oracle-match", phasegrid::Grid2D::rel_l2_error(closed, oracle), 1e-8));
        report.checks.push_back(numeric_check(
            "trace-normalization", std::abs(phasegrid::phase_space_trace(closed).real() - 1.0), 1e-8));
        dump_grid_if_requested(closed, gd.dump_path);
    });
    auto* grid_fourier = grid->add_subcommand("fourier", "spectral extraction from the star exponential");
    add_grid_common(grid_fourier);
    grid_fourier->add_option("--level", gd.level)->check(CLI::Range(0, 5));
    grid_fourier->add_option("--eps", gd.eps);
    grid_fourier->add_option("--point", gd.points, "evaluation point p,q (repeatable)");
    grid_fourier->callback([&] {
        double hbar = std::get<2>(grid_geometry());
        std::vector<std::pair<double, double>> pts;
        if (gd.points.empty()) pts.emplace_back(0.0, 0.0);
        for (const auto& s : gd.points) {
            auto v = parse_doubles(s, 2);
            pts.emplace_back(v[0], v[1]);
        }
        auto res = phasegrid::spectral_fourier(gd.level + 0.5, gd.eps, pts, hbar);
        report.command = "grid fourier";
        report.inputs = {{"level", gd.level}, {"eps", gd.eps}, {"hbar", hbar}};
        json values = json::array();
        double worst = 0;
        bool all_converged = true;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            // expected projector value at the point via the closed form
            double p = pts[k].first, q = pts[k].second;
            double h = 0.5 * (p * p + q * q);
            double x = 4.0 * h / hbar;
            double lk = 1.0, lkm1 = 0.0;
            for (int j = 0; j < gd.level; ++j) {
                double next = ((2.0 * j + 1.0 - x) * lk - j * lkm1) / (j + 1);
                lkm1 = lk;
                lk = next;
            }
            double expect = 2.0 * ((gd.level % 2 == 0) ? 1.0 : -1.0) * std::exp(-2.0 * h / hbar) * lk;
            worst = std::max(worst, std::abs(res[k].value - phasegrid::cplx{expect, 0.0}));
            all_converged = all_converged && res[k].converged;
            values.push_back({{"p", p}, {"q", q}, {"value_re", decimal(res[k].value.real())},
                              {"value_im", decimal(res[k].value.imag())}});
        }
        report.result = {{"values", values}};
        report.checks.push_back(numeric_check("projector-match", worst, 1e-4));
        report.checks.push_back(exact_flag_check("quadrature-converged", all_converged));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << std::flush;
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << error_json("usage", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::cerr << error_json("parse", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << error_json("input", e.what());
        return 2;
    }

    auto t1 = std::chrono::steady_clock::now();
    report.with_timing = timing;
    report.timing_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::cout << report.dump() << std::flush;
    return report.all_passed() ? 0 : 1;
}

}  // namespace dq::shell
