#pragma once

#include "dq/poly.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace dq::shell {

using json = nlohmann::ordered_json;

/// One named check inside a report; every check names its tolerance and the
/// residual is reported as an exact-zero flag plus a decimal norm so exact
/// results are never laundered through floats.
struct Check {
    std::string name;
    bool passed = false;
    std::string tolerance;  // "exact" or a decimal threshold
    bool exact_zero = false;
    std::string residual_norm;  // decimal string
};

inline std::string decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Coefficient 1-norm of a polynomial residual, as a decimal string.
inline double poly_norm(const symcore::Poly& p) {
    double acc = 0;
    for (const auto& [m, c] : p.terms()) acc += std::abs(c.re().get_d()) + std::abs(c.im().get_d());
    return acc;
}

inline Check exact_check(std::string name, const symcore::Poly& residual) {
    Check c;
    c.name = std::move(name);
    c.passed = residual.is_zero();
    c.tolerance = "exact";
    c.exact_zero = residual.is_zero();
    c.residual_norm = c.exact_zero ? "0" : decimal(poly_norm(residual));
    return c;
}

inline Check exact_flag_check(std::string name, bool ok) {
    Check c;
    c.name = std::move(name);
    c.passed = ok;
    c.tolerance = "exact";
    c.exact_zero = ok;
    c.residual_norm = ok ? "0" : "1";
    return c;
}

inline Check numeric_check(std::string name, double residual, double tolerance) {
    Check c;
    c.name = std::move(name);
    c.passed = residual < tolerance;
    c.tolerance = decimal(tolerance);
    c.exact_zero = residual == 0.0;
    c.residual_norm = decimal(residual);
    return c;
}

/// Versioned machine-readable report written to standard output.
struct Report {
    std::string command;
    json inputs = json::object();
    json result = json::object();
    std::vector<Check> checks;
    bool with_timing = false;
    double timing_ms = 0;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    json to_json() const {
        json j;
        j["schema"] = 1;
        j["command"] = command;
        j["inputs"] = inputs;
        j["result"] = result;
        json cs = json::array();
        for (const auto& c : checks) {
            json cj;
            cj["name"] = c.name;
            cj["passed"] = c.passed;
            cj["tolerance"] = c.tolerance;
            cj["residual"] = {{"exact_zero", c.exact_zero}, {"norm", c.residual_norm}};
            cs.push_back(cj);
        }
        j["checks"] = cs;
        if (with_timing) j["timing_ms"] = timing_ms;
        return j;
    }

    std::string dump() const { return to_json().dump(2) + "\n"; }
};

/// Machine-readable error payload for standard error.
inline std::string error_json(const std::string& kind, const std::string& message) {
    json j;
    j["schema"] = 1;
    j["error"] = {{"kind", kind}, {"message", message}};
    return j.dump(2) + "\n";
}

}  // namespace dq::shell
