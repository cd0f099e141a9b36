#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfc/errors.hpp"

namespace pfc {

/// An implicit/explicit Runge-Kutta pair. A holds the diagonally implicit
/// coefficients a_ij; Ahat row i column j holds the explicit weight applied
/// to N(u_{j-1}); both are lower triangular including the diagonal. Stiff
/// accuracy is structural: the output weights are the last row of A.
struct ImexTableau {
    int s = 0;
    std::vector<double> A;    // s*s row-major
    std::vector<double> Ahat; // s*s row-major
    std::vector<double> c;    // length s
    int declared_order = 1;
    std::string name;

    double a(int i, int j) const { return A[static_cast<std::size_t>(i * s + j)]; }
    double ahat(int i, int j) const { return Ahat[static_cast<std::size_t>(i * s + j)]; }
};

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool pass = false;
};

namespace detail {
inline double lower_triangular_det(const std::vector<double>& m, int n) {
    double det = 1.0;
    for (int i = 0; i < n; ++i) det *= m[static_cast<std::size_t>(i * n + i)];
    return det;
}
} // namespace detail

/// Check the structural conditions: row-sum consistency of both tables
/// against c, consistency of the stiffly accurate weights (c_s = 1), and
/// invertibility of Ahat. Tolerance 1e-12 on residuals.
inline ValidationReport validate_tableau(const ImexTableau& tab) {
    const int s = tab.s;
    if (s <= 0 || tab.A.size() != static_cast<std::size_t>(s) * s ||
        tab.Ahat.size() != static_cast<std::size_t>(s) * s || tab.c.size() != static_cast<std::size_t>(s))
        throw structural_error("tableau dimensions inconsistent");

    constexpr double tol = 1e-12;
    ValidationReport rep;

    double rowsum_resid = 0.0;
    for (int i = 0; i < s; ++i) {
        double sa = 0.0, sh = 0.0;
        for (int j = 0; j <= i; ++j) {
            sa += tab.a(i, j);
            sh += tab.ahat(i, j);
        }
        rowsum_resid = std::max(rowsum_resid, std::abs(sa - tab.c[static_cast<std::size_t>(i)]));
        rowsum_resid = std::max(rowsum_resid, std::abs(sh - tab.c[static_cast<std::size_t>(i)]));
    }
    rep.checks.push_back({"row-sum consistency", rowsum_resid <= tol, rowsum_resid});

    // Stiffly accurate output: weights are the last row, so consistency of the
    // scheme requires them to sum to 1, i.e. c_s = 1.
    const double sa_resid = std::abs(tab.c[static_cast<std::size_t>(s - 1)] - 1.0);
    rep.checks.push_back({"stiff accuracy (c_s = 1)", sa_resid <= tol, sa_resid});

    const double det = detail::lower_triangular_det(tab.Ahat, s);
    rep.checks.push_back({"Ahat invertible", std::abs(det) > tol, std::abs(det)});

    rep.pass = true;
    for (const auto& chk : rep.checks) rep.pass = rep.pass && chk.pass;
    return rep;
}

inline ImexTableau tableau_from_json(const nlohmann::json& j, const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "s" && key != "A" && key != "Ahat" && key != "c" && key != "order" && key != "name")
            throw config_error(context + ": unknown tableau key '" + key + "'");
    }
    ImexTableau tab;
    try {
        tab.s = j.at("s").get<int>();
        tab.declared_order = j.at("order").get<int>();
        if (j.contains("name")) tab.name = j["name"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(context + ": " + e.what());
    }
    if (tab.s <= 0) throw structural_error(context + ": stage count must be positive");
    if (tab.declared_order <= 0) throw structural_error(context + ": declared order must be positive");

    auto read_matrix = [&](const char* key) {
        const auto& rows = j.at(key);
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(tab.s))
            throw structural_error(context + ": " + key + " must have s rows");
        std::vector<double> m(static_cast<std::size_t>(tab.s) * tab.s, 0.0);
        for (int i = 0; i < tab.s; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(tab.s))
                throw structural_error(context + ": " + key + " row " + std::to_string(i) +
                                       " must have s entries");
            for (int col = 0; col < tab.s; ++col) {
                const double v = row[static_cast<std::size_t>(col)].get<double>();
                if (col > i && v != 0.0)
                    throw structural_error(context + ": " + key + " upper-triangular entry (" +
                                           std::to_string(i) + "," + std::to_string(col) +
                                           ") must be exactly 0");
                m[static_cast<std::size_t>(i * tab.s + col)] = v;
            }
        }
        return m;
    };
    tab.A = read_matrix("A");
    tab.Ahat = read_matrix("Ahat");

    const auto& cj = j.at("c");
    if (!cj.is_array() || cj.size() != static_cast<std::size_t>(tab.s))
        throw structural_error(context + ": c must have s entries");
    tab.c.resize(static_cast<std::size_t>(tab.s));
    for (int i = 0; i < tab.s; ++i) tab.c[static_cast<std::size_t>(i)] = cj[static_cast<std::size_t>(i)].get<double>();
    return tab;
}

inline ImexTableau load_tableau(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open tableau file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    ImexTableau tab = tableau_from_json(j, path);
    if (tab.name.empty()) tab.name = path;
    return tab;
}

} // namespace pfc
