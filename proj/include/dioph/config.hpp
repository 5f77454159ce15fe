#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "dioph/approxfn.hpp"
#include "dioph/common.hpp"
#include "dioph/constants.hpp"
#include "dioph/manifold.hpp"

namespace dioph {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- maps ----------------------------------------------------------------
// {kind:"veronese", n:3} or {kind:"poly", d:1, n:2, coeffs:[[...],[...]]}
// (coefficients in ascending degree per coordinate).

inline ManifoldMap map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("map: expected {kind: ...}");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "veronese") {
        if (!j.contains("n")) throw ConfigError("map: veronese requires n");
        int n = j.at("n").get<int>();
        if (n < 1) throw ConfigError("map: veronese n >= 1");
        return ManifoldMap::veronese(n);
    }
    if (kind == "poly") {
        int d = j.value("d", 1);
        if (d != 1) throw ConfigError("map: config polynomials support d = 1 (use the API for d > 1)");
        if (!j.contains("coeffs")) throw ConfigError("map: poly requires coeffs");
        auto coeffs = j.at("coeffs").get<std::vector<std::vector<double>>>();
        if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(coeffs.size()))
            throw ConfigError("map: n does not match the number of coefficient rows");
        return ManifoldMap::polynomial_1d(coeffs);
    }
    throw ConfigError("map: unknown kind '" + kind + "'");
}

inline json map_to_json(const ManifoldMap& map) {
    json j;
    if (map.kind() == MapKind::veronese) {
        j["kind"] = "veronese";
        j["n"] = map.ambient_dim();
        return j;
    }
    j["kind"] = "poly";
    j["d"] = map.domain_dim();
    j["n"] = map.ambient_dim();
    if (map.domain_dim() == 1) {
        std::vector<std::vector<double>> coeffs;
        for (int i = 0; i < map.ambient_dim(); ++i) {
            Poly p = map.coord(i).to_univariate();
            coeffs.push_back(p.coeffs());
        }
        j["coeffs"] = coeffs;
    }
    return j;
}

// "veronese:2" shorthand.
inline ManifoldMap map_from_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (spec.substr(0, colon) == "veronese" && colon != std::string::npos)
        return ManifoldMap::veronese(std::stoi(spec.substr(colon + 1)));
    throw ConfigError("map: unknown spec '" + spec + "' (expected veronese:N or a JSON config)");
}

// ---- error functions -------------------------------------------------------
// {family:"power", tau:1.0}, {family:"powerlog", tau:1.0, sigma:2.0},
// {family:"table", values:[...]}, {family:"clamped", c:0.5, inner:{...}}.

inline ApproxFn psi_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family")) throw ConfigError("psi: expected {family: ...}");
    std::string fam = j.at("family").get<std::string>();
    if (fam == "power") return ApproxFn::power(j.at("tau").get<double>());
    if (fam == "powerlog")
        return ApproxFn::power_log(j.at("tau").get<double>(), j.at("sigma").get<double>());
    if (fam == "table") return ApproxFn::table(j.at("values").get<std::vector<double>>());
    if (fam == "clamped")
        return ApproxFn::clamped(j.at("c").get<double>(), psi_from_json(j.at("inner")));
    if (fam == "bigpsi")
        return transform_to_big_psi(psi_from_json(j.at("inner")), j.at("n").get<int>(),
                                    j.at("d").get<int>(), j.at("L2").get<double>());
    throw ConfigError("psi: unknown family '" + fam + "'");
}

inline json psi_to_json(const ApproxFn& f) {
    json j;
    switch (f.family()) {
        case ApproxFn::Family::power:
            j["family"] = "power";
            j["tau"] = f.tau();
            break;
        case ApproxFn::Family::powerlog:
            j["family"] = "powerlog";
            j["tau"] = f.tau();
            j["sigma"] = f.sigma();
            break;
        case ApproxFn::Family::table:
            j["family"] = "table";
            j["values"] = f.table_values();
            break;
        case ApproxFn::Family::clamped:
            j["family"] = "clamped";
            j["c"] = f.clamp_c();
            j["inner"] = psi_to_json(*f.inner());
            break;
        case ApproxFn::Family::big_psi:
            j["family"] = "bigpsi";
            j["n"] = f.transform_n();
            j["d"] = f.transform_d();
            j["L2"] = f.transform_L2();
            j["inner"] = psi_to_json(*f.inner());
            break;
    }
    return j;
}

// "power:1", "powerlog:1:2", "table:0.3,0.2", "clamped:0.5:power:1".
inline ApproxFn psi_from_spec(const std::string& spec) {
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        size_t pos = 0;
        while (pos <= s.size()) {
            size_t next = s.find(sep, pos);
            if (next == std::string::npos) {
                parts.push_back(s.substr(pos));
                break;
            }
            parts.push_back(s.substr(pos, next - pos));
            pos = next + 1;
        }
        return parts;
    };
    auto parts = split(spec, ':');
    if (parts.empty()) throw ConfigError("psi: empty spec");
    const std::string& fam = parts[0];
    try {
        if (fam == "power" && parts.size() == 2) return ApproxFn::power(std::stod(parts[1]));
        if (fam == "powerlog" && parts.size() == 3)
            return ApproxFn::power_log(std::stod(parts[1]), std::stod(parts[2]));
        if (fam == "table" && parts.size() == 2) {
            std::vector<double> vals;
            for (const auto& v : split(parts[1], ',')) vals.push_back(std::stod(v));
            return ApproxFn::table(vals);
        }
        if (fam == "clamped" && parts.size() >= 3) {
            std::string rest;
            for (size_t i = 2; i < parts.size(); ++i) rest += (i > 2 ? ":" : "") + parts[i];
            return ApproxFn::clamped(std::stod(parts[1]), psi_from_spec(rest));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("psi: ") + e.what());
    }
    throw ConfigError("psi: unknown spec '" + spec + "'");
}

// ---- balls -----------------------------------------------------------------
// CLI form "c1,...,cd,r": coordinates then radius.

inline Ball ball_from_values(const std::vector<double>& v) {
    if (v.size() < 2) throw ConfigError("ball: expected center...,radius");
    Vec center(v.begin(), v.end() - 1);
    double radius = v.back();
    if (!(radius > 0.0)) throw ConfigError("ball: radius must be positive");
    return Ball(center, radius);
}

inline json ball_to_json(const Ball& b) {
    return json{{"center", b.center}, {"radius", b.radius}};
}

inline Ball ball_from_json(const json& j) {
    if (j.is_array()) return ball_from_values(j.get<std::vector<double>>());
    if (!j.contains("center") || !j.contains("radius")) throw ConfigError("ball: expected {center, radius}");
    return Ball(j.at("center").get<Vec>(), j.at("radius").get<double>());
}

// ---- constants ---------------------------------------------------------------

inline json constants_to_json(const DomainConstants& c) {
    return json{{"C0", c.C0},     {"L1", c.L1},       {"L2", c.L2}, {"n", c.n},
                {"d", c.d},       {"C3", c.C3},       {"C4", c.C4}, {"C5", c.C5},
                {"C6", c.C6},     {"K1", c.K1},       {"K2", c.K2}, {"K3", c.K3},
                {"Q0", c.Q0},     {"Q1", c.Q1},       {"diam_B", c.diam_B},
                {"q0_strict", c.q0_strict}};
}

inline DomainConstants constants_from_json(const json& j) {
    DomainConstants c;
    c.C0 = j.at("C0").get<double>();
    c.L1 = j.at("L1").get<double>();
    c.L2 = j.at("L2").get<double>();
    c.n = j.at("n").get<int>();
    c.d = j.at("d").get<int>();
    c.C3 = j.at("C3").get<double>();
    c.C4 = j.at("C4").get<double>();
    c.C5 = j.at("C5").get<double>();
    c.C6 = j.at("C6").get<double>();
    c.K1 = j.at("K1").get<double>();
    c.K2 = j.at("K2").get<double>();
    c.K3 = j.at("K3").get<double>();
    c.Q0 = j.at("Q0").get<long long>();
    c.Q1 = j.at("Q1").get<long long>();
    c.diam_B = j.at("diam_B").get<double>();
    c.q0_strict = j.value("q0_strict", 1LL);
    // The constants chain is recomputable from (C0, L1, L2, n, d); reject
    // files whose derived entries have drifted from the defining identities.
    DerivBounds db{c.L1, c.L2, 1.0};
    Ball region({0.0}, c.diam_B / 2.0);
    DomainConstants rec = DomainConstants::from_c0(c.C0, db, c.n, c.d, region, c.Q0);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    if (!close(c.C3, rec.C3) || !close(c.C4, rec.C4) || !close(c.C5, rec.C5) ||
        !close(c.C6, rec.C6) || !close(c.K1, rec.K1) || !close(c.K2, rec.K2) ||
        !close(c.K3, rec.K3))
        throw ConfigError("constants: derived entries do not match their defining identities");
    return c;
}

}  // namespace dioph
