#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dioph/config.hpp"
#include "dioph/counting.hpp"
#include "dioph/estimate.hpp"
#include "dioph/experiment.hpp"
#include "dioph/measure.hpp"
#include "dioph/parallel.hpp"
#include "dioph/plot.hpp"
#include "dioph/regsys.hpp"

namespace dioph::cli {

// Config-driven runner. All fields serialize; identical config + seed gives
// byte-identical report bodies modulo the timestamp/wall_ms lines.
struct ExperimentConfig {
    std::string subcommand;          // measure | regsys | overlap | count | series | calibrate
    json map;                        // map config (may be null for `series`)
    std::vector<double> ball;        // center..., radius
    json psi;                        // error-function config
    std::vector<double> eps;
    long long Q = 0;
    long long Qmax = 0;
    long long samples = 0;
    uint64_t seed = 0;
    std::string method = "exact1d";  // exact1d | montecarlo
    std::string sampler = "grid:100000";
    std::vector<double> gammas;
    int k0 = 0;
    int K = 0;
    long long budget = 1 << 20;
    double s = 0.0;
    int d = 1;
    json consts;                     // inline constants (regsys / overlap)
    std::string consts_path;         // or a calibrate output file
    double c0 = 0.0;                 // calibrate dial: explicit C0
    double c3 = 0.0;                 // calibrate dial: construction C3 target
    bool legacy_arg = false;         // count: threshold psi(h) instead of psi(h^n)
    double oversample = 8.0;         // regsys sampler density relative to T
    std::string plot;                // optional SVG output (measure scaling / count growth)
    std::string out;
    std::string format;              // json | csv (default from extension)
    int threads = 0;
};

inline json to_json(const ExperimentConfig& c) {
    return json{{"subcommand", c.subcommand},
                {"map", c.map},
                {"ball", c.ball},
                {"psi", c.psi},
                {"eps", c.eps},
                {"Q", c.Q},
                {"Qmax", c.Qmax},
                {"samples", c.samples},
                {"seed", c.seed},
                {"method", c.method},
                {"sampler", c.sampler},
                {"gammas", c.gammas},
                {"k0", c.k0},
                {"K", c.K},
                {"budget", c.budget},
                {"s", c.s},
                {"d", c.d},
                {"consts", c.consts},
                {"consts_path", c.consts_path},
                {"c0", c.c0},
                {"c3", c.c3},
                {"legacy_arg", c.legacy_arg},
                {"oversample", c.oversample},
                {"plot", c.plot},
                {"out", c.out},
                {"format", c.format},
                {"threads", c.threads}};
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.subcommand = j.value("subcommand", std::string());
    c.map = j.value("map", json());
    c.ball = j.value("ball", std::vector<double>());
    c.psi = j.value("psi", json());
    c.eps = j.value("eps", std::vector<double>());
    c.Q = j.value("Q", 0LL);
    c.Qmax = j.value("Qmax", 0LL);
    c.samples = j.value("samples", 0LL);
    c.seed = j.value("seed", uint64_t{0});
    c.method = j.value("method", std::string("exact1d"));
    c.sampler = j.value("sampler", std::string("grid:100000"));
    c.gammas = j.value("gammas", std::vector<double>());
    c.k0 = j.value("k0", 0);
    c.K = j.value("K", 0);
    c.budget = j.value("budget", static_cast<long long>(1 << 20));
    c.s = j.value("s", 0.0);
    c.d = j.value("d", 1);
    c.consts = j.value("consts", json());
    c.consts_path = j.value("consts_path", std::string());
    c.c0 = j.value("c0", 0.0);
    c.c3 = j.value("c3", 0.0);
    c.legacy_arg = j.value("legacy_arg", false);
    c.oversample = j.value("oversample", 8.0);
    c.plot = j.value("plot", std::string());
    c.out = j.value("out", std::string());
    c.format = j.value("format", std::string());
    c.threads = j.value("threads", 0);
    return c;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

inline Method parse_method(const std::string& m) {
    if (m == "exact1d") return Method::exact1d;
    if (m == "montecarlo") return Method::montecarlo;
    throw ConfigError("method: expected exact1d or montecarlo");
}

inline Sampler parse_sampler(const std::string& s, uint64_t default_seed) {
    auto c1 = s.find(':');
    if (c1 == std::string::npos) throw ConfigError("sampler: expected grid:M or mc:SAMPLES[:SEED]");
    std::string kind = s.substr(0, c1);
    try {
        if (kind == "grid") return Sampler::grid(std::stoll(s.substr(c1 + 1)));
        if (kind == "mc") {
            auto rest = s.substr(c1 + 1);
            auto c2 = rest.find(':');
            long long samples = std::stoll(rest.substr(0, c2));
            uint64_t seed = c2 == std::string::npos ? default_seed : std::stoull(rest.substr(c2 + 1));
            return Sampler::montecarlo(samples, seed);
        }
    } catch (const std::exception&) {
        throw ConfigError("sampler: malformed '" + s + "'");
    }
    throw ConfigError("sampler: unknown kind in '" + s + "'");
}

inline json estimate_to_json(const MeasureEstimate& e) {
    return json{{"value", e.value},
                {"std_error", e.std_error},
                {"method", to_string(e.method)},
                {"samples", e.samples},
                {"seed", e.seed}};
}

inline json witness_to_json(const Witness& w) { return json{{"a", w.a}, {"a0", w.a0}}; }

// Constants come from a calibrate output (file or inline); without one, the
// reference dial C0 = 1 with grid derivative bounds is used and recorded.
inline DomainConstants load_constants(const ExperimentConfig& cfg, const ManifoldMap& map,
                                      const Ball& region, std::string* source) {
    json j = cfg.consts;
    if (j.is_null() && !cfg.consts_path.empty()) {
        std::ifstream in(cfg.consts_path);
        if (!in) throw ConfigError("consts: cannot open '" + cfg.consts_path + "'");
        in >> j;
    }
    if (j.is_null()) {
        DerivBounds db = map.derivative_bounds(region);
        if (source) *source = "default:C0=1";
        return DomainConstants::from_c0(1.0, db, map.ambient_dim(), map.domain_dim(), region);
    }
    if (source) *source = cfg.consts_path.empty() ? "inline" : cfg.consts_path;
    if (j.contains("results") && j.at("results").contains("constants"))
        j = j.at("results").at("constants");
    else if (j.contains("constants"))
        j = j.at("constants");
    return constants_from_json(j);
}

inline void write_file(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
    out << body;
}

struct ReportEnvelope {
    json results;
    json constants;  // optional
};

inline std::string render_json_report(const ExperimentConfig& cfg, const ReportEnvelope& env,
                                      double wall_ms) {
    json j;
    j["tool"] = "dioph-lab";
    j["version"] = kVersion;
    j["subcommand"] = cfg.subcommand;
    j["config"] = to_json(cfg);
    // Conventions the numbers depend on, recorded so reports are self-contained.
    j["conventions"] = json{{"residue", "(-1/2, 1/2]"},
                            {"a0", "-round(fx.a), ties toward the residue convention"},
                            {"minkowski_scan", "coordinates outward from zero, a1 innermost"},
                            {"enumeration", "ascending lexicographic"}};
    if (!env.constants.is_null()) j["constants"] = env.constants;
    j["results"] = env.results;
    j["timestamp"] = iso_timestamp();
    j["wall_ms"] = wall_ms;
    return j.dump(2) + "\n";
}

}  // namespace detail

// ---- subcommand bodies -------------------------------------------------------

inline detail::ReportEnvelope run_measure(const ExperimentConfig& cfg) {
    ManifoldMap map = map_from_json(cfg.map);
    Ball region = ball_from_values(cfg.ball);
    if (cfg.eps.empty()) throw ConfigError("measure: at least one --eps required");
    if (cfg.Q < 1) throw ConfigError("measure: --Q >= 1 required");
    Method method = detail::parse_method(cfg.method);
    MCParams mc{cfg.samples > 0 ? cfg.samples : 100000, cfg.seed};

    detail::ReportEnvelope env;
    DerivBounds db = map.derivative_bounds(region);
    DomainConstants consts =
        DomainConstants::from_c0(1.0, db, map.ambient_dim(), map.domain_dim(), region);
    env.constants = constants_to_json(consts);
    auto l = map.nondeg_order(region.center, 8);
    json nondeg = l ? json(*l) : json();

    json rows = json::array();
    if (cfg.eps.size() >= 2) {
        ScalingReport rep = verify_linear_scaling(map, region, cfg.eps, cfg.Q, method, mc);
        for (const auto& row : rep.rows)
            rows.push_back(json{{"eps", row.eps},
                                {"estimate", detail::estimate_to_json(row.estimate)},
                                {"c0_ratio", row.c0_ratio}});
        env.results = json{{"slope", rep.slope},
                           {"C0_hat", rep.C0_hat},
                           {"Q", rep.Q},
                           {"Q1", rep.Q1},
                           {"q_floor", rep.q_floor},
                           {"below_q_floor", rep.below_q_floor},
                           {"region_volume", region.volume()},
                           {"nondeg_order_at_center", nondeg},
                           {"eps_table", rows}};
        if (!cfg.plot.empty()) {
            PlotSeries measured{"measure", {}};
            PlotSeries bound{"C0_hat * eps * |B|", {}};
            for (const auto& row : rep.rows) {
                measured.points.emplace_back(row.eps, row.estimate.value);
                bound.points.emplace_back(row.eps, rep.C0_hat * row.eps * region.volume());
            }
            detail::write_file(cfg.plot,
                               render_svg_chart("limsup-set measure vs eps (Q=" +
                                                    std::to_string(cfg.Q) + ")",
                                                "eps", "measure", {measured, bound}, true, true));
        }
        return env;
    }
    MeasureEstimate est = limsup_set_measure(map, region, cfg.eps[0], cfg.Q, method, mc);
    rows.push_back(json{{"eps", cfg.eps[0]},
                        {"estimate", detail::estimate_to_json(est)},
                        {"c0_ratio", est.value / (cfg.eps[0] * region.volume())}});
    env.results = json{{"region_volume", region.volume()},
                       {"nondeg_order_at_center", nondeg},
                       {"eps_table", rows}};
    return env;
}

inline detail::ReportEnvelope run_calibrate(const ExperimentConfig& cfg) {
    ManifoldMap map = map_from_json(cfg.map);
    Ball region = ball_from_values(cfg.ball);
    std::vector<double> grid = cfg.eps.empty() ? std::vector<double>{0.025, 0.05, 0.1, 0.2} : cfg.eps;
    long long Q = cfg.Q > 0 ? cfg.Q : 50;
    Method method = detail::parse_method(cfg.method);
    MCParams mc{cfg.samples > 0 ? cfg.samples : 100000, cfg.seed};

    ScalingReport rep = verify_linear_scaling(map, region, grid, Q, method, mc);
    DerivBounds db = map.derivative_bounds(region);

    double dial = rep.C0_hat;
    std::string dial_source = "C0_hat";
    if (cfg.c0 > 0.0) {
        dial = cfg.c0;
        dial_source = "c0 flag";
    }
    DomainConstants consts;
    if (cfg.c3 > 0.0) {
        consts = DomainConstants::construction_scale(cfg.c3, db, map.ambient_dim(),
                                                     map.domain_dim(), region);
        dial = consts.C0;
        dial_source = "c3 flag";
    } else {
        consts = DomainConstants::from_c0(dial, db, map.ambient_dim(), map.domain_dim(), region);
    }

    json rows = json::array();
    for (const auto& row : rep.rows)
        rows.push_back(json{{"eps", row.eps},
                            {"estimate", detail::estimate_to_json(row.estimate)},
                            {"c0_ratio", row.c0_ratio}});
    detail::ReportEnvelope env;
    env.constants = constants_to_json(consts);
    env.results = json{{"C0_hat", rep.C0_hat},
                       {"C0_used", dial},
                       {"C0_source", dial_source},
                       {"slope", rep.slope},
                       {"Q", rep.Q},
                       {"Q1", rep.Q1},
                       {"q_floor", rep.q_floor},
                       {"below_q_floor", rep.below_q_floor},
                       {"L1", db.L1},
                       {"L2", db.L2},
                       {"eps_table", rows},
                       {"constants", env.constants}};
    return env;
}

inline detail::ReportEnvelope run_regsys(const ExperimentConfig& cfg) {
    ManifoldMap map = map_from_json(cfg.map);
    Ball region = ball_from_values(cfg.ball);
    if (cfg.Q < 1) throw ConfigError("regsys: --Q >= 1 required");
    std::string consts_source;
    DomainConstants consts = detail::load_constants(cfg, map, region, &consts_source);
    Sampler sampler = detail::parse_sampler(cfg.sampler, cfg.seed);

    RegularSystemCertificate cert = build_regular_system(map, region, cfg.Q, consts, sampler);
    std::vector<double> gammas = cfg.gammas;
    if (gammas.empty()) gammas = {1.0 / (4.0 * cert.T), 1.0 / (16.0 * cert.T)};
    VerifyReport verify = verify_certificate(cert, map, gammas);

    json members = json::array();
    for (const auto& m : cert.members)
        members.push_back(json{{"a", m.R.form.a},
                               {"a0", m.R.form.a0},
                               {"N", m.R.weight_N},
                               {"z", m.z},
                               {"radius", m.ball_radius}});
    json per_gamma = json::array();
    for (const auto& row : verify.per_gamma)
        per_gamma.push_back(
            json{{"gamma", row.gamma}, {"K2_hat", row.K2_hat}, {"K3_hat", row.K3_hat}});

    detail::ReportEnvelope env;
    env.constants = constants_to_json(consts);
    env.results = json{{"T", cert.T},
                       {"lambda_T", cert.lambda_T},
                       {"Q", cert.Q},
                       {"constants_source", consts_source},
                       {"t", cert.t()},
                       {"samples_tried", cert.samples_tried},
                       {"anchors_ok", cert.anchors_ok},
                       {"big_norm_violations", cert.big_norm_violations},
                       {"no_sign_change", cert.no_sign_change},
                       {"weight_window_rejected", cert.weight_window_rejected},
                       {"boundary_rejected", cert.boundary_rejected},
                       {"K1_hat", verify.K1_hat},
                       {"K2_hat", verify.K2_hat},
                       {"K3_hat", verify.K3_hat},
                       {"per_gamma", per_gamma},
                       {"violations", verify.violations},
                       {"members", members}};
    return env;
}

inline detail::ReportEnvelope run_overlap(const ExperimentConfig& cfg, std::string* csv_out) {
    ManifoldMap map = map_from_json(cfg.map);
    Ball region = ball_from_values(cfg.ball);
    ApproxFn Psi = psi_from_json(cfg.psi);
    std::string consts_source;
    DomainConstants consts = detail::load_constants(cfg, map, region, &consts_source);
    int k0 = cfg.k0;
    if (k0 == 0) k0 = default_k0(map, region, consts, cfg.K, cfg.oversample);
    if (cfg.K < k0) throw ConfigError("overlap: --K >= --k0 required");

    OverlapReport rep =
        dyadic_overlap_experiment(map, region, Psi, k0, cfg.K, consts, cfg.oversample);

    if (csv_out) {
        std::ostringstream os;
        os << "k,E_k,phi_k,ratio\n";
        for (int k = rep.k0; k <= rep.K; ++k) {
            int i = k - rep.k0;
            os << k << ',' << detail::fmt_double(rep.block_measures[i]) << ','
               << detail::fmt_double(rep.phi_k[i]) << ',' << detail::fmt_double(rep.ratio) << "\n";
        }
        os << "\n";
        os << "l,k,measure\n";
        for (int l = rep.k0; l <= rep.K; ++l)
            for (int k = rep.k0; k <= rep.K; ++k)
                os << l << ',' << k << ',' << detail::fmt_double(rep.overlap_at(l, k)) << "\n";
        *csv_out = os.str();
    }

    json blocks = json::array();
    for (int k = rep.k0; k <= rep.K; ++k) {
        int i = k - rep.k0;
        blocks.push_back(json{{"k", k},
                              {"Q", rep.Q_k[i]},
                              {"T", rep.T_k[i]},
                              {"t", rep.t_k[i]},
                              {"E_k", rep.block_measures[i]},
                              {"phi_k", rep.phi_k[i]}});
    }
    detail::ReportEnvelope env;
    env.constants = constants_to_json(consts);
    env.results = json{{"k0", rep.k0},
                       {"K", rep.K},
                       {"constants_source", consts_source},
                       {"ratio", rep.ratio},
                       {"ratio_over_region", rep.ratio_over_region},
                       {"blocks", blocks},
                       {"overlap", rep.overlap}};
    return env;
}

inline detail::ReportEnvelope run_count(const ExperimentConfig& cfg, std::string* csv_out) {
    ManifoldMap map = map_from_json(cfg.map);
    Ball region = ball_from_values(cfg.ball);
    ApproxFn psi = psi_from_json(cfg.psi);
    if (cfg.Qmax < 1) throw ConfigError("count: --Qmax >= 1 required");
    int n_samples = cfg.samples > 0 ? static_cast<int>(cfg.samples) : 200;

    // A growth plot reuses the same shell scan at intermediate cutoffs.
    std::vector<long long> ladder = {cfg.Qmax};
    if (!cfg.plot.empty() && cfg.Qmax >= 4)
        ladder = {std::max<long long>(1, cfg.Qmax / 4), std::max<long long>(1, cfg.Qmax / 2),
                  cfg.Qmax};
    auto surveys = survey_ladder(map, region, psi, ladder, n_samples, cfg.seed, cfg.legacy_arg);
    CountSurvey sv = surveys.back();
    if (!cfg.plot.empty()) {
        PlotSeries q10{"q10", {}}, med{"median", {}}, q90{"q90", {}};
        for (const auto& s : surveys) {
            q10.points.emplace_back(static_cast<double>(s.Q_max), s.q10);
            med.points.emplace_back(static_cast<double>(s.Q_max), s.median);
            q90.points.emplace_back(static_cast<double>(s.Q_max), s.q90);
        }
        detail::write_file(cfg.plot, render_svg_chart("solution-count growth (" + sv.psi_id + ")",
                                                      "Q_max", "count quantiles", {q10, med, q90},
                                                      true, false));
    }

    if (csv_out) {
        std::ostringstream os;
        os << "x,count,first_witnesses\n";
        for (const auto& samp : sv.samples) {
            os << '"';
            for (size_t i = 0; i < samp.x.size(); ++i)
                os << (i ? "," : "") << detail::fmt_double(samp.x[i]);
            os << "\"," << samp.count << ",\"";
            for (size_t w = 0; w < samp.witnesses.size(); ++w) {
                if (w) os << ';';
                for (size_t i = 0; i < samp.witnesses[w].a.size(); ++i)
                    os << (i ? "," : "") << samp.witnesses[w].a[i];
                os << ':' << samp.witnesses[w].a0;
            }
            os << "\"\n";
        }
        *csv_out = os.str();
    }

    json samples = json::array();
    for (const auto& samp : sv.samples) {
        json ws = json::array();
        for (const auto& w : samp.witnesses) ws.push_back(detail::witness_to_json(w));
        samples.push_back(json{{"x", samp.x}, {"count", samp.count}, {"witnesses", ws}});
    }
    detail::ReportEnvelope env;
    env.results = json{{"map", sv.map_id},          {"psi", sv.psi_id}, {"Q_max", sv.Q_max},
                       {"median", sv.median},      {"q10", sv.q10},    {"q90", sv.q90},
                       {"n_samples", sv.samples.size()}, {"samples", samples}};
    return env;
}

inline detail::ReportEnvelope run_series(const ExperimentConfig& cfg) {
    ApproxFn psi = psi_from_json(cfg.psi);
    SeriesVerdict v = classify_series(psi, cfg.d, cfg.s, cfg.budget);
    detail::ReportEnvelope env;
    env.results = json{{"verdict", to_string(v.verdict)},
                       {"direct_verdict", to_string(v.direct_verdict)},
                       {"dyadic_verdict", to_string(v.dyadic_verdict)},
                       {"partial_sum_at_budget", v.partial_sum_at_budget},
                       {"dyadic_partial_sum", v.dyadic_partial_sum}};
    return env;
}

// Dispatch. Returns the process exit code: 0 ok, 2 config/schema error,
// 3 numeric failure.
inline int run(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (cfg.threads > 0) set_thread_cap(cfg.threads);
        std::string format = cfg.format;
        if (format.empty())
            format = cfg.out.size() >= 4 && cfg.out.substr(cfg.out.size() - 4) == ".csv" ? "csv" : "json";
        if (format != "json" && format != "csv") throw ConfigError("format: expected json or csv");

        detail::ReportEnvelope env;
        std::string csv;
        std::string* csv_req = format == "csv" ? &csv : nullptr;
        if (cfg.subcommand == "measure")
            env = run_measure(cfg);
        else if (cfg.subcommand == "calibrate")
            env = run_calibrate(cfg);
        else if (cfg.subcommand == "regsys")
            env = run_regsys(cfg);
        else if (cfg.subcommand == "overlap")
            env = run_overlap(cfg, csv_req);
        else if (cfg.subcommand == "count")
            env = run_count(cfg, csv_req);
        else if (cfg.subcommand == "series")
            env = run_series(cfg);
        else
            throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");

        double wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (format == "csv") {
            if (csv.empty())
                throw ConfigError("format csv is only available for the overlap and count subcommands");
            detail::write_file(cfg.out, csv);
            // Summary metadata goes to stdout; the CSV body stays deterministic.
            std::cout << detail::render_json_report(cfg, env, wall_ms);
        } else {
            detail::write_file(cfg.out, detail::render_json_report(cfg, env, wall_ms));
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace dioph::cli
