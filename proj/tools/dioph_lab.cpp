// dioph-lab: experiment runner for the Diophantine-approximation toolkit.
//
// Subcommands: measure, calibrate, regsys, overlap, count, series. Each run
// emits a self-describing report (JSON, or CSV for overlap/count) embedding
// the full config, library version, constants used, and the seed; identical
// config + seed reproduces the report body byte-for-byte across thread
// counts, apart from the timestamp/wall_ms lines.

#include <CLI11.hpp>
#include <cstdlib>
#include <string>

#include "dioph/cli.hpp"

using dioph::cli::ExperimentConfig;

namespace {

void add_common(CLI::App* sub, ExperimentConfig& cfg, std::string& map_spec,
                std::string& ball_spec, std::string& config_path) {
    sub->add_option("--config", config_path, "JSON config file (flags override its fields)");
    sub->add_option("--map", map_spec, "map spec, e.g. veronese:2");
    sub->add_option("--ball", ball_spec, "region ball: center...,radius e.g. 0.5,0.5");
    sub->add_option("--seed", cfg.seed, "RNG seed (recorded in the report)");
    sub->add_option("--out", cfg.out, "output file (stdout when omitted)");
    sub->add_option("--format", cfg.format, "json|csv (default from --out extension)");
    sub->add_option("--threads", cfg.threads, "worker thread cap (env DIOPH_LAB_THREADS)");
}

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t next = s.find(',', pos);
        std::string tok = next == std::string::npos ? s.substr(pos) : s.substr(pos, next - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dioph-lab: linear-forms, resonant-set and limsup-measure experiments"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string map_spec, ball_spec, config_path;
    std::string eps_spec, gammas_spec, psi_spec;

    if (const char* env = std::getenv("DIOPH_LAB_THREADS")) cfg.threads = std::atoi(env);

    auto* measure = app.add_subcommand("measure", "limsup-set measure |L_f(B; eps; Q)|");
    add_common(measure, cfg, map_spec, ball_spec, config_path);
    measure->add_option("--eps", eps_spec, "epsilon or comma list (list => scaling report)");
    measure->add_option("--Q", cfg.Q, "form height bound");
    measure->add_option("--method", cfg.method, "exact1d|montecarlo");
    measure->add_option("--samples", cfg.samples, "Monte Carlo samples");
    measure->add_option("--plot", cfg.plot, "write a log-log scaling chart (SVG)");

    auto* calibrate = app.add_subcommand("calibrate", "calibrate C0_hat and emit a constants file");
    add_common(calibrate, cfg, map_spec, ball_spec, config_path);
    calibrate->add_option("--eps", eps_spec, "epsilon grid (default 0.025,0.05,0.1,0.2)");
    calibrate->add_option("--Q", cfg.Q, "form height bound (default 50)");
    calibrate->add_option("--method", cfg.method, "exact1d|montecarlo");
    calibrate->add_option("--samples", cfg.samples, "Monte Carlo samples");
    calibrate->add_option("--c0", cfg.c0, "override the C0 dial for the emitted constants");
    calibrate->add_option("--c3", cfg.c3, "emit construction constants with this C3 scale");

    auto* regsys = app.add_subcommand("regsys", "build + verify a regular-system certificate");
    add_common(regsys, cfg, map_spec, ball_spec, config_path);
    regsys->add_option("--Q", cfg.Q, "construction height");
    regsys->add_option("--consts", cfg.consts_path, "constants file from `calibrate`");
    regsys->add_option("--sampler", cfg.sampler, "grid:M or mc:SAMPLES[:SEED]");
    regsys->add_option("--gammas", gammas_spec, "tube radii (default T^-1/4, T^-1/16)");

    auto* overlap = app.add_subcommand("overlap", "dyadic-block overlap experiment");
    add_common(overlap, cfg, map_spec, ball_spec, config_path);
    overlap->add_option("--psi", psi_spec, "Psi spec, e.g. clamped:0.5:power:1");
    overlap->add_option("--k0", cfg.k0, "first dyadic scale (default: smallest with t >= 10)");
    overlap->add_option("--K", cfg.K, "last dyadic scale");
    overlap->add_option("--consts", cfg.consts_path, "constants file from `calibrate`");
    overlap->add_option("--oversample", cfg.oversample, "sampler density relative to T");

    auto* count = app.add_subcommand("count", "solution-count survey of the main inequality");
    add_common(count, cfg, map_spec, ball_spec, config_path);
    count->add_option("--psi", psi_spec, "psi spec, e.g. power:1");
    count->add_option("--Qmax", cfg.Qmax, "height cutoff");
    count->add_option("--samples", cfg.samples, "sample points (default 200)");
    count->add_flag("--legacy-arg", cfg.legacy_arg, "threshold psi(h) instead of psi(h^n)");
    count->add_option("--plot", cfg.plot, "write a count-growth quantile chart (SVG)");

    auto* series = app.add_subcommand("series", "divergence/convergence verdict");
    add_common(series, cfg, map_spec, ball_spec, config_path);
    series->add_option("--psi", psi_spec, "psi spec");
    series->add_option("--d", cfg.d, "dimension d (default 1)");
    series->add_option("--s", cfg.s, "index s in [0, d)");
    series->add_option("--budget", cfg.budget, "direct-sum budget (default 2^20)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "config error: cannot open '" << config_path << "'\n";
                return 2;
            }
            dioph::json j;
            in >> j;
            ExperimentConfig file_cfg = dioph::cli::config_from_json(j);
            // CLI flags already written into cfg win over file fields.
            ExperimentConfig merged = file_cfg;
            merged.subcommand = cfg.subcommand;
            if (cfg.seed) merged.seed = cfg.seed;
            if (!cfg.out.empty()) merged.out = cfg.out;
            if (!cfg.format.empty()) merged.format = cfg.format;
            if (cfg.threads) merged.threads = cfg.threads;
            if (cfg.Q) merged.Q = cfg.Q;
            if (cfg.Qmax) merged.Qmax = cfg.Qmax;
            if (cfg.samples) merged.samples = cfg.samples;
            cfg = merged;
        }
        cfg.subcommand = app.get_subcommands().front()->get_name();
        if (!map_spec.empty()) cfg.map = dioph::map_to_json(dioph::map_from_spec(map_spec));
        if (!ball_spec.empty()) cfg.ball = parse_csv_doubles(ball_spec);
        if (!psi_spec.empty()) cfg.psi = dioph::psi_to_json(dioph::psi_from_spec(psi_spec));
        if (!eps_spec.empty()) cfg.eps = parse_csv_doubles(eps_spec);
        if (!gammas_spec.empty()) cfg.gammas = parse_csv_doubles(gammas_spec);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    return dioph::cli::run(cfg);
}
