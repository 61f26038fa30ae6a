// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end for the experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 every scenario was
// infeasible, 4 internal solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "eerelay/experiments.hpp"
#include "eerelay/fractional.hpp"

namespace {

using namespace eerelay;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string algorithm;
    std::vector<double> snr_db;
    std::optional<double> rho;
    std::optional<int> scenarios;
    std::optional<int> mc_samples;
    std::optional<int> workers;
    std::optional<int> starts;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "JSON configuration file");
    app->add_option("--out", f.out, "output path (stdout when omitted)");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--algorithm", f.algorithm, "perfect, stat_h, stat_g, stat_h_jensen or all");
    app->add_option("--snr-db", f.snr_db, "SNR grid in dB")->delimiter(',');
    app->add_option("--rho", f.rho, "correlation index");
    app->add_option("--scenarios", f.scenarios, "number of channel scenarios");
    app->add_option("--mc-samples", f.mc_samples, "Monte-Carlo samples");
    app->add_option("--workers", f.workers, "worker threads (output does not depend on it)");
    app->add_option("--starts", f.starts, "random starts per scenario");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + path);
    out << text;
}

ExperimentConfig build_config(const CommonFlags& f, ExperimentConfig cfg) {
    if (!f.config.empty()) cfg = config_from_json(read_file(f.config), cfg);
    if (f.seed) cfg.master_seed = *f.seed;
    if (!f.algorithm.empty()) {
        if (f.algorithm == "all")
            cfg.algorithms = {Algorithm::perfect, Algorithm::stat_h, Algorithm::stat_g};
        else
            cfg.algorithms = {parse_algorithm(f.algorithm)};
    }
    if (!f.snr_db.empty()) cfg.snr_grid_db = f.snr_db;
    if (f.rho) cfg.rho = *f.rho;
    if (f.scenarios) cfg.n_scenarios = *f.scenarios;
    if (f.mc_samples) cfg.mc_samples = *f.mc_samples;
    if (f.workers) cfg.workers = *f.workers;
    if (f.starts) cfg.n_starts = *f.starts;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-efficient precoding for two-hop AF MIMO relaying"};
    app.require_subcommand(1);

    CommonFlags conv_f, snr_f, single_f;
    auto* conv = app.add_subcommand("convergence", "GEE-vs-iteration traces of every random start");
    add_common(conv, conv_f);

    auto* snr = app.add_subcommand("gee-vs-snr", "instantaneous GEE of each algorithm over an SNR grid");
    add_common(snr, snr_f);
    std::string summary_path;
    snr->add_option("--summary", summary_path, "per-SNR averages (CSV)");

    auto* beam = app.add_subcommand("beamforming-scan", "full-power beamforming verdict versus P");
    BeamScanConfig bcfg;
    std::string beam_out;
    std::optional<std::uint64_t> beam_seed;
    beam->add_option("--out", beam_out, "output CSV");
    beam->add_option("--seed", beam_seed, "master seed");
    beam->add_option("--mc-samples", bcfg.mc_samples, "samples for the condition");
    beam->add_option("--saa-samples", bcfg.saa_samples, "samples for the brute-force solves");
    beam->add_option("--dbw-lo", bcfg.dbw_lo, "first P in dBW");
    beam->add_option("--dbw-hi", bcfg.dbw_hi, "last P in dBW");
    beam->add_option("--dbw-step", bcfg.dbw_step, "grid step in dB");

    auto* single = app.add_subcommand("single", "one scenario end to end, JSON dump");
    add_common(single, single_f);
    int scenario_id = 0;
    single->add_option("--scenario", scenario_id, "scenario index");

    auto* lemmas = app.add_subcommand("verify-lemmas", "random falsification of the appendix lemmas");
    long trials = 10000;
    std::string lemma_out;
    std::uint64_t lemma_seed = 1;
    lemmas->add_option("--trials", trials, "trials per lemma");
    lemmas->add_option("--out", lemma_out, "output CSV");
    lemmas->add_option("--seed", lemma_seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*conv) {
            ExperimentConfig base;
            base.algorithms = {Algorithm::stat_h};
            auto cfg = build_config(conv_f, base);
            auto res = run_convergence(cfg);
            write_output(conv_f.out, to_csv(res.rows));
            bool any = false;
            for (const auto& o : res.outcomes) any = any || o.feasible;
            return any ? 0 : kExitInfeasible;
        }
        if (*snr) {
            auto cfg = build_config(snr_f, ExperimentConfig{});
            auto res = run_gee_vs_snr(cfg);
            write_output(snr_f.out, to_csv(res.rows));
            if (!summary_path.empty()) write_output(summary_path, to_csv(res.summary));
            std::fprintf(stderr, "%s", to_csv(res.summary).c_str());
            return res.infeasible == static_cast<int>(res.rows.size()) ? kExitInfeasible : 0;
        }
        if (*beam) {
            if (beam_seed) bcfg.master_seed = *beam_seed;
            auto res = run_beamforming_scan(bcfg);
            write_output(beam_out, to_csv(res.rows));
            std::fprintf(stderr, "threshold %s dBW, monotonicity violations %d\n",
                         format_double(res.threshold_dbw).c_str(), res.monotonicity_violations);
            return 0;
        }
        if (*single) {
            ExperimentConfig base;
            base.snr_grid_db = {20.0};
            auto cfg = build_config(single_f, base);
            write_output(single_f.out, run_single(cfg, scenario_id));
            return 0;
        }
        if (*lemmas) {
            if (trials < 1) throw ParameterError("trials must be positive");
            auto rows = run_verify_lemmas(trials, lemma_seed);
            write_output(lemma_out, to_csv(rows));
            for (const auto& r : rows)
                if (r.violations) return kExitSolver;
            return 0;
        }
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitSolver;
    }
    return 0;
}
