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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eerelay/beamforming.hpp"
#include "eerelay/system_model.hpp"

namespace eerelay {

enum class Algorithm { perfect = 1, stat_h = 2, stat_g = 3, stat_h_jensen = 4 };

std::string algorithm_name(Algorithm a);
/// Accepts perfect, stat_h, stat_g, stat_h_jensen; throws ParameterError.
Algorithm parse_algorithm(const std::string& s);

struct ExperimentConfig {
    SystemDims dims;
    double rho = 0.5;
    std::vector<double> snr_grid_db{20.0};
    double p_circuit = 5.0;
    double rate_min = 1.0;
    /// Absolute relay cap in watts; negative means "follow the SNR".
    double p_relay_max_override = -1.0;
    int n_scenarios = 1000;
    int n_starts = 10;
    double eps = 1e-3;
    int max_iter = 100;
    std::uint64_t master_seed = 1;
    int mc_samples = 500;
    std::vector<Algorithm> algorithms{Algorithm::perfect, Algorithm::stat_h, Algorithm::stat_g};
    int workers = 1;
    void validate() const;
};

/// Keys mirror the field names; snr_grid_db is a list, algorithms a list of
/// names. Unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});

/// SNR = P^max / sigma^2 with sigma^2 = 1 on both hops and equal caps,
/// unless p_relay_max_override is set.
LinkBudget budget_for_snr(const ExperimentConfig& cfg, double snr_db);

/// Exponential correlation with index rho on every side of both links.
KroneckerModel correlation_model(const ExperimentConfig& cfg, int n_receive, int n_transmit);

/// Channels of a scenario, drawn from the algorithm-0 substream so all
/// algorithms see the same realization.
ChannelRealization draw_scenario(const ExperimentConfig& cfg, int scenario_id);

struct ScenarioRecord {
    int scenario_id = 0;
    double snr_db = 0.0;
    double rho = 0.0;
    Algorithm algorithm = Algorithm::perfect;
    double gee = 0.0;
    double rate = 0.0;
    double p_source = 0.0;
    double p_relay = 0.0;
    int iterations = 0;
    bool converged = false;
    bool qos_met = false;
    std::uint64_t seed = 0;
};

/// One solved scenario: the record plus what the CSV does not carry.
struct ScenarioOutcome {
    ScenarioRecord record;
    bool feasible = false;
    PrecoderSolution solution;
    std::vector<std::vector<double>> traces;  // one GEE trace per start
    std::vector<double> fixed_points;         // final GEE of each start
    int runs_off_best = 0;
};

ScenarioOutcome run_scenario(const ExperimentConfig& cfg, int scenario_id, double snr_db, Algorithm alg);

struct SnrSummary {
    double snr_db = 0.0;
    Algorithm algorithm = Algorithm::perfect;
    double mean_gee = 0.0;
    int included = 0;
    int infeasible = 0;
};

struct GeeVsSnrResult {
    std::vector<ScenarioRecord> rows;  // sorted by (snr, scenario, algorithm)
    std::vector<SnrSummary> summary;
    int infeasible = 0;
};

GeeVsSnrResult run_gee_vs_snr(const ExperimentConfig& cfg);

struct ConvergenceRow {
    int scenario_id = 0;
    double snr_db = 0.0;
    double rho = 0.0;
    Algorithm algorithm = Algorithm::stat_h;
    int start = 0;
    int iteration = 0;  // 1-based
    double gee = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<ScenarioOutcome> outcomes;  // same order as the sorted rows
};

/// Per-start traces for every configured algorithm at every SNR point.
ConvergenceResult run_convergence(const ExperimentConfig& cfg);

struct BeamScanConfig {
    int n = 2;
    double p_s_max = 1.0;
    std::vector<double> lam_c{1.0, 1.0};
    std::vector<double> lam_t{2.0, 1.0};
    double b = 0.1;
    double c = 0.5;
    double p_circuit = 0.1;  // only P_R^max + P_c enters; fixed to b
    double dbw_lo = -15.0;
    double dbw_hi = 3.0;
    double dbw_step = 0.25;
    int mc_samples = 1000000;
    int saa_samples = 20000;
    std::uint64_t master_seed = 1;
};

struct BeamScanRow {
    double p_dbw = 0.0;
    double p_watts = 0.0;
    double p_relay_max = 0.0;
    double lambda1_norm = 0.0;
    double lambda2_norm = 0.0;
    double condition_lhs = 0.0;
    int c2 = 0;
    bool fp_optimal = false;
    double mc_std_error = 0.0;
    bool solver_fp = false;  // solver put all power P on stream 1
};

struct BeamScanResult {
    std::vector<BeamScanRow> rows;
    double threshold_dbw = 0.0;  // largest grid point with an optimal verdict
    int monotonicity_violations = 0;
};

BeamScanResult run_beamforming_scan(const BeamScanConfig& cfg);

/// Full solution dump of one scenario as JSON text.
std::string run_single(const ExperimentConfig& cfg, int scenario_id);

struct LemmaRow {
    int lemma = 0;  // 4 and 5 reported separately
    long trials = 0;
    long violations = 0;
    double worst_margin = 0.0;
};

std::vector<LemmaRow> run_verify_lemmas(long trials, std::uint64_t seed);

/// CSV text, header included, '.' decimal, shortest round-trip doubles.
std::string to_csv(const std::vector<ScenarioRecord>& rows);
std::string to_csv(const std::vector<ConvergenceRow>& rows);
std::string to_csv(const std::vector<BeamScanRow>& rows);
std::string to_csv(const std::vector<SnrSummary>& rows);
std::string to_csv(const std::vector<LemmaRow>& rows);

/// Locale-independent shortest representation.
std::string format_double(double v);

}  // namespace eerelay
