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

#include "eerelay/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "eerelay/oracle.hpp"
#include "eerelay/perfect_csi.hpp"
#include "eerelay/stat_csi_g.hpp"
#include "eerelay/stat_csi_h.hpp"

namespace eerelay {

namespace {

using json = nlohmann::ordered_json;

// Runs task(i) for i < n on the requested number of threads. Each task
// writes only its own slot, so the result does not depend on scheduling.
// The exception of the lowest failing index is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& task) {
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[static_cast<size_t>(i)] = std::current_exception();
            }
        }
    };
    const int w = std::max(1, std::min(workers, n));
    if (w == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < w; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string fmt(double v) { return format_double(v); }

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const RVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

AlternatingOptions alternating_options(const ExperimentConfig& cfg) {
    AlternatingOptions o;
    o.eps = cfg.eps;
    o.max_iter = cfg.max_iter;
    return o;
}

void fill_from_multistart(ScenarioOutcome& out, const MultistartResult& ms) {
    out.feasible = ms.feasible;
    out.runs_off_best = ms.runs_off_best;
    for (const auto& r : ms.runs) {
        out.traces.push_back(r.trace.gee_per_iteration);
        out.fixed_points.push_back(r.gee);
    }
    out.record.iterations = ms.best.trace.iterations;
    out.record.converged = ms.best.trace.converged;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::perfect: return "perfect";
        case Algorithm::stat_h: return "stat_h";
        case Algorithm::stat_g: return "stat_g";
        case Algorithm::stat_h_jensen: return "stat_h_jensen";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
    for (auto a : {Algorithm::perfect, Algorithm::stat_h, Algorithm::stat_g, Algorithm::stat_h_jensen})
        if (algorithm_name(a) == s) return a;
    throw ParameterError("unknown algorithm '" + s + "'");
}

void ExperimentConfig::validate() const {
    dims.validate();
    if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("rho must lie in [0, 1)");
    if (snr_grid_db.empty()) throw ParameterError("snr grid is empty");
    for (double s : snr_grid_db)
        if (!std::isfinite(s)) throw ParameterError("snr values must be finite");
    if (!(p_circuit > 0)) throw ParameterError("p_circuit must be positive");
    if (!(rate_min >= 0)) throw ParameterError("rate_min must be non-negative");
    if (n_scenarios < 1 || n_starts < 1 || mc_samples < 1 || max_iter < 1)
        throw ParameterError("counts must be positive");
    if (!(eps > 0)) throw ParameterError("eps must be positive");
    if (algorithms.empty()) throw ParameterError("no algorithm selected");
    if (workers < 1) throw ParameterError("workers must be >= 1");
    const int nmax = std::max({dims.n_source, dims.n_relay, dims.n_dest});
    if (nmax > kMaxGramDim) throw ParameterError("antenna counts above the SAA kernel limit");
}

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig cfg) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    static const std::set<std::string> known{"n_source", "n_relay", "n_dest", "rho", "snr_grid_db", "p_circuit",
                                             "rate_min", "p_relay_max", "n_scenarios", "n_starts", "eps", "max_iter",
                                             "master_seed", "mc_samples", "algorithms", "algorithm", "workers"};
    try {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!known.count(it.key())) throw ParameterError("unknown config key '" + it.key() + "'");
        if (j.contains("n_source")) cfg.dims.n_source = j["n_source"].get<int>();
        if (j.contains("n_relay")) cfg.dims.n_relay = j["n_relay"].get<int>();
        if (j.contains("n_dest")) cfg.dims.n_dest = j["n_dest"].get<int>();
        if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
        if (j.contains("snr_grid_db")) cfg.snr_grid_db = j["snr_grid_db"].get<std::vector<double>>();
        if (j.contains("p_circuit")) cfg.p_circuit = j["p_circuit"].get<double>();
        if (j.contains("rate_min")) cfg.rate_min = j["rate_min"].get<double>();
        if (j.contains("p_relay_max")) {
            cfg.p_relay_max_override = j["p_relay_max"].get<double>();
            if (cfg.p_relay_max_override < 0) throw ParameterError("p_relay_max must be non-negative");
        }
        if (j.contains("n_scenarios")) cfg.n_scenarios = j["n_scenarios"].get<int>();
        if (j.contains("n_starts")) cfg.n_starts = j["n_starts"].get<int>();
        if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
        if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<int>();
        if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("mc_samples")) cfg.mc_samples = j["mc_samples"].get<int>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("algorithm")) cfg.algorithms = {parse_algorithm(j["algorithm"].get<std::string>())};
        if (j.contains("algorithms")) {
            cfg.algorithms.clear();
            for (const auto& s : j["algorithms"].get<std::vector<std::string>>())
                cfg.algorithms.push_back(parse_algorithm(s));
        }
    } catch (const json::exception& e) {
        throw ParameterError(std::string("config has a wrongly typed value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

LinkBudget budget_for_snr(const ExperimentConfig& cfg, double snr_db) {
    LinkBudget b;
    b.p_source_max = b.p_relay_max = std::pow(10.0, snr_db / 10.0);
    if (cfg.p_relay_max_override >= 0) b.p_relay_max = cfg.p_relay_max_override;
    b.sigma2_relay = b.sigma2_dest = 1.0;
    b.p_circuit = cfg.p_circuit;
    b.rate_min = cfg.rate_min;
    return b;
}

KroneckerModel correlation_model(const ExperimentConfig& cfg, int n_receive, int n_transmit) {
    return {exp_correlation(cfg.rho, n_receive), exp_correlation(cfg.rho, n_transmit)};
}

ChannelRealization draw_scenario(const ExperimentConfig& cfg, int scenario_id) {
    Rng rng(substream_seed(cfg.master_seed, static_cast<std::uint64_t>(scenario_id), 0));
    const auto& d = cfg.dims;
    ChannelRealization ch;
    ch.h = sample_kronecker(correlation_model(cfg, d.n_relay, d.n_source), rng);
    ch.g = sample_kronecker(correlation_model(cfg, d.n_dest, d.n_relay), rng);
    return ch;
}

ScenarioOutcome run_scenario(const ExperimentConfig& cfg, int scenario_id, double snr_db, Algorithm alg) {
    const LinkBudget budget = budget_for_snr(cfg, snr_db);
    const ChannelRealization ch = draw_scenario(cfg, scenario_id);
    const std::uint64_t seed =
        substream_seed(cfg.master_seed, static_cast<std::uint64_t>(scenario_id), static_cast<std::uint64_t>(alg));
    Rng rng(seed);
    const auto opt = alternating_options(cfg);
    const auto& d = cfg.dims;

    ScenarioOutcome out;
    auto& rec = out.record;
    rec.scenario_id = scenario_id;
    rec.snr_db = snr_db;
    rec.rho = cfg.rho;
    rec.algorithm = alg;
    rec.seed = seed;

    MultistartResult ms;
    switch (alg) {
        case Algorithm::perfect: {
            auto st = optimal_eigenstructure(ch, budget);
            ms = multistart_perfect(st.inst, cfg.n_starts, rng, opt);
            if (ms.feasible) out.solution = perfect_solution(st, ms.best.lam_q, ms.best.lam_a);
            break;
        }
        case Algorithm::stat_h:
        case Algorithm::stat_h_jensen: {
            auto st = optimal_structure_h(correlation_model(cfg, d.n_relay, d.n_source), ch.g, budget,
                                          cfg.mc_samples, rng);
            st.inst.use_jensen = alg == Algorithm::stat_h_jensen;
            ms = multistart(stat_h_blocks(st.inst), cfg.n_starts, rng, opt);
            if (ms.feasible) out.solution = stat_h_solution(st, ms.best.lam_q, ms.best.lam_a);
            break;
        }
        case Algorithm::stat_g: {
            auto st = optimal_structure_g(ch.h, correlation_model(cfg, d.n_dest, d.n_relay), budget, cfg.mc_samples,
                                          rng);
            ms = multistart(stat_g_blocks(st.inst), cfg.n_starts, rng, opt);
            if (ms.feasible) out.solution = stat_g_solution(st, ms.best.lam_q, ms.best.lam_a);
            break;
        }
    }
    fill_from_multistart(out, ms);
    if (out.feasible) {
        // Instantaneous figures on the realized channels.
        GEEReport rep = gee(ch, out.solution, budget);
        rec.gee = rep.gee;
        rec.rate = rep.rate;
        rec.p_source = rep.p_source;
        rec.p_relay = rep.p_relay;
        rec.qos_met = rep.qos_met;
    } else {
        rec.gee = 0.0;
        rec.rate = 0.0;
        rec.converged = false;
        rec.iterations = 0;
    }
    return out;
}

// Every (snr, scenario, algorithm) combination, solved in parallel and
// returned in (snr, scenario, algorithm) order.
static std::vector<ScenarioOutcome> solve_all(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Task {
        double snr;
        int scenario;
        Algorithm alg;
    };
    std::vector<Task> tasks;
    for (double s : cfg.snr_grid_db)
        for (int k = 0; k < cfg.n_scenarios; ++k)
            for (auto a : cfg.algorithms) tasks.push_back({s, k, a});
    std::vector<ScenarioOutcome> outs(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), cfg.workers, [&](int i) {
        const auto& t = tasks[static_cast<size_t>(i)];
        outs[static_cast<size_t>(i)] = run_scenario(cfg, t.scenario, t.snr, t.alg);
    });
    auto key = [](const ScenarioOutcome& o) {
        const auto& r = o.record;
        return std::make_tuple(r.snr_db, r.scenario_id, static_cast<int>(r.algorithm));
    };
    std::stable_sort(outs.begin(), outs.end(),
                     [&](const ScenarioOutcome& x, const ScenarioOutcome& y) { return key(x) < key(y); });
    return outs;
}

GeeVsSnrResult run_gee_vs_snr(const ExperimentConfig& cfg) {
    const auto outs = solve_all(cfg);
    GeeVsSnrResult res;
    for (const auto& o : outs) {
        res.rows.push_back(o.record);
        if (!o.feasible) ++res.infeasible;
    }
    std::vector<double> snrs = cfg.snr_grid_db;
    std::sort(snrs.begin(), snrs.end());
    snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());
    std::vector<Algorithm> algs = cfg.algorithms;
    std::sort(algs.begin(), algs.end());
    algs.erase(std::unique(algs.begin(), algs.end()), algs.end());
    for (double s : snrs)
        for (auto a : algs) {
            SnrSummary sm{s, a, 0.0, 0, 0};
            double sum = 0.0;
            for (const auto& o : outs) {
                if (o.record.snr_db != s || o.record.algorithm != a) continue;
                if (!o.feasible) {
                    ++sm.infeasible;
                    continue;
                }
                sum += o.record.gee;
                ++sm.included;
            }
            sm.mean_gee = sm.included ? sum / sm.included : 0.0;
            res.summary.push_back(sm);
        }
    return res;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
    auto outs = solve_all(cfg);
    ConvergenceResult res;
    for (auto& o : outs) {
        for (size_t s = 0; s < o.traces.size(); ++s)
            for (size_t it = 0; it < o.traces[s].size(); ++it)
                res.rows.push_back({o.record.scenario_id, o.record.snr_db, o.record.rho, o.record.algorithm,
                                    static_cast<int>(s), static_cast<int>(it) + 1, o.traces[s][it]});
        res.outcomes.push_back(std::move(o));
    }
    return res;
}

BeamScanResult run_beamforming_scan(const BeamScanConfig& cfg) {
    if (cfg.n < 1 || static_cast<int>(cfg.lam_t.size()) != cfg.n || cfg.lam_c.empty())
        throw ParameterError("beam scan: lam_t must have n entries and lam_c must be non-empty");
    if (!(cfg.dbw_step > 0) || cfg.dbw_hi < cfg.dbw_lo) throw ParameterError("beam scan: bad dBW grid");
    if (cfg.mc_samples < 1 || cfg.saa_samples < 1) throw ParameterError("beam scan: sample counts must be positive");
    BeamInstanceH inst;
    inst.lam_c = Eigen::Map<const RVector>(cfg.lam_c.data(), static_cast<Eigen::Index>(cfg.lam_c.size()));
    inst.lam_t = Eigen::Map<const RVector>(cfg.lam_t.data(), cfg.n);
    inst.b = cfg.b;
    inst.c = cfg.c;
    inst.d = (inst.lam_t.cwiseInverse().array() + cfg.c).matrix();
    inst.p_s_max = cfg.p_s_max;
    inst.p_c = cfg.p_circuit;
    inst.p_r_max = relay_budget_for_cap(inst, 1.0);
    inst.validate();

    std::vector<double> grid;
    const int steps = static_cast<int>(std::floor((cfg.dbw_hi - cfg.dbw_lo) / cfg.dbw_step + 1e-9));
    for (int k = 0; k <= steps; ++k) grid.push_back(from_dbw(cfg.dbw_lo + k * cfg.dbw_step));

    Rng mc(substream_seed(cfg.master_seed, 0, 1));
    auto scan = threshold_scan_h(inst, grid, cfg.mc_samples, mc);
    Rng saa(substream_seed(cfg.master_seed, 0, 2));
    GramBank bank = beam_grams_h(inst, cfg.saa_samples, saa);

    BeamScanResult res;
    res.monotonicity_violations = scan.monotonicity_violations;
    res.threshold_dbw = scan.threshold_index >= 0 ? cfg.dbw_lo + scan.threshold_index * cfg.dbw_step : -INFINITY;
    for (size_t k = 0; k < scan.rows.size(); ++k) {
        const auto& row = scan.rows[k];
        BeamInstanceH at = inst;
        at.p_r_max = row.p_relay_max;
        BeamSolve s = solve_beam_h(at, bank);
        BeamScanRow out;
        out.p_dbw = cfg.dbw_lo + static_cast<double>(k) * cfg.dbw_step;
        out.p_watts = row.p;
        out.p_relay_max = row.p_relay_max;
        out.lambda1_norm = s.normalized(0);
        out.lambda2_norm = cfg.n >= 2 ? s.normalized(1) : 0.0;
        out.condition_lhs = row.verdict.condition_lhs;
        out.c2 = row.verdict.c2_sign;
        out.fp_optimal = row.verdict.fp_optimal;
        out.mc_std_error = row.verdict.mc_std_error;
        out.solver_fp = s.rank_one && s.full_power;
        res.rows.push_back(out);
    }
    return res;
}

std::string run_single(const ExperimentConfig& cfg, int scenario_id) {
    cfg.validate();
    json j;
    j["scenario_id"] = scenario_id;
    j["master_seed"] = cfg.master_seed;
    j["rho"] = cfg.rho;
    const ChannelRealization ch = draw_scenario(cfg, scenario_id);
    j["channels"] = {{"h", matrix_json(ch.h)}, {"g", matrix_json(ch.g)}};
    json runs = json::array();
    for (double snr : cfg.snr_grid_db)
        for (auto alg : cfg.algorithms) {
            json r;
            r["algorithm"] = algorithm_name(alg);
            r["snr_db"] = snr;
            auto o = run_scenario(cfg, scenario_id, snr, alg);
            const auto& rec = o.record;
            r["seed"] = rec.seed;
            r["feasible"] = o.feasible;
            if (!o.feasible) {
                r["infeasibility"] = {{"reason", "rate target unreachable within the power caps"},
                                      {"rate_min", cfg.rate_min},
                                      {"rate", 0.0}};
            } else {
                r["gee"] = rec.gee;
                r["rate"] = rec.rate;
                r["p_source"] = rec.p_source;
                r["p_relay"] = rec.p_relay;
                r["qos_met"] = rec.qos_met;
                r["iterations"] = rec.iterations;
                r["converged"] = rec.converged;
                r["q_powers"] = vector_json(o.solution.q_powers);
                r["a_gains"] = vector_json(o.solution.a_gains);
                r["Q"] = matrix_json(assemble_Q(o.solution));
                r["A"] = matrix_json(assemble_A(o.solution));
            }
            r["fixed_points"] = o.fixed_points;
            r["runs_off_best"] = o.runs_off_best;
            runs.push_back(r);
        }
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

std::vector<LemmaRow> run_verify_lemmas(long trials, std::uint64_t seed) {
    using Fn = LemmaReport (*)(long, Rng&);
    const std::pair<int, Fn> suite[] = {{1, falsify_lemma1}, {2, falsify_lemma2}, {3, falsify_lemma3},
                                        {4, falsify_lemma4}, {5, falsify_lemma5}, {6, falsify_lemma6}};
    std::vector<LemmaRow> out;
    for (const auto& [id, fn] : suite) {
        Rng rng(substream_seed(seed, static_cast<std::uint64_t>(id), 0));
        auto rep = fn(trials, rng);
        out.push_back({id, rep.trials, rep.violations, rep.worst_margin});
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string to_csv(const std::vector<ScenarioRecord>& rows) {
    std::string s = "scenario_id,snr_db,rho,algorithm,gee,rate,p_source,p_relay,iterations,converged,qos_met,seed\n";
    for (const auto& r : rows) {
        s += std::to_string(r.scenario_id) + ',' + fmt(r.snr_db) + ',' + fmt(r.rho) + ',' + algorithm_name(r.algorithm) +
             ',' + fmt(r.gee) + ',' + fmt(r.rate) + ',' + fmt(r.p_source) + ',' + fmt(r.p_relay) + ',' +
             std::to_string(r.iterations) + ',' + (r.converged ? "true" : "false") + ',' +
             (r.qos_met ? "true" : "false") + ',' + std::to_string(r.seed) + '\n';
    }
    return s;
}

std::string to_csv(const std::vector<ConvergenceRow>& rows) {
    std::string s = "scenario_id,snr_db,rho,algorithm,start,iteration,gee\n";
    for (const auto& r : rows)
        s += std::to_string(r.scenario_id) + ',' + fmt(r.snr_db) + ',' + fmt(r.rho) + ',' + algorithm_name(r.algorithm) +
             ',' + std::to_string(r.start) + ',' + std::to_string(r.iteration) + ',' + fmt(r.gee) + '\n';
    return s;
}

std::string to_csv(const std::vector<BeamScanRow>& rows) {
    std::string s =
        "p_dbw,p_watts,p_relay_max,lambda1_norm,lambda2_norm,condition_lhs,c2,fp_optimal,mc_std_error,"
        "solver_full_power\n";
    for (const auto& r : rows)
        s += fmt(r.p_dbw) + ',' + fmt(r.p_watts) + ',' + fmt(r.p_relay_max) + ',' + fmt(r.lambda1_norm) + ',' +
             fmt(r.lambda2_norm) + ',' + fmt(r.condition_lhs) + ',' + std::to_string(r.c2) + ',' +
             (r.fp_optimal ? "true" : "false") + ',' + fmt(r.mc_std_error) + ',' + (r.solver_fp ? "true" : "false") +
             '\n';
    return s;
}

std::string to_csv(const std::vector<SnrSummary>& rows) {
    std::string s = "snr_db,algorithm,mean_gee,included,infeasible\n";
    for (const auto& r : rows)
        s += fmt(r.snr_db) + ',' + algorithm_name(r.algorithm) + ',' + fmt(r.mean_gee) + ',' +
             std::to_string(r.included) + ',' + std::to_string(r.infeasible) + '\n';
    return s;
}

std::string to_csv(const std::vector<LemmaRow>& rows) {
    std::string s = "lemma,trials,violations,worst_margin\n";
    for (const auto& r : rows)
        s += std::to_string(r.lemma) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.violations) + ',' +
             fmt(r.worst_margin) + '\n';
    return s;
}

}  // namespace eerelay
