#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace scov::bench {

/// Flat key = value experiment description (TOML subset: numbers,
/// strings, [lists], # comments).
struct ExperimentSpec {
    std::string family;  // runtime | eps-sweep | near-dup
    std::vector<std::size_t> p_list;
    std::string n_rule = "p-log-p";  // or "fixed"
    std::size_t n_fixed = 0;
    std::size_t trees = 20;
    double mu = 0.5;
    std::vector<double> eps_list;
    std::vector<std::size_t> m_list = {10, 25, 50};
    std::size_t repetitions = 1;
    std::uint64_t seed = 1;
    std::vector<std::string> methods = {"tree", "dense"};
    std::size_t queries = 100;    // near-dup trials per p
    double query_eps = 0.25;
    double query_mu = 0.75;
    std::size_t chunk_level = 0;
};

ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec parse_spec_file(const std::string& path);

/// One CSV row. recall/misdetect of -1 mean "not applicable".
struct ResultRow {
    std::string method;
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    double eps = -1.0;
    std::size_t rep = 0;
    double wall_ms = 0.0;  // informational only; counters are the signal
    std::uint64_t visited_nodes = 0;
    std::uint64_t inner_products = 0;
    double recall_pct = -1.0;
    double misdetect_pct = -1.0;
    std::int64_t false_entries = -1;
    std::string error;
};

/// Recall vs the dense-oracle J_mu(S) on the sampled data.
std::vector<ResultRow> run_runtime_experiment(const ExperimentSpec& spec);

/// Misdetection of the ground-truth population support as the
/// perturbation magnitude sweeps past eps_crit; common random numbers
/// across cells of one repetition.
std::vector<ResultRow> run_eps_sweep(const ExperimentSpec& spec);

/// Per-query cost and detection rate on the unit-sphere reference set
/// (cosine semantics, no centering).
std::vector<ResultRow> run_near_dup(const ExperimentSpec& spec);

/// Versioned CSV ("# sparse-cov-bench v1" comment, then header).
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

bool any_errors(const std::vector<ResultRow>& rows);

}  // namespace scov::bench
