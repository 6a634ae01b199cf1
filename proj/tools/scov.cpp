// Command-line front end: detection, verification, sample-size bounds,
// synthetic data generation, and benchmark experiments.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>

#include "scov/bench.hpp"
#include "scov/cov_tree.hpp"
#include "scov/io.hpp"
#include "scov/sfft.hpp"
#include "scov/sparsity.hpp"
#include "scov/synthgen.hpp"

namespace {

scov::CenteredColumns load_columns(const std::string& path, bool no_center,
                                   bool correlation, bool skip_header) {
    const auto raw = scov::io::read_matrix_file(path, skip_header);
    auto cols = no_center ? scov::columns_view(raw)
                          : scov::center_columns(raw);
    if (correlation) cols = scov::correlation_normalize(cols);
    return cols;
}

int run_detect(const std::string& input, const std::string& output,
               double mu, std::size_t trees, std::uint64_t seed,
               std::size_t chunk_level, std::uint64_t budget,
               bool correlation, bool symmetrize, bool no_center,
               bool skip_header) {
    const auto cols =
        load_columns(input, no_center, correlation, skip_header);
    scov::CovTreeOptions opts;
    opts.chunk_level = chunk_level;
    opts.budget = budget;
    opts.symmetrize = symmetrize;
    const auto res = scov::sparse_cov_tree(cols, trees, mu, seed, opts);
    scov::io::write_entry_set_file(output, res.entries);
    std::cerr << "entries=" << res.entries.entries.size() << '\n'
              << "visited_nodes=" << res.stats.visited_nodes << '\n'
              << "tests_performed=" << res.stats.tests_performed << '\n'
              << "inner_products=" << res.stats.inner_products << '\n'
              << "budget_exhausted=" << (res.stats.budget_exhausted ? 1 : 0)
              << '\n';
    return 0;
}

int run_detect_sfft(const std::string& input, const std::string& output,
                    std::size_t r, double R, double epsilon,
                    const std::string& solver_name, std::uint64_t seed,
                    bool no_center, bool skip_header) {
    const auto cols = load_columns(input, no_center, false, skip_header);
    std::unique_ptr<scov::SpectralSolver> solver;
    if (solver_name == "exact")
        solver = std::make_unique<scov::ExactSpectralSolver>();
    else
        solver = std::make_unique<scov::SubsampledSpectralSolver>(seed);
    const auto res =
        scov::sfft_cov_estimation(cols, r, R, epsilon, *solver, seed);
    scov::io::write_entry_set_file(output, res.entries);
    std::cerr << "rows_complete=" << res.report.rows_complete << '\n'
              << "entries_found=" << res.entries.entries.size() << '\n'
              << "u_entries_read=" << res.report.u_entries_read << '\n'
              << "delta=" << res.report.delta << '\n'
              << "delta_out_of_contract="
              << (res.report.delta_out_of_contract ? 1 : 0) << '\n'
              << "runs_per_row=" << res.report.runs_per_row << '\n';
    for (std::size_t k : res.report.incomplete_rows)
        std::cerr << "incomplete_row=" << k << '\n';
    return res.report.incomplete_rows.empty() ? 0 : 2;
}

int run_verify(const std::string& input, double mu, std::size_t r, double R,
               bool no_center, bool skip_header) {
    const auto cols = load_columns(input, no_center, false, skip_header);
    const auto S = scov::dense_covariance(cols);
    scov::SparsityProfile profile{r, mu, R};
    const auto rep = scov::verify_profile(S, cols.p, profile);
    std::cout << "is_r_mu_sparse=" << (rep.is_r_mu_sparse ? 1 : 0) << '\n'
              << "is_full_profile=" << (rep.is_full_profile ? 1 : 0) << '\n'
              << "worst_row=" << rep.worst_row << '\n'
              << "worst_residual=" << rep.worst_residual << '\n'
              << "guarantee_holds=" << (profile.guarantee_holds() ? 1 : 0)
              << '\n';
    return rep.is_full_profile ? 0 : 1;
}

int run_samples(double mu, std::size_t r, double R, std::size_t p, double K,
                double C) {
    scov::SparsityProfile profile{r, mu, R};
    const auto rep = scov::required_samples(profile, p, K, C);
    std::cout << "t=" << rep.t << '\n'
              << "n_required=" << rep.n_required << '\n'
              << "K=" << rep.K << '\n'
              << "C=" << rep.C << '\n'
              << "binding_term=" << scov::to_string(rep.binding_term) << '\n';
    return 0;
}

int run_gen(std::size_t p, std::size_t n, double eps,
            const std::string& family, std::uint64_t seed,
            const std::string& output, const std::string& truth) {
    scov::ObservationMatrix data;
    scov::PopulationModel model;
    bool have_model = false;
    if (family == "sphere") {
        data = scov::gen_unit_sphere_set(p, n, seed);
    } else {
        model = (family == "cov-eps")
                    ? scov::gen_population_cov_eps(p, eps, seed)
                    : scov::gen_population_cov(p, seed);
        have_model = true;
        data = scov::sample_gaussian(model, n, seed + 1);
    }
    scov::io::write_binary_file(output, data);
    if (!truth.empty()) {
        std::ofstream out(truth);
        if (!out) throw std::runtime_error("cannot open " + truth);
        if (have_model)
            for (const auto& [i, j] : model.support)
                out << i << ',' << j << '\n';
    }
    return 0;
}

int run_bench(const std::string& mode, const std::string& spec_path,
              const std::string& out_path, std::uint64_t seed,
              bool seed_given) {
    auto spec = scov::bench::parse_spec_file(spec_path);
    if (seed_given) spec.seed = seed;
    std::vector<scov::bench::ResultRow> rows;
    if (mode == "runtime")
        rows = scov::bench::run_runtime_experiment(spec);
    else if (mode == "eps")
        rows = scov::bench::run_eps_sweep(spec);
    else
        rows = scov::bench::run_near_dup(spec);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    scov::bench::write_csv(out, rows);
    return scov::bench::any_errors(rows) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse covariance large-entry detection"};
    app.require_subcommand(1);

    std::string input, output, truth, solver = "exact", family = "cov";
    std::string spec_path, out_path;
    double mu = 0.5, R = 0.0, epsilon = 0.0, K = 1.0, C = 8.0;
    std::size_t trees = 20, chunk_level = 0, r = 1, p = 0, n = 0;
    std::uint64_t seed = 1, budget = 0;
    bool correlation = false, symmetrize = false, no_center = false;
    bool skip_header = false;

    auto* detect = app.add_subcommand("detect", "tree-based detection");
    detect->add_option("--input", input)->required();
    detect->add_option("--output", output)->required();
    detect->add_option("--mu", mu)->required();
    detect->add_option("--trees", trees);
    detect->add_option("--seed", seed);
    detect->add_option("--chunk-level", chunk_level);
    detect->add_option("--budget", budget);
    detect->add_flag("--correlation", correlation);
    detect->add_flag("--symmetrize", symmetrize);
    detect->add_flag("--no-center", no_center);
    detect->add_flag("--skip-header", skip_header);

    auto* dsfft = app.add_subcommand("detect-sfft", "spectral detection");
    dsfft->add_option("--input", input)->required();
    dsfft->add_option("--output", output)->required();
    dsfft->add_option("--r", r)->required();
    dsfft->add_option("--R-resid", R)->required();
    dsfft->add_option("--epsilon", epsilon)->required();
    dsfft->add_option("--solver", solver)
        ->check(CLI::IsMember({"exact", "subsampled"}));
    dsfft->add_option("--seed", seed);
    dsfft->add_flag("--no-center", no_center);
    dsfft->add_flag("--skip-header", skip_header);

    auto* verify = app.add_subcommand("verify", "check a sparsity profile");
    verify->add_option("--input", input)->required();
    verify->add_option("--mu", mu)->required();
    verify->add_option("--r", r)->required();
    verify->add_option("--R", R)->required();
    verify->add_flag("--no-center", no_center);
    verify->add_flag("--skip-header", skip_header);

    auto* samples = app.add_subcommand("samples", "sample-size bound");
    samples->add_option("--mu", mu)->required();
    samples->add_option("--r", r)->required();
    samples->add_option("--R", R)->required();
    samples->add_option("--p", p)->required();
    samples->add_option("--K", K)->required();
    samples->add_option("--C", C);

    auto* gen = app.add_subcommand("gen", "synthetic data generation");
    gen->add_option("--p", p)->required();
    gen->add_option("--n", n)->required();
    gen->add_option("--eps", epsilon);
    gen->add_option("--family", family)
        ->check(CLI::IsMember({"cov", "cov-eps", "sphere"}));
    gen->add_option("--seed", seed);
    gen->add_option("--output", output)->required();
    gen->add_option("--truth", truth);

    auto* bench = app.add_subcommand("bench", "experiment runner");
    bench->require_subcommand(1);
    std::vector<CLI::App*> bench_modes;
    for (const char* name : {"runtime", "eps", "neardup"}) {
        auto* sub = bench->add_subcommand(name);
        sub->add_option("--spec", spec_path)->required();
        sub->add_option("--out", out_path)->required();
        sub->add_option("--seed", seed);
        bench_modes.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed())
            return run_detect(input, output, mu, trees, seed, chunk_level,
                              budget, correlation, symmetrize, no_center,
                              skip_header);
        if (dsfft->parsed())
            return run_detect_sfft(input, output, r, R, epsilon, solver,
                                   seed, no_center, skip_header);
        if (verify->parsed())
            return run_verify(input, mu, r, R, no_center, skip_header);
        if (samples->parsed())
            return run_samples(mu, r, R, p, K, C);
        if (gen->parsed())
            return run_gen(p, n, epsilon, family, seed, output, truth);
        if (bench->parsed()) {
            const char* names[] = {"runtime", "eps", "neardup"};
            for (std::size_t i = 0; i < 3; ++i)
                if (bench_modes[i]->parsed())
                    return run_bench(names[i], spec_path, out_path, seed,
                                     bench_modes[i]->count("--seed") > 0);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
