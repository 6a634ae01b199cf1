#include "scov/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scov/cov_tree.hpp"
#include "scov/rng.hpp"
#include "scov/sfft.hpp"
#include "scov/sparsity.hpp"
#include "scov/synthgen.hpp"

namespace scov::bench {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
        s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    // "[a, b, c]" -> {"a","b","c"}
    std::string body = trim(s);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw std::invalid_argument("spec: expected a [list]: " + s);
    body = body.substr(1, body.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(unquote(item));
    }
    return out;
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("spec: bad number: " + s);
    }
}

std::size_t to_size(const std::string& s) {
    const double v = to_double(s);
    if (v < 0 || v != std::floor(v))
        throw std::invalid_argument("spec: bad integer: " + s);
    return static_cast<std::size_t>(v);
}

double timed_ms(const std::chrono::steady_clock::time_point& t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double, std::milli>(dt).count();
}

std::size_t resolve_n(const ExperimentSpec& spec, std::size_t p) {
    if (spec.n_rule == "fixed") {
        if (spec.n_fixed < 2)
            throw std::invalid_argument("spec: fixed n_rule needs n_fixed");
        return spec.n_fixed;
    }
    if (spec.n_rule == "p-log-p")
        return static_cast<std::size_t>(
            std::floor(static_cast<double>(p) *
                       std::log(static_cast<double>(p))));
    throw std::invalid_argument("spec: unknown n_rule: " + spec.n_rule);
}

struct Oracle {
    std::set<std::pair<std::size_t, std::size_t>> large;
};

double recall_against(const SparseEntrySet& found, const Oracle& oracle) {
    if (oracle.large.empty()) return 100.0;
    std::size_t hit = 0;
    for (const auto& [i, j] : oracle.large)
        if (found.contains(i, j)) ++hit;
    return 100.0 * static_cast<double>(hit) /
           static_cast<double>(oracle.large.size());
}

std::int64_t count_false(const SparseEntrySet& found, const Oracle& oracle) {
    std::int64_t out = 0;
    for (const auto& e : found.entries)
        if (!oracle.large.count({e.i, e.j})) ++out;
    return out;
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "family") {
            spec.family = unquote(val);
        } else if (key == "p_list") {
            spec.p_list.clear();
            for (const auto& s : split_list(val))
                spec.p_list.push_back(to_size(s));
        } else if (key == "n_rule") {
            spec.n_rule = unquote(val);
        } else if (key == "n_fixed" || key == "n") {
            spec.n_fixed = to_size(val);
        } else if (key == "trees" || key == "m") {
            spec.trees = to_size(val);
        } else if (key == "mu") {
            spec.mu = to_double(val);
        } else if (key == "eps_list") {
            spec.eps_list.clear();
            for (const auto& s : split_list(val))
                spec.eps_list.push_back(to_double(s));
        } else if (key == "m_list") {
            spec.m_list.clear();
            for (const auto& s : split_list(val))
                spec.m_list.push_back(to_size(s));
        } else if (key == "repetitions") {
            spec.repetitions = to_size(val);
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(to_size(val));
        } else if (key == "methods") {
            spec.methods.clear();
            for (const auto& s : split_list(val)) spec.methods.push_back(s);
        } else if (key == "queries") {
            spec.queries = to_size(val);
        } else if (key == "query_eps") {
            spec.query_eps = to_double(val);
        } else if (key == "query_mu") {
            spec.query_mu = to_double(val);
        } else if (key == "chunk_level") {
            spec.chunk_level = to_size(val);
        } else {
            throw std::invalid_argument("spec: unknown key: " + key);
        }
    }
    if (spec.repetitions < 1)
        throw std::invalid_argument("spec: repetitions >= 1");
    if (spec.p_list.empty())
        throw std::invalid_argument("spec: p_list must be nonempty");
    return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    return parse_spec(in);
}

std::vector<ResultRow> run_runtime_experiment(const ExperimentSpec& spec) {
    std::vector<ResultRow> rows;
    for (std::size_t p : spec.p_list) {
        for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
            const std::size_t n = resolve_n(spec, p);
            const auto model = gen_population_cov(
                p, rng::hash_key(spec.seed, p, rep, 11));
            const auto data = sample_gaussian(
                model, n, rng::hash_key(spec.seed, p, rep, 12));
            const auto cols = center_columns(data);

            const auto t_dense = std::chrono::steady_clock::now();
            const auto S = dense_covariance(cols);
            const double dense_ms = timed_ms(t_dense);
            Oracle oracle{large_entries(S, p, spec.mu)};

            for (const std::string& method : spec.methods) {
                ResultRow row;
                row.method = method;
                row.p = p;
                row.n = n;
                row.rep = rep;
                try {
                    if (method == "dense") {
                        row.wall_ms = dense_ms;
                        row.inner_products =
                            static_cast<std::uint64_t>(p) * (p + 1) / 2;
                        row.recall_pct = 100.0;
                        row.false_entries = 0;
                    } else if (method == "tree") {
                        row.m = spec.trees;
                        CovTreeOptions opts;
                        opts.chunk_level = spec.chunk_level;
                        const auto t0 = std::chrono::steady_clock::now();
                        const auto res = sparse_cov_tree(
                            cols, spec.trees, spec.mu,
                            rng::hash_key(spec.seed, p, rep, 13), opts);
                        row.wall_ms = timed_ms(t0);
                        row.visited_nodes = res.stats.visited_nodes;
                        row.inner_products = res.stats.inner_products;
                        row.recall_pct = recall_against(res.entries, oracle);
                        row.false_entries = count_false(res.entries, oracle);
                    } else if (method == "sfft-exact") {
                        const ExactSpectralSolver solver;
                        const auto t0 = std::chrono::steady_clock::now();
                        const auto res = sfft_cov_estimation(
                            cols, model.r_row + 1, spec.mu / 4.0,
                            spec.mu / 8.0, solver,
                            rng::hash_key(spec.seed, p, rep, 14));
                        row.wall_ms = timed_ms(t0);
                        row.inner_products =
                            res.report.u_entries_read + p +
                            res.entries.entries.size();
                        row.recall_pct = recall_against(res.entries, oracle);
                        row.false_entries = count_false(res.entries, oracle);
                    } else {
                        throw std::invalid_argument("unknown method: " +
                                                    method);
                    }
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<ResultRow> run_eps_sweep(const ExperimentSpec& spec) {
    std::vector<ResultRow> rows;
    const std::size_t p = spec.p_list.front();
    const std::size_t n = resolve_n(spec, p);
    for (double eps : spec.eps_list) {
        for (std::size_t m : spec.m_list) {
            for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
                ResultRow row;
                row.method = "tree";
                row.p = p;
                row.n = n;
                row.m = m;
                row.eps = eps;
                row.rep = rep;
                try {
                    // model/sample/forest seeds depend on rep only, so
                    // every eps and m cell sees common random numbers
                    const auto model = gen_population_cov_eps(
                        p, eps, rng::hash_key(spec.seed, p, rep, 21));
                    const auto data = sample_gaussian(
                        model, n, rng::hash_key(spec.seed, p, rep, 22));
                    const auto cols = center_columns(data);
                    CovTreeOptions opts;
                    opts.chunk_level = spec.chunk_level;
                    const auto t0 = std::chrono::steady_clock::now();
                    const auto res = sparse_cov_tree(
                        cols, m, spec.mu,
                        rng::hash_key(spec.seed, p, rep, 23), opts);
                    row.wall_ms = timed_ms(t0);
                    row.visited_nodes = res.stats.visited_nodes;
                    row.inner_products = res.stats.inner_products;
                    std::size_t hit = 0;
                    for (const auto& [i, j] : model.support)
                        if (res.entries.contains(i, j)) ++hit;
                    row.misdetect_pct =
                        100.0 *
                        (1.0 - static_cast<double>(hit) /
                                   static_cast<double>(model.support.size()));
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<ResultRow> run_near_dup(const ExperimentSpec& spec) {
    std::vector<ResultRow> rows;
    for (std::size_t p : spec.p_list) {
        ResultRow general, neardup;
        general.method = "general-query";
        neardup.method = "neardup-query";
        const std::size_t n =
            spec.n_rule == "fixed" ? spec.n_fixed : resolve_n(spec, p);
        general.p = neardup.p = p;
        general.n = neardup.n = n;
        general.m = neardup.m = spec.trees;
        neardup.eps = spec.query_eps;
        try {
            const auto refset = gen_unit_sphere_set(
                p, n, rng::hash_key(spec.seed, p, 0, 31));
            // cosine semantics: no centering, columns scaled so the
            // normalized inner product equals the cosine
            const auto cols = correlation_normalize(columns_view(refset));
            RandomForest forest(cols, spec.trees,
                                rng::hash_key(spec.seed, p, 0, 32),
                                spec.chunk_level);
            const double scale =
                std::sqrt(static_cast<double>(n) - 1.0);

            QueryStats gstats, dstats;
            std::size_t ghits = 0, detected = 0;
            const auto t0 = std::chrono::steady_clock::now();
            for (std::size_t q = 0; q < spec.queries; ++q) {
                std::vector<double> g(n);
                for (std::size_t t = 0; t < n; ++t)
                    g[t] = rng::gaussian(spec.seed, 33 + p, q, t);
                double gn = 0.0;
                for (double v : g) gn += v * v;
                gn = std::sqrt(gn);
                for (double& v : g) v *= scale / gn;
                QueryStats qs;
                if (!find_row(g, forest, spec.query_mu, qs).empty()) ++ghits;
                gstats.merge(qs);

                const std::size_t target = q % p;
                auto u = gen_near_dup_query(
                    refset, target, spec.query_eps,
                    rng::hash_key(spec.seed, p, q, 34));
                for (double& v : u) v *= scale;
                QueryStats qd;
                const auto found =
                    find_row(u, forest, spec.query_mu, qd);
                dstats.merge(qd);
                if (std::find(found.begin(), found.end(), target) !=
                    found.end())
                    ++detected;
            }
            const double total_ms = timed_ms(t0);
            const double nq = static_cast<double>(spec.queries);
            general.wall_ms = neardup.wall_ms = total_ms / (2.0 * nq);
            general.visited_nodes = static_cast<std::uint64_t>(
                std::llround(static_cast<double>(gstats.visited_nodes) / nq));
            neardup.visited_nodes = static_cast<std::uint64_t>(
                std::llround(static_cast<double>(dstats.visited_nodes) / nq));
            general.inner_products = gstats.inner_products;
            neardup.inner_products = dstats.inner_products;
            general.false_entries = static_cast<std::int64_t>(ghits);
            neardup.recall_pct = 100.0 * static_cast<double>(detected) / nq;
        } catch (const std::exception& e) {
            general.error = e.what();
            neardup.error = e.what();
        }
        rows.push_back(std::move(general));
        rows.push_back(std::move(neardup));
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "# sparse-cov-bench v1\n";
    out << "method,p,n,m,eps,rep,wall_ms,visited_nodes,inner_products,"
           "recall_pct,misdetect_pct,false_entries,error\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.p << ',' << r.n << ',' << r.m << ','
            << r.eps << ',' << r.rep << ',' << r.wall_ms << ','
            << r.visited_nodes << ',' << r.inner_products << ','
            << r.recall_pct << ',' << r.misdetect_pct << ','
            << r.false_entries << ',' << r.error << '\n';
    }
}

bool any_errors(const std::vector<ResultRow>& rows) {
    for (const auto& r : rows)
        if (!r.error.empty()) return true;
    return false;
}

}  // namespace scov::bench
