#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "scov/cov_tree.hpp"
#include "scov/linalg.hpp"
#include "scov/rng.hpp"
#include "scov/sparsity.hpp"

using namespace scov;

namespace {

CenteredColumns make_columns(std::size_t n,
                             std::vector<std::vector<double>> cols) {
    CenteredColumns out;
    out.n = n;
    out.p = cols.size();
    out.columns = std::move(cols);
    return out;
}

CenteredColumns random_columns(std::size_t n, std::size_t p,
                               std::uint64_t seed) {
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t t = 0; t < n; ++t)
            cols[k][t] = rng::gaussian(seed, k, t);
    return make_columns(n, std::move(cols));
}

/// n = p columns whose sample covariance is exactly 2I plus a perfect
/// matching of +-1 entries: each row has two large entries and zero
/// residual.
CenteredColumns matched_pairs_columns(std::size_t p) {
    // S = L L^T with L block-diagonal over 2x2 blocks; columns are
    // sqrt(n-1) times the rows of L
    const double a = std::sqrt(2.0);
    std::vector<std::vector<double>> cols(p, std::vector<double>(p, 0.0));
    const double s = std::sqrt(static_cast<double>(p) - 1.0);
    for (std::size_t b = 0; b + 1 < p; b += 2) {
        const double sign = (b / 2) % 2 == 0 ? 1.0 : -1.0;
        // block [[2, sign],[sign, 2]] = L L^T,
        // L = [[a, 0], [sign/a, sqrt(2 - 1/2)]]
        cols[b][b] = s * a;
        cols[b + 1][b] = s * sign / a;
        cols[b + 1][b + 1] = s * std::sqrt(2.0 - 0.5);
    }
    return make_columns(p, std::move(cols));
}

}  // namespace

TEST_CASE("group_test boundary is inclusive") {
    CHECK(group_test(3.0, 2.0).reject_null);        // threshold exactly 3
    CHECK(!group_test(0.0, 1.0).reject_null);
    CHECK(!group_test(0.7499, 1.0).reject_null);
    CHECK(group_test(0.75, 1.0).reject_null);
}

TEST_CASE("root of a p=4 tree is the weighted column sum") {
    const auto cols = random_columns(6, 4, 101);
    RandomForest forest(cols, 1, 7);
    REQUIRE(forest.p_padded() == 4);
    REQUIRE(forest.leaf_level() == 2);
    const auto root = forest.value(0, 0, 0);
    for (std::size_t t = 0; t < 6; ++t) {
        double want = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            want += forest.eta(0, j) * cols.column(j)[t];
        CHECK(root[t] == doctest::Approx(want));
    }
}

TEST_CASE("p=3 pads to four leaves with a zero leaf") {
    const auto cols = random_columns(5, 3, 103);
    RandomForest forest(cols, 2, 9);
    CHECK(forest.p_original() == 3);
    CHECK(forest.p_padded() == 4);
    for (double v : forest.value(1, 2, 3)) CHECK(v == 0.0);
    // the right internal node therefore equals leaf 2 alone
    const auto parent = forest.value(1, 1, 1);
    const auto leaf = forest.value(1, 2, 2);
    for (std::size_t t = 0; t < 5; ++t)
        CHECK(parent[t] == doctest::Approx(leaf[t]));
}

TEST_CASE("every internal node equals the sum of its children") {
    const auto cols = random_columns(7, 8, 107);
    RandomForest forest(cols, 3, 11);
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t h = 0; h < forest.leaf_level(); ++h)
            for (std::size_t i = 0; i < (std::size_t{1} << h); ++i) {
                const auto v = forest.value(l, h, i);
                std::vector<double> parent(v.begin(), v.end());
                const auto a = forest.value(l, h + 1, 2 * i);
                std::vector<double> left(a.begin(), a.end());
                const auto b = forest.value(l, h + 1, 2 * i + 1);
                for (std::size_t t = 0; t < 7; ++t) {
                    const double want = left[t] + b[t];
                    CHECK(std::abs(parent[t] - want) <=
                          1e-9 * std::max(1.0, std::abs(want)));
                }
            }
}

TEST_CASE("node_statistic vanishes on orthogonal queries") {
    // columns 0,1 live on coordinates 0..1, query on coordinates 2..3
    auto cols = make_columns(4, {{1, 2, 0, 0}, {3, -1, 0, 0}});
    RandomForest forest(cols, 5, 13);
    const std::vector<double> x{0, 0, 1, 2};
    CHECK(node_statistic(x, 0, 0, forest) == doctest::Approx(0.0));
}

TEST_CASE("leaf statistic concentrates on the squared inner product") {
    const auto cols = random_columns(12, 2, 109);
    RandomForest forest(cols, 10000, 15);
    const auto x = random_columns(12, 1, 211).column(0);
    const double base = inner_product(x, cols.column(1));
    const double got = forest.node_statistic(x, forest.leaf_level(), 1);
    CHECK(got == doctest::Approx(base * base).epsilon(0.05));
}

TEST_CASE("averaged statistic is unbiased for F(k, block)") {
    const auto cols = random_columns(8, 4, 113);
    const auto x = cols.column(0);
    // block I(1,0) = columns {0,1}
    const double f = std::pow(inner_product(x, cols.column(0)), 2) +
                     std::pow(inner_product(x, cols.column(1)), 2);
    double mean = 0.0;
    const std::size_t reps = 200;
    for (std::size_t s = 0; s < reps; ++s) {
        RandomForest forest(cols, 10, 1000 + s);
        mean += forest.node_statistic(x, 1, 0);
    }
    mean /= static_cast<double>(reps);
    CHECK(mean == doctest::Approx(f).epsilon(0.10));
}

TEST_CASE("find_row locates a dominant diagonal") {
    // S = I after scaling; row k should contain k almost always
    const std::size_t p = 16;
    std::vector<std::vector<double>> raw(p, std::vector<double>(p, 0.0));
    const double s = std::sqrt(static_cast<double>(p) - 1.0);
    for (std::size_t j = 0; j < p; ++j) raw[j][j] = s;
    const auto cols = make_columns(p, std::move(raw));
    const std::size_t m = tree_count(p, 1);
    std::size_t hits = 0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        RandomForest forest(cols, m, 5000 + trial);
        QueryStats stats;
        const auto found = find_row(cols.column(3), forest, 0.9, stats);
        if (std::find(found.begin(), found.end(), 3) != found.end()) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("zero query visits almost nothing") {
    const auto cols = random_columns(6, 8, 127);
    RandomForest forest(cols, 4, 17);
    const std::vector<double> zero(6, 0.0);
    QueryStats stats;
    CHECK(find_row(zero, forest, 0.5, stats).empty());
    CHECK(stats.visited_nodes <= 3);
}

TEST_CASE("find_row covers a sparse row with the analyzed tree count") {
    const std::size_t p = 64;
    const auto cols = matched_pairs_columns(p);
    // ground truth for row 0: diagonal 2 and matched entry +-1
    const std::size_t m = tree_count(p, 2);
    std::size_t ok = 0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        RandomForest forest(cols, m, 9000 + trial);
        QueryStats stats;
        const auto found = find_row(cols.column(0), forest, 1.0, stats);
        const bool has0 =
            std::find(found.begin(), found.end(), 0) != found.end();
        const bool has1 =
            std::find(found.begin(), found.end(), 1) != found.end();
        if (has0 && has1) ++ok;
    }
    CHECK(ok >= 90);
}

TEST_CASE("sparse_cov_tree on orthogonal data returns the diagonal") {
    const std::size_t p = 4;
    std::vector<std::vector<double>> raw(p, std::vector<double>(p, 0.0));
    const double s = std::sqrt(3.0);
    for (std::size_t j = 0; j < p; ++j) raw[j][j] = s;
    const auto cols = make_columns(p, std::move(raw));
    const std::size_t m = tree_count(p, 1);
    std::size_t exact = 0;
    for (std::size_t seed = 0; seed < 20; ++seed) {
        const auto res = sparse_cov_tree(cols, m, 0.5, seed);
        SparseEntrySet want;
        for (std::size_t j = 0; j < p; ++j)
            want.entries.push_back({j, j, covariance_entry(cols, j, j)});
        want.sort_and_dedup();
        if (res.entries == want) ++exact;
    }
    CHECK(exact >= 18);
}

TEST_CASE("returned values match the dense oracle exactly") {
    const auto cols = random_columns(10, 6, 131);
    const auto S = dense_covariance(cols);
    const auto res = sparse_cov_tree(cols, 30, 0.4, 77);
    for (const auto& e : res.entries.entries)
        CHECK(e.value == S[e.i * 6 + e.j]);
}

TEST_CASE("chunked construction reproduces the monolithic result") {
    const auto cols = random_columns(9, 16, 137);
    CovTreeOptions mono;
    CovTreeOptions chunked;
    chunked.chunk_level = 2;
    const auto a = sparse_cov_tree(cols, 6, 0.5, 21, mono);
    const auto b = sparse_cov_tree(cols, 6, 0.5, 21, chunked);
    CHECK(a.entries == b.entries);
    CHECK(a.stats.visited_nodes == b.stats.visited_nodes);
    CHECK(a.stats.tests_performed == b.stats.tests_performed);
    CHECK(a.stats.inner_products == b.stats.inner_products);
}

TEST_CASE("chunked forest stores the same node values") {
    const auto cols = random_columns(5, 8, 139);
    RandomForest full(cols, 3, 23, 0);
    RandomForest part(cols, 3, 23, 2);
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t h = 0; h <= full.leaf_level(); ++h)
            for (std::size_t i = 0; i < (std::size_t{1} << h); ++i) {
                const auto a = full.value(l, h, i);
                std::vector<double> va(a.begin(), a.end());
                const auto b = part.value(l, h, i);
                for (std::size_t t = 0; t < 5; ++t)
                    CHECK(va[t] == b[t]);
            }
}

TEST_CASE("appended zero columns never change the detected set") {
    const auto base = random_columns(8, 5, 149);
    auto padded_cols = base.columns;
    padded_cols.resize(8, std::vector<double>(8, 0.0));
    const auto padded = make_columns(8, std::move(padded_cols));
    const auto a = sparse_cov_tree(base, 8, 0.5, 31);
    const auto b = sparse_cov_tree(padded, 8, 0.5, 31);
    SparseEntrySet restricted;
    for (const auto& e : b.entries.entries)
        if (e.i < 5 && e.j < 5) restricted.entries.push_back(e);
    restricted.sort_and_dedup();
    CHECK(a.entries == restricted);
}

TEST_CASE("budget exhaustion is flagged, not thrown") {
    const auto cols = random_columns(8, 16, 151);
    CovTreeOptions opts;
    opts.budget = 10;
    const auto res = sparse_cov_tree(cols, 4, 0.01, 41, opts);
    CHECK(res.stats.budget_exhausted);
    CHECK(res.stats.budget == 10);
}

TEST_CASE("identical inputs give identical outputs and counters") {
    const auto cols = random_columns(7, 12, 157);
    const auto a = sparse_cov_tree(cols, 9, 0.3, 55);
    const auto b = sparse_cov_tree(cols, 9, 0.3, 55);
    CHECK(a.entries == b.entries);
    CHECK(a.stats.visited_nodes == b.stats.visited_nodes);
    CHECK(a.stats.inner_products == b.stats.inner_products);
}

TEST_CASE("memory cap rejects oversized monolithic forests") {
    const auto cols = random_columns(4, 8, 163);
    CHECK_THROWS_AS(RandomForest(cols, 2, 1, 0, 10), std::runtime_error);
}

TEST_CASE("visited-node bound check") {
    QueryStats stats;
    stats.visited_nodes = 100;
    CHECK(visited_node_bound_check(stats, 64, 2));
    stats.visited_nodes = 10'000'000;
    CHECK(!visited_node_bound_check(stats, 64, 2));
}
