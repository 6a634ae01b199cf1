#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "scov/linalg.hpp"

namespace scov {

struct QueryStats {
    std::uint64_t visited_nodes = 0;
    std::uint64_t tests_performed = 0;
    std::uint64_t inner_products = 0;  // budget unit: one n-length product
    std::uint64_t budget = 0;          // 0 = disabled
    bool budget_exhausted = false;

    void merge(const QueryStats& other) {
        visited_nodes += other.visited_nodes;
        tests_performed += other.tests_performed;
        inner_products += other.inner_products;
        budget_exhausted = budget_exhausted || other.budget_exhausted;
    }
};

struct GroupTestResult {
    double sigma_hat_sq = 0.0;
    bool reject_null = false;  // H1: the block contains a large entry
};

/// Decide H1 iff sigma_hat_sq >= 3 mu^2 / 4 (inclusive).
GroupTestResult group_test(double sigma_hat_sq, double mu);

/// m random binary trees over the columns; node (h,i) of tree l stores
/// the n-vector sum_{j in I(h,i)} eta_{lj} x_j with i.i.d. N(0,1)
/// weights drawn from a counter-based stream keyed by (seed, l, j).
///
/// Columns are zero-padded to p = 2^L leaves. With chunk_level h0 > 0
/// only levels h <= h0 stay resident; the subtree below each level-h0
/// node is rebuilt on demand (identical values, counter-based RNG) and
/// cached one chunk at a time, cutting memory by a factor of 2^h0.
class RandomForest {
public:
    RandomForest(const CenteredColumns& cols, std::size_t m,
                 std::uint64_t seed, std::size_t chunk_level = 0,
                 std::size_t memory_cap_elements = kDefaultMemoryCap);

    static constexpr std::size_t kDefaultMemoryCap = 400'000'000;

    std::size_t tree_count() const { return m_; }
    std::size_t sample_count() const { return n_; }
    std::size_t p_original() const { return p_orig_; }
    std::size_t p_padded() const { return p_pad_; }
    std::size_t leaf_level() const { return L_; }
    std::size_t chunk_level() const { return h0_; }
    std::uint64_t seed() const { return seed_; }

    double eta(std::size_t l, std::size_t j) const;

    /// Val(T_l(h, i)). Fetches the containing chunk when h lies below
    /// the resident levels.
    std::span<const double> value(std::size_t l, std::size_t h,
                                  std::size_t i) const;

    /// sigma_hat^2 = (1/m) sum_l <x, Val(T_l(h,i))>^2.
    double node_statistic(std::span<const double> x, std::size_t h,
                          std::size_t i) const;

    struct Chunk {
        std::size_t index = 0;
        // levels[h - h0 - 1]: values of all trees at level h inside the
        // subtree of node (h0, index), laid out ((l * width) + local)*n
        std::vector<std::vector<double>> levels;
    };

    std::shared_ptr<const Chunk> chunk(std::size_t index) const;

private:
    std::span<const double> resident_value(std::size_t l, std::size_t h,
                                           std::size_t i) const;
    std::shared_ptr<const Chunk> build_chunk(std::size_t index) const;

    const CenteredColumns* cols_;
    std::size_t m_, n_, p_orig_, p_pad_, L_, h0_, resident_top_;
    std::uint64_t seed_;
    // levels_[h] for h <= resident_top_, layout ((l * 2^h) + i) * n
    std::vector<std::vector<double>> levels_;
    mutable std::mutex chunk_mutex_;
    mutable std::shared_ptr<const Chunk> chunk_cache_;
};

/// Same statistic through the free-function surface.
double node_statistic(std::span<const double> x, std::size_t h, std::size_t i,
                      const RandomForest& forest);

/// Recursive group-test descent for one row; returns 0-based column
/// indices (padded leaves dropped). Left subtree explored first.
std::vector<std::size_t> find_row(std::span<const double> x,
                                  const RandomForest& forest, double mu,
                                  QueryStats& stats);

struct CovTreeOptions {
    std::size_t chunk_level = 0;
    std::uint64_t budget = 0;  // inner products; 0 = disabled
    bool symmetrize = false;
    std::size_t memory_cap_elements = RandomForest::kDefaultMemoryCap;
};

struct CovTreeResult {
    SparseEntrySet entries;
    QueryStats stats;
};

/// The full driver: build the forest once, search every row, then
/// evaluate the discovered entries exactly.
CovTreeResult sparse_cov_tree(const CenteredColumns& cols, std::size_t m,
                              double mu, std::uint64_t seed,
                              const CovTreeOptions& options = {});

/// Visited-node analogue of the runtime bound: true iff
/// visited_nodes <= C_emp * r * p * (log2 p)^2.
bool visited_node_bound_check(const QueryStats& stats, std::size_t p,
                              std::size_t r, double c_emp = 16.0);

}  // namespace scov
