#include "scov/cov_tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "scov/rng.hpp"

namespace scov {

namespace {

double dot_sq_sum(std::span<const double> x, const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += x[t] * v[t];
    acc /= static_cast<double>(n - 1);
    return acc * acc;
}

}  // namespace

GroupTestResult group_test(double sigma_hat_sq, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("group_test: mu must be > 0");
    return {sigma_hat_sq, sigma_hat_sq >= 0.75 * mu * mu};
}

RandomForest::RandomForest(const CenteredColumns& cols, std::size_t m,
                           std::uint64_t seed, std::size_t chunk_level,
                           std::size_t memory_cap_elements)
    : cols_(&cols), m_(m), n_(cols.n), p_orig_(cols.p), seed_(seed) {
    if (m_ < 1) throw std::invalid_argument("RandomForest: need m >= 1");
    if (p_orig_ < 1) throw std::invalid_argument("RandomForest: need p >= 1");
    p_pad_ = std::bit_ceil(p_orig_);
    L_ = static_cast<std::size_t>(std::bit_width(p_pad_) - 1);
    if (chunk_level > L_)
        throw std::invalid_argument("RandomForest: chunk_level exceeds L");
    h0_ = chunk_level;
    // chunking at the leaf level saves nothing; fall back to full storage
    resident_top_ = (h0_ == 0 || h0_ == L_) ? L_ : h0_;

    std::size_t estimate = n_ * m_ * (((std::size_t{2} << resident_top_)) - 1);
    if (resident_top_ < L_) {
        const std::size_t w = p_pad_ >> h0_;
        estimate += n_ * m_ * (2 * w - 2);
    }
    if (estimate > memory_cap_elements)
        throw std::runtime_error(
            "RandomForest: estimated resident storage (" +
            std::to_string(estimate) +
            " elements) exceeds the cap; increase chunk_level");

    levels_.resize(resident_top_ + 1);
    for (std::size_t h = 0; h <= resident_top_; ++h)
        levels_[h].assign(m_ * (std::size_t{1} << h) * n_, 0.0);

    if (resident_top_ == L_) {
        auto& leaves = levels_[L_];
        for (std::size_t l = 0; l < m_; ++l)
            for (std::size_t j = 0; j < p_orig_; ++j) {
                const double e = eta(l, j);
                const auto col = cols_->column(j);
                double* dst = leaves.data() + ((l << L_) + j) * n_;
                for (std::size_t t = 0; t < n_; ++t) dst[t] = e * col[t];
            }
    } else {
        // one subtree at a time; keep only its root vector
        const std::size_t chunks = std::size_t{1} << h0_;
        for (std::size_t c = 0; c < chunks; ++c) {
            auto ch = build_chunk(c);
            const std::size_t wtop = 2;  // children of the chunk root
            for (std::size_t l = 0; l < m_; ++l) {
                const double* a = ch->levels[0].data() + (l * wtop + 0) * n_;
                const double* b = ch->levels[0].data() + (l * wtop + 1) * n_;
                double* dst =
                    levels_[h0_].data() + ((l << h0_) + c) * n_;
                for (std::size_t t = 0; t < n_; ++t) dst[t] = a[t] + b[t];
            }
        }
    }
    for (std::size_t h = resident_top_; h-- > 0;) {
        const std::size_t width = std::size_t{1} << h;
        for (std::size_t l = 0; l < m_; ++l)
            for (std::size_t i = 0; i < width; ++i) {
                const double* a =
                    levels_[h + 1].data() + ((l * 2 * width) + 2 * i) * n_;
                const double* b = a + n_;
                double* dst = levels_[h].data() + ((l * width) + i) * n_;
                for (std::size_t t = 0; t < n_; ++t) dst[t] = a[t] + b[t];
            }
    }
}

double RandomForest::eta(std::size_t l, std::size_t j) const {
    return rng::gaussian(seed_, l, j);
}

std::span<const double> RandomForest::resident_value(std::size_t l,
                                                     std::size_t h,
                                                     std::size_t i) const {
    return {levels_[h].data() + ((l << h) + i) * n_, n_};
}

std::shared_ptr<const RandomForest::Chunk> RandomForest::build_chunk(
    std::size_t index) const {
    const std::size_t w = p_pad_ >> h0_;  // leaves per chunk
    auto ch = std::make_shared<Chunk>();
    ch->index = index;
    ch->levels.resize(L_ - h0_);
    for (std::size_t h = L_; h > h0_; --h) {
        const std::size_t width = std::size_t{1} << (h - h0_);
        auto& lvl = ch->levels[h - h0_ - 1];
        lvl.assign(m_ * width * n_, 0.0);
        if (h == L_) {
            for (std::size_t l = 0; l < m_; ++l)
                for (std::size_t local = 0; local < w; ++local) {
                    const std::size_t j = index * w + local;
                    if (j >= p_orig_) continue;
                    const double e = eta(l, j);
                    const auto col = cols_->column(j);
                    double* dst = lvl.data() + (l * width + local) * n_;
                    for (std::size_t t = 0; t < n_; ++t) dst[t] = e * col[t];
                }
        } else {
            const auto& below = ch->levels[h - h0_];
            for (std::size_t l = 0; l < m_; ++l)
                for (std::size_t local = 0; local < width; ++local) {
                    const double* a =
                        below.data() + (l * 2 * width + 2 * local) * n_;
                    const double* b = a + n_;
                    double* dst = lvl.data() + (l * width + local) * n_;
                    for (std::size_t t = 0; t < n_; ++t) dst[t] = a[t] + b[t];
                }
        }
    }
    return ch;
}

std::shared_ptr<const RandomForest::Chunk> RandomForest::chunk(
    std::size_t index) const {
    std::lock_guard lock(chunk_mutex_);
    if (!chunk_cache_ || chunk_cache_->index != index)
        chunk_cache_ = build_chunk(index);
    return chunk_cache_;
}

std::span<const double> RandomForest::value(std::size_t l, std::size_t h,
                                            std::size_t i) const {
    if (h > L_ || i >= (std::size_t{1} << h) || l >= m_)
        throw std::out_of_range("RandomForest::value: no such node");
    if (h <= resident_top_) return resident_value(l, h, i);
    const std::size_t c = i >> (h - h0_);
    const std::size_t width = std::size_t{1} << (h - h0_);
    const std::size_t local = i - c * width;
    auto ch = chunk(c);
    // span into the cache slot; valid until a different chunk is requested
    return {ch->levels[h - h0_ - 1].data() + (l * width + local) * n_, n_};
}

double RandomForest::node_statistic(std::span<const double> x, std::size_t h,
                                    std::size_t i) const {
    if (x.size() != n_)
        throw std::invalid_argument("node_statistic: vector length mismatch");
    double acc = 0.0;
    if (h <= resident_top_) {
        for (std::size_t l = 0; l < m_; ++l)
            acc += dot_sq_sum(x, resident_value(l, h, i).data(), n_);
    } else {
        const std::size_t c = i >> (h - h0_);
        const std::size_t width = std::size_t{1} << (h - h0_);
        const std::size_t local = i - c * width;
        auto ch = chunk(c);
        const auto& lvl = ch->levels[h - h0_ - 1];
        for (std::size_t l = 0; l < m_; ++l)
            acc += dot_sq_sum(x, lvl.data() + (l * width + local) * n_, n_);
    }
    return acc / static_cast<double>(m_);
}

double node_statistic(std::span<const double> x, std::size_t h, std::size_t i,
                      const RandomForest& forest) {
    return forest.node_statistic(x, h, i);
}

namespace {

struct Frontier {
    std::size_t row;
    std::size_t node;  // index at level h0
};

// Iterative group-test descent from (h_start, i_start). When
// frontier_level is hit, children that pass the test are handed to
// `pending` instead of being explored (two-phase chunked driver).
// Left children are explored before right children.
void descend(std::span<const double> x, const RandomForest& forest, double mu,
             std::size_t h_start, std::size_t i_start, QueryStats& stats,
             std::vector<std::size_t>& out, std::size_t frontier_level,
             std::vector<std::vector<std::size_t>>* pending,
             std::size_t row_for_pending) {
    const std::size_t L = forest.leaf_level();
    const std::size_t m = forest.tree_count();
    const double threshold = 0.75 * mu * mu;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{h_start, i_start}};
    while (!stack.empty()) {
        const auto [h, i] = stack.back();
        stack.pop_back();
        ++stats.visited_nodes;
        if (h == L) {
            if (i < forest.p_original()) out.push_back(i);
            continue;
        }
        if (stats.budget != 0 && stats.inner_products + 2 * m > stats.budget) {
            stats.budget_exhausted = true;
            break;
        }
        const double a = forest.node_statistic(x, h + 1, 2 * i);
        const double b = forest.node_statistic(x, h + 1, 2 * i + 1);
        stats.tests_performed += 2;
        stats.inner_products += 2 * m;
        const bool go_left = a >= threshold;
        const bool go_right = b >= threshold;
        if (h + 1 == frontier_level) {
            if (go_left) (*pending)[2 * i].push_back(row_for_pending);
            if (go_right) (*pending)[2 * i + 1].push_back(row_for_pending);
            continue;
        }
        // push right first so the left child is popped first
        if (go_right) stack.emplace_back(h + 1, 2 * i + 1);
        if (go_left) stack.emplace_back(h + 1, 2 * i);
    }
}

constexpr std::size_t kNoFrontier = static_cast<std::size_t>(-1);

}  // namespace

std::vector<std::size_t> find_row(std::span<const double> x,
                                  const RandomForest& forest, double mu,
                                  QueryStats& stats) {
    if (!(mu > 0.0)) throw std::invalid_argument("find_row: mu must be > 0");
    std::vector<std::size_t> out;
    descend(x, forest, mu, 0, 0, stats, out, kNoFrontier, nullptr, 0);
    return out;
}

CovTreeResult sparse_cov_tree(const CenteredColumns& cols, std::size_t m,
                              double mu, std::uint64_t seed,
                              const CovTreeOptions& options) {
    if (!(mu > 0.0))
        throw std::invalid_argument("sparse_cov_tree: mu must be > 0");
    RandomForest forest(cols, m, seed, options.chunk_level,
                        options.memory_cap_elements);
    CovTreeResult result;
    result.stats.budget = options.budget;

    const std::size_t p = cols.p;
    std::vector<std::vector<std::size_t>> rows(p);
    const bool chunked = forest.chunk_level() > 0 &&
                         forest.chunk_level() < forest.leaf_level();
    if (!chunked) {
        for (std::size_t k = 0; k < p; ++k)
            descend(cols.column(k), forest, mu, 0, 0, result.stats, rows[k],
                    kNoFrontier, nullptr, 0);
    } else {
        // chunk-major two-phase traversal: first walk every row down to
        // the resident levels, then finish all rows of one subtree
        // before rebuilding the next. Visits the same node set as the
        // plain row-major descent.
        const std::size_t h0 = forest.chunk_level();
        std::vector<std::vector<std::size_t>> pending(std::size_t{1} << h0);
        for (std::size_t k = 0; k < p; ++k)
            descend(cols.column(k), forest, mu, 0, 0, result.stats, rows[k],
                    h0, &pending, k);
        for (std::size_t c = 0; c < pending.size(); ++c)
            for (std::size_t k : pending[c])
                descend(cols.column(k), forest, mu, h0, c, result.stats,
                        rows[k], kNoFrontier, nullptr, 0);
    }

    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t j : rows[k]) {
            result.entries.entries.push_back(
                {k, j, covariance_entry(cols, k, j)});
            if (options.symmetrize)
                result.entries.entries.push_back(
                    {j, k, covariance_entry(cols, j, k)});
        }
    result.entries.sort_and_dedup();
    return result;
}

bool visited_node_bound_check(const QueryStats& stats, std::size_t p,
                              std::size_t r, double c_emp) {
    const double log2p = std::log2(static_cast<double>(p));
    const double bound = c_emp * static_cast<double>(r) *
                         static_cast<double>(p) * log2p * log2p;
    return static_cast<double>(stats.visited_nodes) <= bound;
}

}  // namespace scov
