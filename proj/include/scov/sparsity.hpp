#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scov {

/// (r, mu, R, q) approximate-sparsity parameters. q is fixed to 2.
struct SparsityProfile {
    std::size_t r = 0;  // max large entries per row
    double mu = 0.0;    // large-entry threshold, > 0
    double R = 0.0;     // L2 radius of the residual per row
    int q = 2;

    /// The detection guarantees need R < mu/2.
    bool guarantee_holds() const { return R < mu / 2.0; }
};

struct ProfileReport {
    bool is_r_mu_sparse = true;
    bool is_full_profile = true;
    std::size_t worst_row = 0;
    double worst_residual = 0.0;
};

enum class BindingTerm { gap_over_sqrt_p, quarter_gap, k_squared };

struct SampleSizeReport {
    double t = 0.0;
    std::size_t n_required = 0;
    double K = 0.0;
    double C = 0.0;
    BindingTerm binding_term = BindingTerm::gap_over_sqrt_p;
};

std::string to_string(BindingTerm term);

/// Indices j with |row_j| >= mu (inclusive), 0-based.
std::vector<std::size_t> large_entries_row(std::span<const double> row,
                                           double mu);

/// All (k, j) with |A_kj| >= mu for a row-major p x p matrix.
std::set<std::pair<std::size_t, std::size_t>> large_entries(
    std::span<const double> matrix, std::size_t p, double mu);

/// Zero every entry below mu in absolute value.
std::vector<double> hard_threshold(std::span<const double> row, double mu);

ProfileReport verify_profile(std::span<const double> matrix, std::size_t p,
                             const SparsityProfile& profile);

/// Sample-size bound: t = min{(mu-2R)/(2 sqrt(p-r) + 1), (mu-R)/4, K^2},
/// n = ceil(C K^4 / t^2 * ln(54 p^2)) + 1. Natural logs throughout.
SampleSizeReport required_samples(const SparsityProfile& profile,
                                  std::size_t p, double K, double C = 8.0);

/// ceil(log_3(3p)) independent solver runs per row.
std::size_t multi_run_count(std::size_t p);

/// ceil(64 ln(2 r p L^3)) trees, L = log2(p) + 1.
std::size_t tree_count(std::size_t p, std::size_t r);

}  // namespace scov
