#include "scov/sparsity.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace scov {

std::string to_string(BindingTerm term) {
    switch (term) {
        case BindingTerm::gap_over_sqrt_p: return "(mu-2R)/(2*sqrt(p-r)+1)";
        case BindingTerm::quarter_gap: return "(mu-R)/4";
        case BindingTerm::k_squared: return "K^2";
    }
    return "?";
}

std::vector<std::size_t> large_entries_row(std::span<const double> row,
                                           double mu) {
    if (!(mu > 0.0))
        throw std::invalid_argument("large_entries_row: mu must be positive");
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (std::abs(row[j]) >= mu) out.push_back(j);
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> large_entries(
    std::span<const double> matrix, std::size_t p, double mu) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t j : large_entries_row(matrix.subspan(k * p, p), mu))
            out.emplace(k, j);
    return out;
}

std::vector<double> hard_threshold(std::span<const double> row, double mu) {
    std::vector<double> out(row.begin(), row.end());
    for (double& v : out)
        if (std::abs(v) < mu) v = 0.0;
    return out;
}

ProfileReport verify_profile(std::span<const double> matrix, std::size_t p,
                             const SparsityProfile& profile) {
    if (profile.q != 2)
        throw std::invalid_argument("verify_profile: only q = 2 is supported");
    ProfileReport rep;
    for (std::size_t k = 0; k < p; ++k) {
        const auto row = matrix.subspan(k * p, p);
        std::size_t count = 0;
        double residual_sq = 0.0;
        for (double v : row) {
            if (std::abs(v) >= profile.mu)
                ++count;
            else
                residual_sq += v * v;
        }
        const double residual = std::sqrt(residual_sq);
        const bool row_ok =
            count <= profile.r && residual <= profile.R;
        if (count > profile.r && rep.is_r_mu_sparse) {
            rep.is_r_mu_sparse = false;
            rep.worst_row = k;
        }
        if (!row_ok && rep.is_full_profile) rep.is_full_profile = false;
        if (residual > rep.worst_residual) {
            rep.worst_residual = residual;
            if (rep.is_r_mu_sparse) rep.worst_row = k;
        }
    }
    return rep;
}

SampleSizeReport required_samples(const SparsityProfile& profile,
                                  std::size_t p, double K, double C) {
    const double mu = profile.mu, R = profile.R;
    if (!(mu > 2.0 * R))
        throw std::invalid_argument("required_samples: need mu > 2R");
    if (!(K > 0.0) || !(C > 0.0))
        throw std::invalid_argument("required_samples: need K > 0 and C > 0");
    const double pr = static_cast<double>(p) - static_cast<double>(
                          std::min<std::size_t>(profile.r, p));
    const double t1 = (mu - 2.0 * R) / (2.0 * std::sqrt(pr) + 1.0);
    const double t2 = (mu - R) / 4.0;
    const double t3 = K * K;

    SampleSizeReport rep;
    rep.K = K;
    rep.C = C;
    rep.t = t1;
    rep.binding_term = BindingTerm::gap_over_sqrt_p;
    if (t2 < rep.t) {
        rep.t = t2;
        rep.binding_term = BindingTerm::quarter_gap;
    }
    if (t3 < rep.t) {
        rep.t = t3;
        rep.binding_term = BindingTerm::k_squared;
    }
    const double n = C * std::pow(K, 4) / (rep.t * rep.t) *
                     std::log(54.0 * static_cast<double>(p) *
                              static_cast<double>(p));
    rep.n_required =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(n)) + 1);
    return rep;
}

std::size_t multi_run_count(std::size_t p) {
    // smallest m with 3^m >= 3p, evaluated in integers
    std::size_t m = 0;
    unsigned long long pw = 1;
    while (pw < 3ULL * p) {
        pw *= 3;
        ++m;
    }
    return std::max<std::size_t>(m, 1);
}

std::size_t tree_count(std::size_t p, std::size_t r) {
    if (p == 0 || r == 0)
        throw std::invalid_argument("tree_count: need p >= 1 and r >= 1");
    const double L = static_cast<double>(std::bit_width(p) - 1) + 1.0;
    const double arg = 2.0 * static_cast<double>(r) * static_cast<double>(p) *
                       L * L * L;
    return static_cast<std::size_t>(std::ceil(64.0 * std::log(arg)));
}

}  // namespace scov
