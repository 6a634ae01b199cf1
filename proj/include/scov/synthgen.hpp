#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "scov/linalg.hpp"

namespace scov {

/// Synthetic population covariance with known ground-truth support.
struct PopulationModel {
    std::size_t p = 0;
    std::vector<double> Sigma;  // row-major p x p, positive definite
    std::set<std::pair<std::size_t, std::size_t>> support;  // J_mu(Sigma)
    std::size_t r_row = 0;
    double mu_pop = 1.0;
    double epsilon = 0.0;   // small-entry magnitude, 0 = exact sparsity
    double diag_shift = 0.0;
};

/// r = floor(log2(p) / 3) large off-diagonal entries per row.
std::size_t default_r_row(std::size_t p);

/// Three-step construction: ~r off-diagonal +-1 pairs per row, +-1
/// diagonal, then the diagonal raised by |lambda_min| + 1.
PopulationModel gen_population_cov(std::size_t p, std::uint64_t seed);

/// Same construction with the zero off-diagonals set to +-epsilon
/// (signs from an independent stream, so epsilon = 0 reproduces
/// gen_population_cov exactly).
PopulationModel gen_population_cov_eps(std::size_t p, double epsilon,
                                       std::uint64_t seed);

/// 1 / sqrt(4 (p - r)): the magnitude where the residual R(eps)
/// reaches mu/2.
double eps_crit(std::size_t p, std::size_t r);

/// n i.i.d. rows from N(0, Sigma) via one Cholesky factorization.
ObservationMatrix sample_gaussian(const PopulationModel& model, std::size_t n,
                                  std::uint64_t seed);

/// p columns drawn independently and uniformly from the unit sphere
/// in R^n.
ObservationMatrix gen_unit_sphere_set(std::size_t p, std::size_t n,
                                      std::uint64_t seed);

/// u = sqrt(1-eps) x_j + sqrt(eps) (z - (z.x_j) x_j)/|...|, a unit
/// vector with cosine similarity sqrt(1-eps) to column j of refset.
std::vector<double> gen_near_dup_query(const ObservationMatrix& refset,
                                       std::size_t j, double epsilon,
                                       std::uint64_t seed);

}  // namespace scov
