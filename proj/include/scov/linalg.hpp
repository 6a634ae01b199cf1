#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scov {

/// Raw input: n observations (rows) of p variables.
struct ObservationMatrix {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> data;  // row-major, n*p

    double& at(std::size_t i, std::size_t k) { return data[i * p + k]; }
    double at(std::size_t i, std::size_t k) const { return data[i * p + k]; }
};

enum class Mode { covariance, correlation };

/// Per-variable column vectors, usually mean-centered. In correlation
/// mode each column is additionally scaled to unit self inner product.
struct CenteredColumns {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<std::vector<double>> columns;  // p vectors of length n
    Mode mode = Mode::covariance;

    std::span<const double> column(std::size_t k) const { return columns[k]; }
};

/// Compact set of matrix entries {((i,j), value)}, 0-based indices.
struct SparseEntrySet {
    struct Entry {
        std::size_t i, j;
        double value;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    void sort_and_dedup();
    bool contains(std::size_t i, std::size_t j) const;
    bool operator==(const SparseEntrySet&) const = default;
};

CenteredColumns center_columns(const ObservationMatrix& raw);

/// Column view without mean centering (cosine / no-center workflows).
CenteredColumns columns_view(const ObservationMatrix& raw);

/// Normalized inner product (1/(n-1)) * sum_t x_t y_t.
double inner_product(std::span<const double> x, std::span<const double> y);

/// Complex variant, conjugating the second argument.
std::complex<double> inner_product(std::span<const double> x,
                                   std::span<const std::complex<double>> y);

/// S_ij via a canonical evaluation order, so (i,j) and (j,i) are
/// bit-identical.
double covariance_entry(const CenteredColumns& cols, std::size_t i,
                        std::size_t j);

/// Full p x p matrix (row-major). O(n p^2); verification baseline only.
std::vector<double> dense_covariance(const CenteredColumns& cols);

/// Scale each column by 1/sqrt(S_kk); throws on a zero-variance column.
CenteredColumns correlation_normalize(const CenteredColumns& cols);

}  // namespace scov
