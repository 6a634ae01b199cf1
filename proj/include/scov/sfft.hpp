#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "scov/linalg.hpp"
#include "scov/rng.hpp"

namespace scov {

/// W = (w_1, ..., w_p), w_j = (1/p) sum_l x_l omega^{-jl} with
/// omega = e^{2 pi i / p}. Columns are either materialized up front
/// (one length-p FFT per sample coordinate, O(np log p)) or computed
/// on demand in O(np) each and cached.
class WMatrix {
public:
    static WMatrix compute(const CenteredColumns& cols);
    static WMatrix lazy(const CenteredColumns& cols);

    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }
    bool materialized() const { return materialized_; }

    /// w_{j0+1} as an n-vector (0-based column index).
    std::span<const std::complex<double>> column(std::size_t j0) const;

private:
    WMatrix(const CenteredColumns& cols, bool materialize);

    const CenteredColumns* cols_;
    std::size_t n_ = 0, p_ = 0;
    bool materialized_ = false;
    mutable std::vector<std::vector<std::complex<double>>> columns_;
    mutable std::vector<char> ready_;
    mutable std::mutex mutex_;
};

/// (u_k)_{j0+1} = <x_k, w_{j0+1}> with the conjugating normalized
/// inner product.
std::complex<double> u_entry(std::size_t k, std::size_t j0,
                             const CenteredColumns& cols, const WMatrix& W);

/// On-demand view of one spectral row; each accessor call costs O(n).
struct SpectralInput {
    std::size_t p = 0;
    std::function<std::complex<double>(std::size_t)> accessor;
    mutable std::uint64_t entries_read = 0;

    std::complex<double> read(std::size_t j0) const {
        ++entries_read;
        return accessor(j0);
    }
};

/// Sparse approximation (J, y) of the spectrum of the input row;
/// indices are 0-based columns of S.
struct SparseSpectralResult {
    std::vector<std::size_t> indices;
    std::vector<std::complex<double>> values;
};

/// Reads all p entries, full DFT, top r by magnitude (ties broken by
/// lowest index). Deterministic, optimal r-sparse approximation.
SparseSpectralResult exact_spectral_solver(const SpectralInput& input,
                                           std::size_t r);

/// Random-shift aliasing sketch: dilate/shift the indices, fold into
/// B = O(r) bins with B-point DFTs, locate heavy frequencies bit by
/// bit from phase shifts, estimate by a median over rounds. Falls back
/// to the exact path when p is not a power of two or the planned reads
/// would reach p. Success probability >= 2/3 per call.
SparseSpectralResult subsampled_spectral_solver(const SpectralInput& input,
                                                std::size_t r, double delta,
                                                double alpha,
                                                std::uint64_t key);

/// Pluggable solver surface for the end-to-end driver.
class SpectralSolver {
public:
    virtual ~SpectralSolver() = default;
    virtual bool deterministic() const = 0;
    virtual SparseSpectralResult solve(const SpectralInput& input,
                                       std::size_t r, double delta,
                                       double alpha,
                                       std::uint64_t key) const = 0;
};

class ExactSpectralSolver final : public SpectralSolver {
public:
    bool deterministic() const override { return true; }
    SparseSpectralResult solve(const SpectralInput& input, std::size_t r,
                               double, double,
                               std::uint64_t) const override {
        return exact_spectral_solver(input, r);
    }
};

class SubsampledSpectralSolver final : public SpectralSolver {
public:
    explicit SubsampledSpectralSolver(std::uint64_t seed) : seed_(seed) {}
    bool deterministic() const override { return false; }
    SparseSpectralResult solve(const SpectralInput& input, std::size_t r,
                               double delta, double alpha,
                               std::uint64_t key) const override {
        return subsampled_spectral_solver(input, r, delta, alpha,
                                          rng::hash_key(seed_, key, 0, 0));
    }

private:
    std::uint64_t seed_;
};

struct SfftOptions {
    /// Materialize W when n*p fits the cap; otherwise lazy columns.
    bool materialize_w = true;
    std::size_t memory_cap_elements = 200'000'000;
};

struct SfftReport {
    std::size_t rows_complete = 0;
    std::vector<std::size_t> incomplete_rows;
    std::uint64_t u_entries_read = 0;
    double delta = 0.0;
    double alpha = 1.0;
    bool delta_out_of_contract = false;
    std::size_t runs_per_row = 1;
    double max_diagonal = 0.0;
};

struct SfftResult {
    SparseEntrySet entries;
    SfftReport report;
};

/// End-to-end driver: compute W and M, set delta = eps/(R + sqrt(r) M)
/// and alpha = 1, run m = multi_run_count(p) solver calls per row
/// (m = 1 for deterministic solvers), union the index sets, then
/// evaluate every selected S_ij exactly. Per-row solver failures mark
/// the row incomplete instead of aborting.
SfftResult sfft_cov_estimation(const CenteredColumns& cols, std::size_t r,
                               double R, double epsilon,
                               const SpectralSolver& solver,
                               std::uint64_t seed,
                               const SfftOptions& options = {});

}  // namespace scov
