#include "scov/sfft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "scov/fft.hpp"
#include "scov/sparsity.hpp"

namespace scov {

namespace {

using cd = std::complex<double>;

cd unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

double circular_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

/// Top-r positions by |value|, ties to the lowest index.
SparseSpectralResult select_top(const std::vector<std::size_t>& idx,
                                const std::vector<cd>& val, std::size_t r) {
    std::vector<std::size_t> order(idx.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(val[a]), mb = std::abs(val[b]);
        if (ma != mb) return ma > mb;
        return idx[a] < idx[b];
    });
    SparseSpectralResult out;
    const std::size_t keep = std::min(r, order.size());
    for (std::size_t t = 0; t < keep; ++t) {
        out.indices.push_back(idx[order[t]]);
        out.values.push_back(val[order[t]]);
    }
    return out;
}

double median(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    if (v.size() % 2 == 1) return v[h];
    return 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

WMatrix::WMatrix(const CenteredColumns& cols, bool materialize)
    : cols_(&cols), n_(cols.n), p_(cols.p), materialized_(materialize) {
    if (p_ == 0) throw std::invalid_argument("WMatrix: empty input");
    columns_.resize(p_);
    ready_.assign(p_, 0);
    if (!materialized_) return;
    for (auto& c : columns_) c.resize(n_);
    // one length-p transform per sample coordinate
    fft::cvec row(p_);
    for (std::size_t t = 0; t < n_; ++t) {
        for (std::size_t l = 0; l < p_; ++l)
            row[l] = cols.column(l)[t];
        const fft::cvec f = fft::forward_1based(row);
        for (std::size_t j = 0; j < p_; ++j)
            columns_[j][t] = f[j] / static_cast<double>(p_);
    }
    std::fill(ready_.begin(), ready_.end(), char{1});
}

WMatrix WMatrix::compute(const CenteredColumns& cols) {
    return WMatrix(cols, true);
}

WMatrix WMatrix::lazy(const CenteredColumns& cols) {
    return WMatrix(cols, false);
}

std::span<const cd> WMatrix::column(std::size_t j0) const {
    if (j0 >= p_) throw std::out_of_range("WMatrix::column");
    if (materialized_) return columns_[j0];
    std::lock_guard lock(mutex_);
    if (!ready_[j0]) {
        // w_{j0+1}[t] = (1/p) sum_l x_{l+1}[t] omega^{-(j0+1)(l+1)}
        std::vector<cd> w(n_, cd{});
        for (std::size_t l = 0; l < p_; ++l) {
            const double angle = -2.0 * std::numbers::pi *
                                 static_cast<double>((j0 + 1) * (l + 1) % p_) /
                                 static_cast<double>(p_);
            const cd phase = unit(angle);
            const auto x = cols_->column(l);
            for (std::size_t t = 0; t < n_; ++t) w[t] += phase * x[t];
        }
        for (auto& v : w) v /= static_cast<double>(p_);
        columns_[j0] = std::move(w);
        ready_[j0] = 1;
    }
    return columns_[j0];
}

cd u_entry(std::size_t k, std::size_t j0, const CenteredColumns& cols,
           const WMatrix& W) {
    return inner_product(cols.column(k), W.column(j0));
}

SparseSpectralResult exact_spectral_solver(const SpectralInput& input,
                                           std::size_t r) {
    if (r == 0) throw std::invalid_argument("exact_spectral_solver: r >= 1");
    const std::size_t p = input.p;
    fft::cvec u(p);
    for (std::size_t l = 0; l < p; ++l) u[l] = input.read(l);
    const fft::cvec s = fft::forward_1based(u);
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return select_top(idx, s, r);
}

SparseSpectralResult subsampled_spectral_solver(const SpectralInput& input,
                                                std::size_t r, double delta,
                                                double alpha,
                                                std::uint64_t key) {
    if (r == 0)
        throw std::invalid_argument("subsampled_spectral_solver: r >= 1");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument(
            "subsampled_spectral_solver: delta in (0,1)");
    if (!(alpha > 0.0))
        throw std::invalid_argument("subsampled_spectral_solver: alpha > 0");
    const std::size_t p = input.p;

    std::size_t rounds = static_cast<std::size_t>(
        std::ceil(4.0 + std::log2(1.0 / delta)));
    rounds = std::clamp<std::size_t>(rounds, 5, 41);
    rounds |= 1;  // odd count keeps the median a sampled value

    const std::size_t B = std::bit_ceil(std::max<std::size_t>(4, 4 * r));
    const std::size_t shifts =
        std::has_single_bit(p) ? static_cast<std::size_t>(std::bit_width(p))
                               : 0;
    const bool sublinear =
        std::has_single_bit(p) && B < p && rounds * shifts * B < p;
    if (!sublinear) return exact_spectral_solver(input, r);

    // standard-DFT view: a[s] = u[(s + p - 1) mod p], spectrum b_f;
    // output column c = (f + p - 1) mod p carries value b_f
    std::unordered_map<std::size_t, cd> cache;
    cache.reserve(rounds * shifts * B);
    auto sample = [&](std::size_t s) {
        const std::size_t l = (s + p - 1) % p;
        auto it = cache.find(l);
        if (it != cache.end()) return it->second;
        const cd v = input.read(l);
        cache.emplace(l, v);
        return v;
    };

    const std::size_t v = p / B;
    const std::size_t logp = shifts - 1;  // p = 2^logp
    std::unordered_map<std::size_t, std::vector<cd>> estimates;

    for (std::size_t round = 0; round < rounds; ++round) {
        const std::size_t sigma =
            2 * rng::uniform_below(p / 2, key, round, 1) + 1;
        const std::size_t tau = rng::uniform_below(p, key, round, 2);

        // B-point bin spectra for the base and each dyadic shift
        std::vector<fft::cvec> D(shifts, fft::cvec(B));
        for (std::size_t t = 0; t < shifts; ++t) {
            const std::size_t shift = (t == 0) ? 0 : (p >> t);
            fft::cvec q(B);
            for (std::size_t s = 0; s < B; ++s)
                q[s] = sample((sigma * (s * v) + tau + shift) % p);
            fft::transform_pow2(q, false);
            D[t] = std::move(q);
        }

        double max_mag = 0.0;
        for (std::size_t b = 0; b < B; ++b)
            max_mag = std::max(max_mag, std::abs(D[0][b]));
        const double floor_mag = 1e-12 * (1.0 + max_mag);

        for (std::size_t b = 0; b < B; ++b) {
            if (std::abs(D[0][b]) <= floor_mag) continue;
            // recover f bit by bit: ratio angle ~ 2 pi f / 2^t
            std::size_t f = 0;
            bool ok = true;
            for (std::size_t t = 1; t <= logp; ++t) {
                const cd ratio = D[t][b] / D[0][b];
                if (std::abs(D[t][b]) <= floor_mag * 0.01) {
                    ok = false;
                    break;
                }
                const double theta = std::arg(ratio);
                const std::size_t high = std::size_t{1} << (t - 1);
                const double base = 2.0 * std::numbers::pi *
                                    static_cast<double>(f) /
                                    static_cast<double>(std::size_t{1} << t);
                const double alt = base + std::numbers::pi;
                if (circular_gap(theta, alt) < circular_gap(theta, base))
                    f += high;
            }
            if (!ok) continue;
            if ((sigma * f) % B != b) continue;  // failed the bin check
            const cd est = (static_cast<double>(p) / static_cast<double>(B)) *
                           D[0][b] *
                           unit(-2.0 * std::numbers::pi *
                                static_cast<double>((f * tau) % p) /
                                static_cast<double>(p));
            estimates[f].push_back(est);
        }
    }

    std::vector<std::size_t> idx;
    std::vector<cd> val;
    for (auto& [f, est] : estimates) {
        if (2 * est.size() < rounds) continue;  // seen in a minority only
        std::vector<double> re, im;
        re.reserve(est.size());
        im.reserve(est.size());
        for (const cd& e : est) {
            re.push_back(e.real());
            im.push_back(e.imag());
        }
        idx.push_back((f + p - 1) % p);
        val.emplace_back(median(re), median(im));
    }
    return select_top(idx, val, r);
}

SfftResult sfft_cov_estimation(const CenteredColumns& cols, std::size_t r,
                               double R, double epsilon,
                               const SpectralSolver& solver,
                               std::uint64_t seed,
                               const SfftOptions& options) {
    if (r == 0) throw std::invalid_argument("sfft_cov_estimation: r >= 1");
    if (R < 0.0 || !(epsilon > 0.0))
        throw std::invalid_argument(
            "sfft_cov_estimation: need R >= 0 and epsilon > 0");
    const std::size_t p = cols.p;

    const bool materialize =
        options.materialize_w &&
        cols.n * p <= options.memory_cap_elements;
    const WMatrix W =
        materialize ? WMatrix::compute(cols) : WMatrix::lazy(cols);

    SfftResult result;
    SfftReport& rep = result.report;
    double M = 0.0;
    for (std::size_t k = 0; k < p; ++k)
        M = std::max(M, covariance_entry(cols, k, k));
    rep.max_diagonal = M;

    const double denom = R + std::sqrt(static_cast<double>(r)) * M;
    double delta = denom > 0.0 ? epsilon / denom : 1.0;
    if (!(delta < 1.0)) {
        rep.delta_out_of_contract = true;
        delta = 0.999;
    }
    rep.delta = delta;
    rep.alpha = 1.0;
    rep.runs_per_row = solver.deterministic() ? 1 : multi_run_count(p);

    std::vector<std::pair<std::size_t, std::size_t>> picked;
    for (std::size_t k = 0; k < p; ++k) {
        SpectralInput input;
        input.p = p;
        input.accessor = [&cols, &W, k](std::size_t j0) {
            return u_entry(k, j0, cols, W);
        };
        std::vector<std::size_t> joined;
        bool failed = false;
        for (std::size_t run = 0; run < rep.runs_per_row; ++run) {
            try {
                const SparseSpectralResult res = solver.solve(
                    input, r, delta, rep.alpha, rng::hash_key(0, seed, k, run));
                joined.insert(joined.end(), res.indices.begin(),
                              res.indices.end());
            } catch (const std::exception&) {
                failed = true;
            }
        }
        rep.u_entries_read += input.entries_read;
        if (failed) {
            rep.incomplete_rows.push_back(k);
            continue;
        }
        ++rep.rows_complete;
        std::sort(joined.begin(), joined.end());
        joined.erase(std::unique(joined.begin(), joined.end()), joined.end());
        for (std::size_t j : joined) picked.emplace_back(k, j);
    }

    for (const auto& [i, j] : picked)
        result.entries.entries.push_back({i, j, covariance_entry(cols, i, j)});
    result.entries.sort_and_dedup();
    return result;
}

}  // namespace scov
