#include "scov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scov {

void SparseEntrySet::sort_and_dedup() {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) {
                  return std::tie(a.i, a.j) < std::tie(b.i, b.j);
              });
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const Entry& a, const Entry& b) {
                                  return a.i == b.i && a.j == b.j;
                              }),
                  entries.end());
}

bool SparseEntrySet::contains(std::size_t i, std::size_t j) const {
    // entries are kept sorted by sort_and_dedup
    auto it = std::lower_bound(
        entries.begin(), entries.end(), std::pair{i, j},
        [](const Entry& e, const std::pair<std::size_t, std::size_t>& k) {
            return std::tie(e.i, e.j) < std::tie(k.first, k.second);
        });
    return it != entries.end() && it->i == i && it->j == j;
}

CenteredColumns center_columns(const ObservationMatrix& raw) {
    if (raw.n < 2)
        throw std::invalid_argument("center_columns: need at least 2 samples");
    CenteredColumns out;
    out.n = raw.n;
    out.p = raw.p;
    out.mode = Mode::covariance;
    out.columns.resize(raw.p);
    for (std::size_t k = 0; k < raw.p; ++k) {
        double sum = 0.0;
        for (std::size_t t = 0; t < raw.n; ++t) sum += raw.at(t, k);
        const double mean = sum / static_cast<double>(raw.n);
        auto& col = out.columns[k];
        col.resize(raw.n);
        for (std::size_t t = 0; t < raw.n; ++t) col[t] = raw.at(t, k) - mean;
    }
    return out;
}

CenteredColumns columns_view(const ObservationMatrix& raw) {
    if (raw.n < 2)
        throw std::invalid_argument("columns_view: need at least 2 samples");
    CenteredColumns out;
    out.n = raw.n;
    out.p = raw.p;
    out.mode = Mode::covariance;
    out.columns.resize(raw.p);
    for (std::size_t k = 0; k < raw.p; ++k) {
        auto& col = out.columns[k];
        col.resize(raw.n);
        for (std::size_t t = 0; t < raw.n; ++t) col[t] = raw.at(t, k);
    }
    return out;
}

double inner_product(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("inner_product: length mismatch or n < 2");
    double acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) acc += x[t] * y[t];
    return acc / static_cast<double>(x.size() - 1);
}

std::complex<double> inner_product(std::span<const double> x,
                                   std::span<const std::complex<double>> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("inner_product: length mismatch or n < 2");
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) acc += x[t] * std::conj(y[t]);
    return acc / static_cast<double>(x.size() - 1);
}

double covariance_entry(const CenteredColumns& cols, std::size_t i,
                        std::size_t j) {
    if (i >= cols.p || j >= cols.p)
        throw std::out_of_range("covariance_entry: index out of range");
    const auto [a, b] = std::minmax(i, j);
    return inner_product(cols.column(a), cols.column(b));
}

std::vector<double> dense_covariance(const CenteredColumns& cols) {
    const std::size_t p = cols.p;
    std::vector<double> s(p * p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = covariance_entry(cols, i, j);
            s[i * p + j] = v;
            s[j * p + i] = v;
        }
    return s;
}

CenteredColumns correlation_normalize(const CenteredColumns& cols) {
    CenteredColumns out = cols;
    out.mode = Mode::correlation;
    for (std::size_t k = 0; k < cols.p; ++k) {
        const double skk = inner_product(cols.column(k), cols.column(k));
        if (!(skk > 0.0) || !std::isfinite(skk))
            throw std::domain_error("correlation_normalize: column " +
                                    std::to_string(k) + " has zero variance");
        const double inv = 1.0 / std::sqrt(skk);
        for (double& v : out.columns[k]) v *= inv;
    }
    return out;
}

}  // namespace scov
