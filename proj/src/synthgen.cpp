#include "scov/synthgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "scov/rng.hpp"

namespace scov {

namespace {

// key tags for the independent sub-streams
enum : std::uint64_t {
    kTagRow = 1,
    kTagSign = 2,
    kTagDiag = 3,
    kTagEps = 4,
    kTagSample = 5,
    kTagSphere = 6,
    kTagQuery = 7,
    kTagPower = 8,
};

constexpr std::size_t kDenseEigenLimit = 8192;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                          Eigen::RowMajor>;

double smallest_eigenvalue_magnitude(const std::vector<double>& A,
                                     std::size_t p, std::uint64_t seed) {
    Eigen::Map<const Mat> M(A.data(), static_cast<Eigen::Index>(p),
                            static_cast<Eigen::Index>(p));
    if (p <= kDenseEigenLimit) {
        Eigen::SelfAdjointEigenSolver<Mat> es(M,
                                              Eigen::EigenvaluesOnly);
        return std::abs(es.eigenvalues()(0));
    }
    // spectral-radius bound on |lambda_min| by power iteration, with a
    // 1.1 safety factor
    Eigen::VectorXd v(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i)
        v(static_cast<Eigen::Index>(i)) = rng::gaussian(seed, kTagPower, i);
    v.normalize();
    double rho = 0.0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd w = M.selfadjointView<Eigen::Lower>() * v;
        rho = w.norm();
        if (rho == 0.0) return 0.0;
        v = w / rho;
    }
    return 1.1 * rho;
}

PopulationModel build_population(std::size_t p, double epsilon,
                                 std::uint64_t seed) {
    if (p < 2)
        throw std::invalid_argument("gen_population_cov: p >= 2");
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("gen_population_cov_eps: eps in [0,1)");

    PopulationModel model;
    model.p = p;
    model.r_row = default_r_row(p);
    model.mu_pop = 1.0;
    model.epsilon = epsilon;
    model.Sigma.assign(p * p, 0.0);
    auto& A = model.Sigma;

    // +-1 transpose pairs, about r per row; positions a previous row
    // already set through symmetry count toward the quota
    const std::size_t r = model.r_row;
    for (std::size_t k = 0; k < p; ++k) {
        std::size_t have = 0;
        for (std::size_t j = 0; j < p; ++j)
            if (j != k && A[k * p + j] != 0.0) ++have;
        std::uint64_t draw = 0;
        const std::uint64_t max_draws = 64 * static_cast<std::uint64_t>(p);
        while (have < r && draw < max_draws) {
            const std::size_t j = static_cast<std::size_t>(
                rng::uniform_below(p, seed, kTagRow, k, draw));
            ++draw;
            if (j == k || A[k * p + j] != 0.0) continue;
            const double s =
                rng::coin(seed, kTagSign, k, draw) ? 1.0 : -1.0;
            A[k * p + j] = A[j * p + k] = s;
            ++have;
        }
    }
    for (std::size_t k = 0; k < p; ++k)
        A[k * p + k] = rng::coin(seed, kTagDiag, k) ? 1.0 : -1.0;

    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t j = 0; j < p; ++j)
            if (std::abs(A[k * p + j]) == 1.0) model.support.emplace(k, j);

    // the epsilon stream is independent of everything above, so
    // epsilon = 0 leaves the matrix bit-identical to the exact family
    if (epsilon > 0.0) {
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t j = k + 1; j < p; ++j)
                if (A[k * p + j] == 0.0) {
                    const double s =
                        rng::coin(seed, kTagEps, k, j) ? 1.0 : -1.0;
                    A[k * p + j] = A[j * p + k] = s * epsilon;
                }
    }

    model.diag_shift = smallest_eigenvalue_magnitude(A, p, seed) + 1.0;
    for (std::size_t k = 0; k < p; ++k) A[k * p + k] += model.diag_shift;
    return model;
}

}  // namespace

std::size_t default_r_row(std::size_t p) {
    if (p < 2) return 0;
    const auto r = static_cast<std::size_t>(
        std::floor(std::log2(static_cast<double>(p)) / 3.0));
    return std::min(r, p - 1);
}

PopulationModel gen_population_cov(std::size_t p, std::uint64_t seed) {
    return build_population(p, 0.0, seed);
}

PopulationModel gen_population_cov_eps(std::size_t p, double epsilon,
                                       std::uint64_t seed) {
    return build_population(p, epsilon, seed);
}

double eps_crit(std::size_t p, std::size_t r) {
    if (r >= p) throw std::invalid_argument("eps_crit: need r < p");
    return 1.0 / std::sqrt(4.0 * static_cast<double>(p - r));
}

ObservationMatrix sample_gaussian(const PopulationModel& model, std::size_t n,
                                  std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample_gaussian: n >= 2");
    const std::size_t p = model.p;
    Eigen::Map<const Mat> S(model.Sigma.data(),
                            static_cast<Eigen::Index>(p),
                            static_cast<Eigen::Index>(p));
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("sample_gaussian: Cholesky failed");
    const Mat L = llt.matrixL();

    ObservationMatrix out;
    out.n = n;
    out.p = p;
    out.data.resize(n * p);
    Eigen::VectorXd g(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < p; ++t)
            g(static_cast<Eigen::Index>(t)) =
                rng::gaussian(seed, kTagSample, i, t);
        const Eigen::VectorXd z = L * g;
        for (std::size_t t = 0; t < p; ++t)
            out.at(i, t) = z(static_cast<Eigen::Index>(t));
    }
    return out;
}

ObservationMatrix gen_unit_sphere_set(std::size_t p, std::size_t n,
                                      std::uint64_t seed) {
    if (p == 0 || n < 2)
        throw std::invalid_argument("gen_unit_sphere_set: p >= 1, n >= 2");
    ObservationMatrix out;
    out.n = n;
    out.p = p;
    out.data.resize(n * p);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < p; ++k) {
        double norm_sq = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            col[t] = rng::gaussian(seed, kTagSphere, k, t);
            norm_sq += col[t] * col[t];
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t t = 0; t < n; ++t) out.at(t, k) = col[t] * inv;
    }
    return out;
}

std::vector<double> gen_near_dup_query(const ObservationMatrix& refset,
                                       std::size_t j, double epsilon,
                                       std::uint64_t seed) {
    if (j >= refset.p)
        throw std::out_of_range("gen_near_dup_query: column index");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("gen_near_dup_query: eps in (0,1)");
    const std::size_t n = refset.n;
    std::vector<double> x(n);
    double xn = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = refset.at(t, j);
        xn += x[t] * x[t];
    }
    xn = std::sqrt(xn);
    for (auto& v : x) v /= xn;

    for (std::uint64_t attempt = 0;; ++attempt) {
        std::vector<double> z(n);
        double dot = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            z[t] = rng::gaussian(seed, kTagQuery, attempt, t);
            dot += z[t] * x[t];
        }
        double wn = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            z[t] -= dot * x[t];
            wn += z[t] * z[t];
        }
        wn = std::sqrt(wn);
        if (wn < 1e-12) continue;  // z parallel to x_j: redraw
        std::vector<double> u(n);
        const double a = std::sqrt(1.0 - epsilon), b = std::sqrt(epsilon);
        for (std::size_t t = 0; t < n; ++t) u[t] = a * x[t] + b * z[t] / wn;
        return u;
    }
}

}  // namespace scov
