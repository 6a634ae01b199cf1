#include "scov/fft.hpp"

#include <bit>
#include <numbers>
#include <stdexcept>

namespace scov::fft {

namespace {

using cd = std::complex<double>;

cd unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

cvec bluestein(const cvec& a, bool inverse) {
    const std::size_t n = a.size();
    const double sign = inverse ? 1.0 : -1.0;
    const std::size_t m = std::bit_ceil(2 * n - 1);
    // chirp[k] = e^{sign * pi i k^2 / n}; k^2 mod 2n keeps the angle exact
    cvec chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % (2 * n);
        chirp[k] = unit(sign * std::numbers::pi *
                        static_cast<double>(k2) / static_cast<double>(n));
    }
    cvec f(m, cd{}), g(m, cd{});
    for (std::size_t k = 0; k < n; ++k) f[k] = a[k] * chirp[k];
    g[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k)
        g[k] = g[m - k] = std::conj(chirp[k]);
    transform_pow2(f, false);
    transform_pow2(g, false);
    for (std::size_t k = 0; k < m; ++k) f[k] *= g[k];
    transform_pow2(f, true);
    cvec out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = f[k] * chirp[k] / static_cast<double>(m);
    return out;
}

}  // namespace

void transform_pow2(cvec& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || !std::has_single_bit(n))
        throw std::invalid_argument("transform_pow2: size must be 2^k");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi /
                             static_cast<double>(len);
        const cd wl = unit(angle);
        for (std::size_t i = 0; i < n; i += len) {
            cd w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

cvec transform(const cvec& a, bool inverse) {
    if (a.empty()) return {};
    if (std::has_single_bit(a.size())) {
        cvec out = a;
        transform_pow2(out, inverse);
        return out;
    }
    return bluestein(a, inverse);
}

// One-based conventions reduce to the standard ones on the array
// rotated right by one: a[s] = in[l-1] with l = s (mod p).
cvec forward_1based(const cvec& in) {
    const std::size_t p = in.size();
    if (p == 0) return {};
    cvec a(p);
    a[0] = in[p - 1];
    for (std::size_t s = 1; s < p; ++s) a[s] = in[s - 1];
    const cvec b = transform(a, false);
    cvec out(p);
    for (std::size_t c = 0; c < p; ++c) out[c] = b[(c + 1) % p];
    return out;
}

cvec inverse_1based(const cvec& in) {
    const std::size_t p = in.size();
    if (p == 0) return {};
    cvec a(p);
    a[0] = in[p - 1];
    for (std::size_t s = 1; s < p; ++s) a[s] = in[s - 1];
    const cvec b = transform(a, true);
    cvec out(p);
    for (std::size_t c = 0; c < p; ++c)
        out[c] = b[(c + 1) % p] / static_cast<double>(p);
    return out;
}

}  // namespace scov::fft
