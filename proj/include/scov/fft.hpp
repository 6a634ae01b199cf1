#pragma once

#include <complex>
#include <vector>

namespace scov::fft {

using cvec = std::vector<std::complex<double>>;

/// In-place radix-2 transform; size must be a power of two.
/// Forward: X_j = sum_l x_l e^{-2 pi i j l / N} (unnormalized).
/// Inverse: conjugate kernel, also unnormalized.
void transform_pow2(cvec& a, bool inverse);

/// Any length via Bluestein's chirp-z when not a power of two.
/// Same (unnormalized) conventions as transform_pow2.
cvec transform(const cvec& a, bool inverse);

/// One-based DFT convention with kernel omega^{-jl}, j,l in [1..p]:
/// out[j-1] = sum_{l=1..p} in[l-1] omega^{-jl}, omega = e^{2 pi i / p}.
cvec forward_1based(const cvec& in);

/// Inverse pair: out[j-1] = (1/p) sum_{l=1..p} in[l-1] omega^{+jl}.
cvec inverse_1based(const cvec& in);

}  // namespace scov::fft
