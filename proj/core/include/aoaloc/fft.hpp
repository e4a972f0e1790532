#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace aoaloc {

using Complex = std::complex<double>;

/// One-sided forward transform of `x`, zero-padded or truncated to `n`
/// points. Returns n/2 + 1 bins, unnormalized.
std::vector<Complex> rfft(std::span<const double> x, std::size_t n);

/// Inverse of rfft for a length-`n` real sequence; `bins` must hold n/2 + 1
/// entries. Normalized by 1/n so irfft(rfft(x, n), n) == x.
std::vector<double> irfft(std::span<const Complex> bins, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace aoaloc
