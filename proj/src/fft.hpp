#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace whitham::detail {

// Unnormalized real-to-complex / complex-to-real transforms of length n.
// Plans are created once per length (under a lock) and executed through the
// thread-safe new-array interface.
void fft_r2c(std::span<const double> in, std::span<std::complex<double>> out);
// `in` holds n/2 + 1 coefficients and is left untouched.
void fft_c2r(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace whitham::detail
