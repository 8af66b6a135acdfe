#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mlp::detail {

/// out[x] = sum_{d in [-P, P]^n} stencil[d + P] * ext[x + P - d] for x in
/// [0, N)^n. `ext` is the input padded by P on every side ((N + 2P)^n values,
/// row-major) and `stencil` holds (2P + 1)^n values. Picks direct summation or
/// an FFT product, whichever is cheaper.
std::vector<double> padded_convolution(std::span<const double> ext,
                                       std::span<const double> stencil, std::size_t N,
                                       std::size_t P, int n);

std::vector<double> padded_convolution_direct(std::span<const double> ext,
                                              std::span<const double> stencil, std::size_t N,
                                              std::size_t P, int n);

std::vector<double> padded_convolution_fft(std::span<const double> ext,
                                           std::span<const double> stencil, std::size_t N,
                                           std::size_t P, int n);

}  // namespace mlp::detail
