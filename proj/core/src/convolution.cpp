#include "convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace mlp::detail {
namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) throw std::runtime_error("FFTW planning failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

std::size_t fast_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace

std::vector<double> padded_convolution_direct(std::span<const double> ext,
                                              std::span<const double> stencil, std::size_t N,
                                              std::size_t P, int n) {
  const std::size_t W = N + 2 * P;
  const std::size_t S = 2 * P + 1;
  if (n == 1) {
    std::vector<double> out(N, 0.0);
    for (std::size_t x = 0; x < N; ++x) {
      // ext index x + P - d = x + 2P - s for stencil index s = d + P.
      double acc = 0.0;
      const double* e = ext.data() + x + 2 * P;
      for (std::size_t s = 0; s < S; ++s) acc += stencil[s] * e[-static_cast<std::ptrdiff_t>(s)];
      out[x] = acc;
    }
    return out;
  }
  std::vector<double> out(N * N, 0.0);
  for (std::size_t x0 = 0; x0 < N; ++x0) {
    for (std::size_t x1 = 0; x1 < N; ++x1) {
      double acc = 0.0;
      for (std::size_t s0 = 0; s0 < S; ++s0) {
        const double* row = ext.data() + (x0 + 2 * P - s0) * W + x1 + 2 * P;
        const double* st = stencil.data() + s0 * S;
        for (std::size_t s1 = 0; s1 < S; ++s1) acc += st[s1] * row[-static_cast<std::ptrdiff_t>(s1)];
      }
      out[x0 * N + x1] = acc;
    }
  }
  return out;
}

std::vector<double> padded_convolution_fft(std::span<const double> ext,
                                           std::span<const double> stencil, std::size_t N,
                                           std::size_t P, int n) {
  const std::size_t W = N + 2 * P;
  const std::size_t S = 2 * P + 1;
  const std::size_t M = fast_size(N + 4 * P);
  const std::size_t real_count = n == 1 ? M : M * M;
  const std::size_t half = M / 2 + 1;
  const std::size_t complex_count = n == 1 ? half : M * half;

  RealBuffer a(fftw_alloc_real(real_count));
  RealBuffer b(fftw_alloc_real(real_count));
  ComplexBuffer fa(fftw_alloc_complex(complex_count));
  ComplexBuffer fb(fftw_alloc_complex(complex_count));
  if (!a || !b || !fa || !fb) throw std::bad_alloc();

  std::unique_ptr<Plan> fwd_a;
  std::unique_ptr<Plan> fwd_b;
  std::unique_ptr<Plan> inv;
  {
    std::lock_guard lock(planner_mutex());
    const int m = static_cast<int>(M);
    if (n == 1) {
      fwd_a = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(m, a.get(), fa.get(), FFTW_ESTIMATE));
      fwd_b = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(m, b.get(), fb.get(), FFTW_ESTIMATE));
      inv = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(m, fa.get(), a.get(), FFTW_ESTIMATE));
    } else {
      fwd_a = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(m, m, a.get(), fa.get(), FFTW_ESTIMATE));
      fwd_b = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(m, m, b.get(), fb.get(), FFTW_ESTIMATE));
      inv = std::make_unique<Plan>(fftw_plan_dft_c2r_2d(m, m, fa.get(), a.get(), FFTW_ESTIMATE));
    }
  }

  std::fill(a.get(), a.get() + real_count, 0.0);
  std::fill(b.get(), b.get() + real_count, 0.0);
  if (n == 1) {
    std::copy(ext.begin(), ext.end(), a.get());
    std::copy(stencil.begin(), stencil.end(), b.get());
  } else {
    for (std::size_t r = 0; r < W; ++r) std::copy_n(ext.data() + r * W, W, a.get() + r * M);
    for (std::size_t r = 0; r < S; ++r) std::copy_n(stencil.data() + r * S, S, b.get() + r * M);
  }
  fwd_a->execute();
  fwd_b->execute();
  for (std::size_t i = 0; i < complex_count; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  inv->execute();

  const double scale = 1.0 / static_cast<double>(real_count);
  if (n == 1) {
    std::vector<double> out(N);
    for (std::size_t x = 0; x < N; ++x) out[x] = a[x + 2 * P] * scale;
    return out;
  }
  std::vector<double> out(N * N);
  for (std::size_t x0 = 0; x0 < N; ++x0) {
    for (std::size_t x1 = 0; x1 < N; ++x1) {
      out[x0 * N + x1] = a[(x0 + 2 * P) * M + x1 + 2 * P] * scale;
    }
  }
  return out;
}

std::vector<double> padded_convolution(std::span<const double> ext,
                                       std::span<const double> stencil, std::size_t N,
                                       std::size_t P, int n) {
  const double S = static_cast<double>(2 * P + 1);
  const double direct_cost = std::pow(static_cast<double>(N) * S, n);
  const double M = static_cast<double>(fast_size(N + 4 * P));
  const double fft_cost = 3.0 * std::pow(M, n) * std::log2(std::pow(M, n)) * 2.5 + 8.0 * std::pow(M, n);
  if (direct_cost <= fft_cost) return padded_convolution_direct(ext, stencil, N, P, n);
  return padded_convolution_fft(ext, stencil, N, P, n);
}

}  // namespace mlp::detail
