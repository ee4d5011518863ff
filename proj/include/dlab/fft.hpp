#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dlab::fft {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// Precomputed discrete Fourier transform of one length: iterative radix-2
/// for powers of two, Bluestein's chirp-z otherwise. Forward uses
/// exp(-2 pi i jk / n) and is unnormalized; inverse divides by n.
class Plan {
 public:
  explicit Plan(std::size_t n);
  ~Plan();
  Plan(Plan&&) noexcept;
  Plan& operator=(Plan&&) noexcept;

  std::size_t size() const { return n_; }
  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  void radix2(std::span<cplx> data, bool invert) const;
  void bluestein(std::span<cplx> data, bool invert) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<cplx> twiddle_;
  // Bluestein state
  std::vector<cplx> chirp_;
  std::vector<cplx> kernel_hat_;
  std::unique_ptr<Plan> inner_;
};

std::vector<cplx> forward(std::vector<cplx> data);
std::vector<cplx> inverse(std::vector<cplx> data);

/// Angular wavenumbers 2 pi m / L in FFT order (0, 1, ..., n/2 - 1, -n/2, ..., -1).
std::vector<double> wavenumbers(std::size_t n, double length);

}  // namespace dlab::fft
