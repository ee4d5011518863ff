#include "dlab/fft.hpp"

#include <cmath>
#include <numbers>

#include "dlab/errors.hpp"

namespace dlab::fft {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Plan::Plan(std::size_t n) : n_(n) {
  if (n == 0) throw DomainError("FFT length must be positive");
  if (is_power_of_two(n)) {
    bitrev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = {std::cos(a), std::sin(a)};
    }
    return;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  inner_ = std::make_unique<Plan>(m);
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle small for large k
    const auto k2 = static_cast<double>((k * k) % (2 * n));
    const double a = -std::numbers::pi * k2 / static_cast<double>(n);
    chirp_[k] = {std::cos(a), std::sin(a)};
  }
  kernel_hat_.assign(m, cplx{});
  kernel_hat_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel_hat_[k] = kernel_hat_[m - k] = std::conj(chirp_[k]);
  }
  inner_->forward(kernel_hat_);
}

Plan::~Plan() = default;
Plan::Plan(Plan&&) noexcept = default;
Plan& Plan::operator=(Plan&&) noexcept = default;

void Plan::radix2(std::span<cplx> a, bool invert) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        cplx w = twiddle_[j * stride];
        if (invert) w = std::conj(w);
        const cplx u = a[i + j];
        const cplx v = a[i + j + half] * w;
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

void Plan::bluestein(std::span<cplx> a, bool invert) const {
  // inverse DFT = conj(forward(conj(a))), scaled by the caller
  const std::size_t m = inner_->size();
  std::vector<cplx> buf(m, cplx{});
  for (std::size_t k = 0; k < n_; ++k) {
    buf[k] = (invert ? std::conj(a[k]) : a[k]) * chirp_[k];
  }
  inner_->forward(buf);
  for (std::size_t k = 0; k < m; ++k) buf[k] *= kernel_hat_[k];
  inner_->inverse(buf);
  for (std::size_t k = 0; k < n_; ++k) {
    const cplx v = buf[k] * chirp_[k];
    a[k] = invert ? std::conj(v) : v;
  }
}

void Plan::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw ShapeError("FFT length mismatch");
  if (inner_) {
    bluestein(data, false);
  } else {
    radix2(data, false);
  }
}

void Plan::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw ShapeError("FFT length mismatch");
  if (inner_) {
    bluestein(data, true);
  } else {
    radix2(data, true);
  }
  const double s = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= s;
}

std::vector<cplx> forward(std::vector<cplx> data) {
  Plan(data.size()).forward(data);
  return data;
}

std::vector<cplx> inverse(std::vector<cplx> data) {
  Plan(data.size()).inverse(data);
  return data;
}

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / length;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = static_cast<long>(i) - (i >= (n + 1) / 2 ? static_cast<long>(n) : 0);
    k[i] = base * static_cast<double>(m);
  }
  return k;
}

}  // namespace dlab::fft
