#pragma once

#include <cstddef>
#include <memory>

#include "types.hpp"

namespace nhqm {

/// Unnormalized 1D complex DFT of fixed length backed by FFTW.
/// forward: X_k = sum_n x_n e^{-2 pi i k n / N}; inverse applies the 1/N.
/// Plans are created once; execution is safe from concurrent threads.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept { return n_; }

  void forward(const cplx* in, cplx* out) const;
  void inverse(const cplx* in, cplx* out) const;

 private:
  struct Plans;
  std::size_t n_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace nhqm
