#pragma once

// Thin RAII wrapper over FFTW's complex 1D transforms. Plans are created
// under a global lock (the FFTW planner is not thread-safe) and cached per
// thread and size; execution uses the new-array interface.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Core>

namespace miura {

class FourierPlan {
 public:
  explicit FourierPlan(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
  }

  FourierPlan(const FourierPlan&) = delete;
  FourierPlan& operator=(const FourierPlan&) = delete;

  ~FourierPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  int size() const { return n_; }

  /// Unnormalized forward transform, sum_j f_j e^{-2 pi i j m / n}.
  Eigen::VectorXcd forward(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out(n_);
    fftw_execute_dft(forward_, as_fftw(in), as_fftw(out));
    return out;
  }

  /// Inverse transform including the 1/n normalization.
  Eigen::VectorXcd backward(const Eigen::VectorXcd& in) const {
    Eigen::VectorXcd out(n_);
    fftw_execute_dft(backward_, as_fftw(in), as_fftw(out));
    out /= static_cast<double>(n_);
    return out;
  }

  static const FourierPlan& cached(int n) {
    thread_local std::map<int, std::unique_ptr<FourierPlan>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FourierPlan>(n);
    return *slot;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  static fftw_complex* as_fftw(const Eigen::VectorXcd& v) {
    return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(v.data()));
  }

  int n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace miura
