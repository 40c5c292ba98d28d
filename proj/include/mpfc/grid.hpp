#pragma once

// Periodic lattice on the unit box (0,1)^dim with its Fourier tables.

#include <array>
#include <cstdlib>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "mpfc/error.hpp"

namespace mpfc {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr int max_sobolev_level = 5;

namespace detail {

// FFTW's planner is not reentrant; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    if (p != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(p);
    }
  }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace detail

class Grid {
 public:
  Grid(int dim, int n_points) : dim_(dim), n_(n_points) {
    if (dim < 1 || dim > 3) {
      throw ConfigError("dim", "must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
    }
    if (!detail::is_power_of_two(n_points) || n_points < 4) {
      throw ConfigError("n_points", "must be a power of two >= 4 (got " +
                                        std::to_string(n_points) + ")");
    }
    size_ = 1;
    for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(n_);
    build_tables();
    build_plans();
  }

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const noexcept { return dim_; }
  int n_points() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return 1.0 / n_; }

  // Integer frequency vector of mode `idx` (unused axes are 0).
  const std::array<int, 3>& kappa(std::size_t idx) const { return kappa_[idx]; }

  // |2*pi*kappa|^2 per mode, i.e. the symbol of -Laplacian.
  std::span<const double> lambda() const noexcept { return lambda_; }

  // 1 where the mode survives the two-thirds rule.
  std::span<const std::uint8_t> dealias_mask() const noexcept { return mask_; }

  // Per-mode weight of the full multi-index H^m norm, m in [0, 5].
  std::span<const double> sobolev_weight(int m) const {
    return sobolev_weights_.at(static_cast<std::size_t>(m));
  }

  // Sample position of grid point `idx` along `axis`.
  double coordinate(std::size_t idx, int axis) const {
    return static_cast<double>(axis_index(idx, axis)) / n_;
  }

  int axis_index(std::size_t idx, int axis) const {
    std::size_t stride = 1;
    for (int d = dim_ - 1; d > axis; --d) stride *= static_cast<std::size_t>(n_);
    return static_cast<int>((idx / stride) % static_cast<std::size_t>(n_));
  }

  // Flat index of the mode -kappa(idx).
  std::size_t mirror(std::size_t idx) const {
    std::size_t out = 0;
    for (int d = 0; d < dim_; ++d) {
      const int i = axis_index(idx, d);
      out = out * static_cast<std::size_t>(n_) + static_cast<std::size_t>((n_ - i) % n_);
    }
    return out;
  }

  // Spectral coefficients normalised so that coefficient 0 is the mean.
  void forward(std::span<const Complex> in, std::span<Complex> out) const {
    check_span(in.size(), out.size());
    fftw_execute_dft(forward_.get(), as_fftw(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(size_);
    for (auto& c : out) c *= scale;
  }

  void inverse(std::span<const Complex> in, std::span<Complex> out) const {
    check_span(in.size(), out.size());
    fftw_execute_dft(inverse_.get(), as_fftw(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  }

 private:
  static fftw_complex* as_fftw(const Complex* p) {
    // FFTW's execute API takes non-const input; out-of-place plans do not
    // write to it.
    return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
  }

  void check_span(std::size_t in, std::size_t out) const {
    if (in != size_ || out != size_) {
      throw InvalidField("transform buffer size does not match grid");
    }
  }

  void build_tables() {
    kappa_.assign(size_, {0, 0, 0});
    lambda_.assign(size_, 0.0);
    mask_.assign(size_, 1);
    for (auto& w : sobolev_weights_) w.assign(size_, 0.0);

    for (std::size_t idx = 0; idx < size_; ++idx) {
      std::array<double, 3> q{0.0, 0.0, 0.0};
      for (int d = 0; d < dim_; ++d) {
        const int i = axis_index(idx, d);
        const int k = i < n_ / 2 ? i : i - n_;
        kappa_[idx][static_cast<std::size_t>(d)] = k;
        const double kk = two_pi * k;
        q[static_cast<std::size_t>(d)] = kk * kk;
        lambda_[idx] += kk * kk;
        if (3 * std::abs(k) > n_) mask_[idx] = 0;
      }
      // Complete homogeneous sums h_t(q) over the active axes, accumulated
      // into sum_{t<=m} h_t.
      std::array<double, max_sobolev_level + 1> h{};
      h.fill(0.0);
      h[0] = 1.0;
      for (int d = 0; d < dim_; ++d) {
        const double qd = q[static_cast<std::size_t>(d)];
        // h_t(q_1..q_d) = sum_a q_d^a h_{t-a}(q_1..q_{d-1}), done in place.
        for (int t = max_sobolev_level; t >= 1; --t) {
          double acc = 0.0;
          double p = 1.0;
          for (int a = 0; a <= t; ++a) {
            acc += p * h[static_cast<std::size_t>(t - a)];
            p *= qd;
          }
          h[static_cast<std::size_t>(t)] = acc;
        }
      }
      double running = 0.0;
      for (int m = 0; m <= max_sobolev_level; ++m) {
        running += h[static_cast<std::size_t>(m)];
        sobolev_weights_[static_cast<std::size_t>(m)][idx] = running;
      }
    }
  }

  void build_plans() {
    std::vector<Complex> a(size_), b(size_);
    std::array<int, 3> dims{n_, n_, n_};
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_.reset(fftw_plan_dft(dim_, dims.data(), pa, pb, FFTW_FORWARD, flags));
    inverse_.reset(fftw_plan_dft(dim_, dims.data(), pa, pb, FFTW_BACKWARD, flags));
    if (!forward_ || !inverse_) throw Error("FFTW failed to create a plan");
  }

  int dim_;
  int n_;
  std::size_t size_ = 0;
  std::vector<std::array<int, 3>> kappa_;
  std::vector<double> lambda_;
  std::vector<std::uint8_t> mask_;
  std::array<std::vector<double>, max_sobolev_level + 1> sobolev_weights_;
  detail::PlanHandle forward_;
  detail::PlanHandle inverse_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int dim, int n_points) {
  return std::make_shared<const Grid>(dim, n_points);
}

}  // namespace mpfc
