#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace cqed {

/// One-pass mean/variance (Welford), mergeable across independent workers.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Least-squares y = c x (no intercept).
struct OriginFit {
  double slope = 0.0;
  double r_squared = 0.0;  ///< 1 - SS_res / SS_tot, SS_tot about the mean of y
};

OriginFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cqed
