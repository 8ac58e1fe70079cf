#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nhc/types.hpp"

namespace nhc {

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects a step from the initial derivative
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;

  /// Defaults with rel_tol overridden by NHC_DEFAULT_TOL when it parses as a
  /// positive number.
  static IntegratorOptions from_environment();
};

enum class StepStatus { ok, step_underflow, too_many_steps, non_finite, monitor_stop };

/// Explicit Dormand-Prince 5(4) with PI step-size control. Works on real or
/// complex Eigen vectors; the error norm is the RMS of |err_i| / (atol + rtol
/// max(|y_i|, |y_new_i|)).
template <class Vector>
class DormandPrince {
 public:
  using Rhs = std::function<void(double, const Vector&, Vector&)>;
  using PostStep = std::function<void(Vector&)>;
  /// Returns false when an accepted state leaves the admissible region.
  using Monitor = std::function<bool(const Vector&)>;

  DormandPrince(Rhs rhs, IntegratorOptions opts, PostStep post = {}, Monitor monitor = {})
      : rhs_(std::move(rhs)), opts_(opts), post_(std::move(post)), monitor_(std::move(monitor)) {}

  /// Advances (t, y) to exactly t_end. Step size is carried between calls.
  /// On failure (t, y) hold the last accepted state; after monitor_stop the
  /// rejected step ended at bad_time().
  StepStatus advance(double& t, Vector& y, double t_end) {
    if (t_end <= t) return StepStatus::ok;
    if (!have_k1_ || k1_t_ != t) {
      rhs_(t, y, k1_);
      have_k1_ = true;
      k1_t_ = t;
      if (!k1_.allFinite()) return StepStatus::non_finite;
    }
    if (h_ <= 0.0) h_ = initial_step(t, y, t_end - t);
    while (t < t_end) {
      if (steps_++ >= opts_.max_steps) return StepStatus::too_many_steps;
      const double remaining = t_end - t;
      double h = std::min({h_, opts_.max_step, remaining});
      const bool last = h >= remaining * (1.0 - 1e-12);
      if (last) h = remaining;
      if (h < opts_.min_step && !last) return StepStatus::step_underflow;

      const double err = attempt(t, y, h);
      if (err <= 1.0 && y_new_.allFinite()) {
        const double t_next = last ? t_end : t + h;
        if (post_) post_(y_new_);
        if (monitor_ && !monitor_(y_new_)) {
          bad_time_ = t_next;
          have_k1_ = false;
          return StepStatus::monitor_stop;
        }
        t = t_next;
        y = y_new_;
        if (post_) {
          rhs_(t, y, k1_);
        } else {
          k1_ = k7_;
        }
        k1_t_ = t;
        if (!k1_.allFinite()) return StepStatus::non_finite;
        const double e = std::max(err, 1e-10);
        double factor = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev_, 0.4 / 5.0);
        factor = std::clamp(factor, 0.2, 5.0);
        err_prev_ = e;
        // A step truncated to hit t_end says nothing about the natural step.
        if (!last || h >= h_) h_ = h * factor;
      } else {
        double factor = std::isfinite(err) ? 0.9 * std::pow(err, -0.2) : 0.1;
        h_ = h * std::clamp(factor, 0.1, 0.9);
        if (h_ < opts_.min_step) return StepStatus::step_underflow;
      }
    }
    return StepStatus::ok;
  }

  std::size_t steps() const noexcept { return steps_; }
  double bad_time() const noexcept { return bad_time_; }
  double step_size() const noexcept { return h_; }

 private:
  double error_norm(const Vector& y0, const Vector& y1, const Vector& err) const {
    double acc = 0.0;
    for (Index i = 0; i < y0.size(); ++i) {
      const double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
      const double r = std::abs(err(i)) / sc;
      acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(std::max<Index>(1, y0.size())));
  }

  double initial_step(double t, const Vector& y, double span) {
    if (opts_.initial_step > 0.0) return opts_.initial_step;
    double d0 = 0.0, d1 = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
      const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y(i));
      d0 += std::norm(y(i)) / (sc * sc);
      d1 += std::norm(k1_(i)) / (sc * sc);
    }
    d0 = std::sqrt(d0 / y.size());
    d1 = std::sqrt(d1 / y.size());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vector y1 = y + h0 * k1_;
    Vector f1(y.size());
    rhs_(t + h0, y1, f1);
    double d2 = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
      const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y(i));
      d2 += std::norm(f1(i) - k1_(i)) / (sc * sc);
    }
    d2 = std::sqrt(d2 / y.size()) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span});
  }

  double attempt(double t, const Vector& y, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Index m = y.size();
    k2_.resize(m), k3_.resize(m), k4_.resize(m), k5_.resize(m), k6_.resize(m), k7_.resize(m);
    rhs_(t + c2 * h, y + h * (a21 * k1_), k2_);
    rhs_(t + c3 * h, y + h * (a31 * k1_ + a32 * k2_), k3_);
    rhs_(t + c4 * h, y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_), k4_);
    rhs_(t + c5 * h, y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_), k5_);
    rhs_(t + h, y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_), k6_);
    y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    rhs_(t + h, y_new_, k7_);
    const Vector err = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    if (!err.allFinite()) return std::numeric_limits<double>::infinity();
    return error_norm(y, y_new_, err);
  }

  Rhs rhs_;
  IntegratorOptions opts_;
  PostStep post_;
  Monitor monitor_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, y_new_;
  bool have_k1_ = false;
  double k1_t_ = 0.0;
  double h_ = 0.0;
  double err_prev_ = 1.0;
  std::size_t steps_ = 0;
  double bad_time_ = 0.0;
};

std::string to_string(StepStatus status);

/// Equally spaced sample times t0, t0 + dt, ..., ending exactly at t1.
std::vector<double> sample_times(double t0, double t1, double dt);

}  // namespace nhc
