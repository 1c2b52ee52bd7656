#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "mtfd/errors.hpp"

namespace mtfd {

/// Uniform grid t_k = k T / n on [0, T].
class TimeGrid {
 public:
  TimeGrid(double t_end, int n_steps) : t_end_(t_end), n_steps_(n_steps) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
      throw ConfigError("TimeGrid: t_end must be positive and finite");
    }
    if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
  }

  double t_end() const { return t_end_; }
  int n_steps() const { return n_steps_; }
  Eigen::Index size() const { return n_steps_ + 1; }
  double step() const { return t_end_ / n_steps_; }
  double node(Eigen::Index k) const {
    return k == n_steps_ ? t_end_ : static_cast<double>(k) * step();
  }
  Eigen::VectorXd nodes() const {
    Eigen::VectorXd t(size());
    for (Eigen::Index k = 0; k < size(); ++k) t[k] = node(k);
    return t;
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t_end_ == b.t_end_ && a.n_steps_ == b.n_steps_;
  }

 private:
  double t_end_;
  int n_steps_;
};

/// Samples of a function of time on a TimeGrid.
template <typename Scalar>
struct BasicTimeSeries {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TimeGrid grid;
  Vector values;

  BasicTimeSeries(TimeGrid g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
      throw GridMismatch("TimeSeries: value count does not match the grid");
    }
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      if (!std::isfinite(static_cast<double>(values[k]))) {
        throw DomainError("TimeSeries: non-finite value at node " + std::to_string(k));
      }
    }
  }

  static BasicTimeSeries zeros(TimeGrid g) { return {g, Vector::Zero(g.size())}; }

  template <typename Fn>
  static BasicTimeSeries sample(TimeGrid g, Fn&& fn) {
    Vector v(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) v[k] = static_cast<Scalar>(fn(Scalar(g.node(k))));
    return {g, std::move(v)};
  }

  Eigen::Index size() const { return values.size(); }
  Scalar operator[](Eigen::Index k) const { return values[k]; }
};

using TimeSeries = BasicTimeSeries<double>;

/// A positive fractional order; Caputo derivatives additionally need alpha < 1.
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw InvalidOrder("fractional order must be positive, got " + std::to_string(alpha));
    }
  }
  double value() const { return alpha_; }
  void require_caputo() const {
    if (!(alpha_ < 1.0)) {
      throw InvalidOrder("Caputo derivative needs 0 < alpha < 1, got " + std::to_string(alpha_));
    }
  }

 private:
  double alpha_;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": time grids differ");
}

/// Composite trapezoid weights on the grid.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> trapezoid_weights(const TimeGrid& grid) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(grid.size(), Scalar(grid.step()));
  w[0] /= Scalar(2);
  w[grid.size() - 1] /= Scalar(2);
  return w;
}

/// Trapezoid-rule L²(0,T) inner product.
template <typename Scalar>
Scalar inner(const BasicTimeSeries<Scalar>& a, const BasicTimeSeries<Scalar>& b) {
  require_same_grid(a.grid, b.grid, "inner");
  return (trapezoid_weights<Scalar>(a.grid).array() * a.values.array() * b.values.array()).sum();
}

template <typename Scalar>
Scalar l2_norm(const BasicTimeSeries<Scalar>& a) {
  using std::sqrt;
  return sqrt(inner(a, a));
}

}  // namespace mtfd
