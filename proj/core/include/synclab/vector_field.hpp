#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

namespace synclab {

using StateVec = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Right-hand side of x' = f(t, x) with optional analytic Jacobian.
///
/// Immutable after construction; copies share nothing mutable, so a field can
/// be evaluated from many threads at once.
class VectorField {
 public:
  using EvalFn = std::function<StateVec(double, const StateVec&)>;
  using JacobianFn = std::function<Matrix(double, const StateVec&)>;

  VectorField(std::size_t dimension, EvalFn eval, JacobianFn jacobian = {},
              bool autonomous = false, std::string name = {});

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] bool autonomous() const noexcept { return autonomous_; }
  [[nodiscard]] bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  [[nodiscard]] StateVec operator()(double t, const StateVec& x) const { return eval_(t, x); }
  [[nodiscard]] StateVec eval(double t, const StateVec& x) const { return eval_(t, x); }

  /// Throws InvalidArgument when the field was built without a Jacobian.
  [[nodiscard]] Matrix jacobian(double t, const StateVec& x) const;

 private:
  std::size_t dimension_;
  EvalFn eval_;
  JacobianFn jacobian_;
  bool autonomous_;
  std::string name_;
};

/// Central-difference Jacobian; used by tests and as a check on analytic ones.
[[nodiscard]] Matrix finite_difference_jacobian(const VectorField& field, double t,
                                                const StateVec& x, double rel_step = 1e-6);

[[nodiscard]] bool all_finite(const StateVec& x) noexcept;

}  // namespace synclab
