#include "synclab/vector_field.hpp"

#include "synclab/error.hpp"

#include <algorithm>
#include <cmath>

namespace synclab {

VectorField::VectorField(std::size_t dimension, EvalFn eval, JacobianFn jacobian,
                         bool autonomous, std::string name)
    : dimension_(dimension),
      eval_(std::move(eval)),
      jacobian_(std::move(jacobian)),
      autonomous_(autonomous),
      name_(std::move(name)) {
  if (dimension_ == 0) throw Error(ErrorKind::InvalidArgument, "vector field dimension must be positive");
  if (!eval_) throw Error(ErrorKind::InvalidArgument, "vector field needs an evaluation function");
}

Matrix VectorField::jacobian(double t, const StateVec& x) const {
  if (!jacobian_) {
    throw Error(ErrorKind::InvalidArgument,
                "field '" + name_ + "' has no analytic Jacobian");
  }
  return jacobian_(t, x);
}

Matrix finite_difference_jacobian(const VectorField& field, double t, const StateVec& x,
                                  double rel_step) {
  const auto n = static_cast<Eigen::Index>(field.dimension());
  Matrix jac(n, n);
  StateVec probe = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + h;
    const StateVec plus = field(t, probe);
    probe[j] = x[j] - h;
    const StateVec minus = field(t, probe);
    probe[j] = x[j];
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

bool all_finite(const StateVec& x) noexcept {
  return std::all_of(x.data(), x.data() + x.size(), [](double v) { return std::isfinite(v); });
}

}  // namespace synclab
