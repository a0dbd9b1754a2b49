#include "synclab/models.hpp"

#include "synclab/error.hpp"

#include <cmath>

namespace synclab::models {

VectorField fhn() {
  auto eval = [](double, const StateVec& x) {
    StateVec dx(2);
    dx[0] = 2.0 * (x[0] - x[0] * x[0] * x[0] / 3.0 + x[1] - 9.0 / 20.0);
    dx[1] = -0.5 * (x[0] + 4.0 / 5.0 * x[1] - 7.0 / 10.0);
    return dx;
  };
  auto jac = [](double, const StateVec& x) {
    Matrix j(2, 2);
    j << 2.0 * (1.0 - x[0] * x[0]), 2.0, -0.5, -0.4;
    return j;
  };
  return VectorField(2, eval, jac, true, "fhn");
}

double saturation(double s) noexcept { return 0.5 * (std::abs(s + 1.0) - std::abs(s - 1.0)); }

Matrix chaotic_cnn_weights() {
  Matrix w(3, 3);
  w << 1.25, -3.2, -3.2,  //
      -3.2, 1.1, -4.4,    //
      -3.2, 4.4, 1.0;
  return w;
}

VectorField chaotic_cnn() {
  const Matrix w = chaotic_cnn_weights();
  auto eval = [w](double, const StateVec& x) {
    StateVec fx(3);
    for (Eigen::Index i = 0; i < 3; ++i) fx[i] = saturation(x[i]);
    return StateVec(-x + w * fx);
  };
  auto jac = [w](double, const StateVec& x) {
    Matrix slope = Matrix::Zero(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i) slope(i, i) = std::abs(x[i]) <= 1.0 ? 1.0 : 0.0;
    return Matrix(-Matrix::Identity(3, 3) + w * slope);
  };
  return VectorField(3, eval, jac, true, "chaotic_cnn");
}

namespace {

Matrix master_decay() {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 10.0 / 7.0;
  d(1, 1) = 1.0;
  d(2, 2) = 0.1;
  return d;
}

Matrix master_weights() {
  Matrix w(3, 3);
  w << -20.0 / 7.0, 10.0, 0.0,  //
      1.0, -30.0, 1.0,          //
      0.0, 100.0 / 7.0, -1.9;
  return w;
}

}  // namespace

StateVec forcing_input(double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  const double c3 = c * c * c;
  StateVec in(3);
  in[0] = 10.0 / 7.0 * c + 20.0 / 7.0 * c3 - 11.0 * s;
  in[1] = 31.0 * s + 2.0 * c - c3;
  in[2] = -93.0 / 7.0 * s - 2.0 * c;
  return in;
}

StateVec master_orbit(double t) {
  StateVec y(3);
  y << std::cos(t), std::sin(t), -std::cos(t);
  return y;
}

StateVec master_orbit_derivative(double t) {
  StateVec y(3);
  y << -std::sin(t), std::cos(t), std::sin(t);
  return y;
}

VectorField forced_master_nn() {
  const Matrix d = master_decay();
  const Matrix w = master_weights();
  auto eval = [d, w](double t, const StateVec& y) {
    StateVec sigma(3);
    sigma << y[0] * y[0] * y[0], y[1], y[2];
    return StateVec(-d * y + w * sigma + forcing_input(t));
  };
  auto jac = [d, w](double, const StateVec& y) {
    Matrix dsigma = Matrix::Identity(3, 3);
    dsigma(0, 0) = 3.0 * y[0] * y[0];
    return Matrix(-d + w * dsigma);
  };
  return VectorField(3, eval, jac, false, "forced_master_nn");
}

VectorField van_der_pol(double mu) {
  auto eval = [mu](double, const StateVec& x) {
    StateVec dx(2);
    dx << x[1], mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
    return dx;
  };
  auto jac = [mu](double, const StateVec& x) {
    Matrix j(2, 2);
    j << 0.0, 1.0, -2.0 * mu * x[0] * x[1] - 1.0, mu * (1.0 - x[0] * x[0]);
    return j;
  };
  return VectorField(2, eval, jac, true, "van_der_pol");
}

VectorField hopf_normal_form() {
  auto eval = [](double, const StateVec& x) {
    const double g = 1.0 - x.squaredNorm();
    StateVec dx(2);
    dx << g * x[0] - x[1], g * x[1] + x[0];
    return dx;
  };
  auto jac = [](double, const StateVec& x) {
    const double g = 1.0 - x.squaredNorm();
    Matrix j(2, 2);
    j << g - 2.0 * x[0] * x[0], -2.0 * x[0] * x[1] - 1.0,  //
        -2.0 * x[0] * x[1] + 1.0, g - 2.0 * x[1] * x[1];
    return j;
  };
  return VectorField(2, eval, jac, true, "hopf");
}

VectorField harmonic_oscillator() {
  auto eval = [](double, const StateVec& x) {
    StateVec dx(2);
    dx << x[1], -x[0];
    return dx;
  };
  auto jac = [](double, const StateVec&) {
    Matrix j(2, 2);
    j << 0.0, 1.0, -1.0, 0.0;
    return j;
  };
  return VectorField(2, eval, jac, true, "harmonic");
}

const std::vector<ModelInfo>& catalog() {
  static const std::vector<ModelInfo> models{
      {"fhn", "FitzHugh-Nagumo type planar oscillator", {5.0, -5.0}, 10.0},
      {"chaotic_cnn", "three-neuron cellular network with a chaotic attractor", {-1.0, 1.0, 1.0}, 0.0},
      {"forced_master_nn", "forced network tracking (cos t, sin t, -cos t)", {1.0, 0.0, -1.0}, 0.0},
      {"van_der_pol", "Van der Pol oscillator, mu = 1", {2.0, 0.0}, 6.6},
      {"hopf", "planar Hopf normal form, unit-circle cycle", {0.5, 0.0}, 6.0},
      {"harmonic", "harmonic oscillator (non-isolated cycles)", {1.0, 0.0}, 6.0},
  };
  return models;
}

const ModelInfo& info(std::string_view name) {
  for (const auto& m : catalog()) {
    if (m.name == name) return m;
  }
  throw Error(ErrorKind::UnknownModel, "no model named '" + std::string(name) + "'");
}

VectorField make(std::string_view name) {
  if (name == "fhn") return fhn();
  if (name == "chaotic_cnn") return chaotic_cnn();
  if (name == "forced_master_nn") return forced_master_nn();
  if (name == "van_der_pol") return van_der_pol(1.0);
  if (name == "hopf") return hopf_normal_form();
  if (name == "harmonic") return harmonic_oscillator();
  throw Error(ErrorKind::UnknownModel, "no model named '" + std::string(name) + "'");
}

}  // namespace synclab::models
