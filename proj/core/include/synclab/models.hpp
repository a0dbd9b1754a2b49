#pragma once

#include "synclab/vector_field.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace synclab::models {

/// FitzHugh-Nagumo type oscillator
///   x1' = 2 (x1 - x1^3/3 + x2 - 9/20)
///   x2' = -1/2 (x1 + 4/5 x2 - 7/10)
/// Has an attracting limit cycle with period close to 9.83.
[[nodiscard]] VectorField fhn();

/// Saturating activation (|s + 1| - |s - 1|) / 2.
[[nodiscard]] double saturation(double s) noexcept;

/// Three-neuron cellular network x' = -x + W f(x) with a chaotic attractor.
/// The Jacobian uses slope 1 on the kink set |x_i| = 1.
[[nodiscard]] VectorField chaotic_cnn();
[[nodiscard]] Matrix chaotic_cnn_weights();

/// Forced three-neuron network y' = -D y + W sigma(y) + I(t), sigma(y) = (y1^3, y2, y3),
/// with I(t) chosen so that (cos t, sin t, -cos t) is a solution.
[[nodiscard]] VectorField forced_master_nn();
[[nodiscard]] StateVec forcing_input(double t);
/// The 2*pi-periodic solution the forcing is built around, and its derivative.
[[nodiscard]] StateVec master_orbit(double t);
[[nodiscard]] StateVec master_orbit_derivative(double t);

/// Van der Pol x'' - mu (1 - x^2) x' + x = 0 as a first-order system.
[[nodiscard]] VectorField van_der_pol(double mu = 1.0);
/// Planar Hopf normal form; the unit circle is a cycle of period 2*pi with
/// Floquet multipliers {1, exp(-4*pi)}.
[[nodiscard]] VectorField hopf_normal_form();
/// x1' = x2, x2' = -x1: a continuum of cycles, no isolated one.
[[nodiscard]] VectorField harmonic_oscillator();

struct ModelInfo {
  std::string name;
  std::string description;
  std::vector<double> default_seed;
  double period_guess = 0.0;  // 0 for non-autonomous models
};

[[nodiscard]] const std::vector<ModelInfo>& catalog();
/// Throws UnknownModel.
[[nodiscard]] VectorField make(std::string_view name);
[[nodiscard]] const ModelInfo& info(std::string_view name);

}  // namespace synclab::models
