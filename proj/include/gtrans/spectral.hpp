#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gtrans {

// How angular derivatives of periodic samples are taken.
//   spectral: FFT differentiation, exact for trigonometric polynomials.
//   central:  three-point stencil that is exact for a·cosθ + b·sinθ, so the
//             radius of curvature h + h_θθ vanishes on polygon vertex cones.
enum class DiffRule { spectral, central };

bool is_power_of_two(int n);

// First and second derivatives of periodic samples f(2πj/n).
void periodic_derivatives(std::span<const double> f, std::span<double> d1,
                          std::span<double> d2, DiffRule rule);

// f + f_θθ, evaluated consistently with `rule`.
void radius_of_curvature(std::span<const double> f, std::span<double> out,
                         DiffRule rule);

// Half-spectrum coefficients c_k (k = 0..n/2) of the trigonometric interpolant,
// normalized so that f(θ) = Σ_k weight_k Re(c_k e^{ikθ}).
std::vector<std::complex<double>> fourier_coefficients(std::span<const double> f);

struct TrigValue {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

// Evaluates the interpolant (and two derivatives) at an arbitrary angle.
TrigValue eval_trig(std::span<const std::complex<double>> coeffs, int n, double theta);

// Convolution with a wrapped Gaussian of angular width sigma.
std::vector<double> gaussian_smooth(std::span<const double> f, double sigma);

}  // namespace gtrans
