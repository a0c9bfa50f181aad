#pragma once

// Closed-form spectra of the model operators used as oracles:
//   complex Airy on the half-line  -d^2/dx^2 + iJx,        eigenvalues e^{i pi/3}|mu_j|J^{2/3}
//   Davies oscillator               -d^2/dx^2 + i alpha x^2, eigenvalues (2k+1)sqrt|alpha| e^{+-i pi/4}
//   quadratic tensor model          -Laplace + i sum lambda_j x_j^2 (sums of Davies spectra)

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace semispec {

using Complex = std::complex<double>;

/// Ai and its first two derivatives from the Maclaurin series.
struct AiryValue {
  double ai = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline constexpr double kAiryWindow = 12.0;

/// Throws ConfigError when |x| > 12.
AiryValue airy_series(double x);
double airy_ai(double x);

/// Gamma function via the Lanczos approximation (g = 7, 9 terms).
double lanczos_gamma(double x);

struct AiryZeros {
  std::vector<double> zeros;  // mu_1 > mu_2 > ... , all negative
  int count = 0;
  double tolerance = 0.0;     // max |Ai(mu_j)| achieved
};

/// First k zeros (1 <= k <= 8), bracketed on [-12, 0] and refined by bisection.
AiryZeros airy_zeros(int k);

/// mu_1, computed once.
double airy_mu1();

enum class ModelSource { AiryHalfLine, Davies, QuadTensor };

struct ModelSpectrum {
  std::vector<Complex> eigenvalues;
  double min_real = 0.0;
  ModelSource source = ModelSource::Davies;
};

ModelSpectrum halfline_airy_spectrum(double J, int k);
ModelSpectrum davies_spectrum(double alpha, int kmax);
ModelSpectrum quad_tensor_spectrum(const std::vector<double>& lambdas, int kmax);

/// Upper bound e^{-(n-1)t^3/12} for the half-space model semigroup.
double halfplane_decay_envelope(double t, int n);

struct GLStability {
  double J_c = 0.0;
  bool stable = false;
};

/// J_c = (2/|mu_1|)^{3/2}; stable iff no perpendicular boundary (J_m absent) or J_m > J_c.
GLStability gl_stability(std::optional<double> J_m);

}  // namespace semispec
