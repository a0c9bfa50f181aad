#include "semispec/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "semispec/error.hpp"

namespace semispec {

namespace {

constexpr double kZeroTarget = 1e-12;
constexpr int kMaxZeros = 8;

struct SeriesConstants {
  long double c1;  // Ai(0)
  long double c2;  // -Ai'(0)
};

const SeriesConstants& series_constants() {
  static const SeriesConstants c{
      1.0L / (std::cbrt(9.0L) * static_cast<long double>(lanczos_gamma(2.0 / 3.0))),
      1.0L / (std::cbrt(3.0L) * static_cast<long double>(lanczos_gamma(1.0 / 3.0)))};
  return c;
}

ModelSpectrum finish(std::vector<Complex> ev, ModelSource src) {
  ModelSpectrum s;
  s.source = src;
  s.min_real = std::numeric_limits<double>::infinity();
  for (const auto& z : ev) s.min_real = std::min(s.min_real, z.real());
  s.eigenvalues = std::move(ev);
  return s;
}

}  // namespace

double lanczos_gamma(double x) {
  static constexpr std::array<double, 9> p = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  x -= 1.0;
  double a = p[0];
  const double t = x + g + 0.5;
  for (std::size_t i = 1; i < p.size(); ++i) a += p[i] / (x + static_cast<double>(i));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

AiryValue airy_series(double x) {
  if (!(std::abs(x) <= kAiryWindow)) {
    std::ostringstream os;
    os << "airy_ai: x = " << x << " outside the series window [-12, 12]";
    throw ConfigError(os.str());
  }
  // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}; both solve y'' = x y.
  const long double X = x;
  const long double x3 = X * X * X;
  long double a = 1.0L, b = 1.0L;  // coefficients a_k, b_k
  long double f = 1.0L, f1 = 0.0L, f2 = 0.0L;
  long double g = X, g1 = 1.0L, g2 = 0.0L;
  long double pf = 1.0L;  // x^{3k}
  for (int k = 1; k < 200; ++k) {
    a /= static_cast<long double>((3 * k - 1) * (3 * k));
    b /= static_cast<long double>((3 * k) * (3 * k + 1));
    const long double pprev = pf;  // x^{3k-3}
    pf *= x3;
    const long double tf = a * pf;
    const long double tg = b * pf * X;
    f += tf;
    g += tg;
    // derivatives of a x^{3k} and b x^{3k+1}
    f1 += a * (3 * k) * pprev * X * X;
    f2 += a * (3 * k) * (3 * k - 1) * pprev * X;
    g1 += b * (3 * k + 1) * pf;
    g2 += b * (3 * k + 1) * (3 * k) * pprev * X * X;
    const long double eps = 1e-18L;
    if (std::abs(tf) <= eps * std::abs(f) && std::abs(tg) <= eps * std::abs(g) && k > 2) break;
    if (tf == 0.0L && tg == 0.0L) break;
  }
  const auto& c = series_constants();
  return {static_cast<double>(c.c1 * f - c.c2 * g), static_cast<double>(c.c1 * f1 - c.c2 * g1),
          static_cast<double>(c.c1 * f2 - c.c2 * g2)};
}

double airy_ai(double x) { return airy_series(x).ai; }

AiryZeros airy_zeros(int k) {
  if (k < 1) throw ConfigError("airy_zeros: k must be at least 1");
  if (k > kMaxZeros) throw ConfigError("airy_zeros: k > 8 exhausts the series window");
  AiryZeros out;
  constexpr double step = 0.01;
  double hi = 0.0;
  double f_hi = airy_ai(hi);
  for (int i = 1; out.count < k; ++i) {
    const double lo = -step * i;
    if (lo < -kAiryWindow) throw NumericalError("airy_zeros: window exhausted before k zeros were found");
    const double f_lo = airy_ai(lo);
    if ((f_lo < 0.0) != (f_hi < 0.0) || f_lo == 0.0) {
      // bisection on [lo, hi] down to machine resolution
      double a = lo, b = hi, fa = f_lo;
      double best = f_lo == 0.0 ? lo : (std::abs(f_lo) < std::abs(f_hi) ? lo : hi);
      double best_val = std::min(std::abs(f_lo), std::abs(f_hi));
      for (int it = 0; it < 200 && b - a > 2.0 * std::numeric_limits<double>::epsilon() * std::abs(a); ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = airy_ai(m);
        if (std::abs(fm) < best_val) {
          best_val = std::abs(fm);
          best = m;
        }
        if (fm == 0.0) break;
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.zeros.push_back(best);
      out.tolerance = std::max({out.tolerance, best_val, kZeroTarget});
      ++out.count;
    }
    hi = lo;
    f_hi = f_lo;
  }
  return out;
}

double airy_mu1() {
  static const double mu1 = airy_zeros(1).zeros.front();
  return mu1;
}

ModelSpectrum halfline_airy_spectrum(double J, int k) {
  if (!(J > 0.0)) throw ConfigError("halfline_airy_spectrum: J must be positive");
  const AiryZeros z = airy_zeros(k);
  const Complex phase = std::polar(1.0, std::numbers::pi / 3.0);
  const double scale = std::cbrt(J * J);
  std::vector<Complex> ev;
  for (double mu : z.zeros) ev.push_back(phase * (std::abs(mu) * scale));
  ModelSpectrum s = finish(std::move(ev), ModelSource::AiryHalfLine);
  // cos(pi/3) = 1/2 exactly
  s.min_real = 0.5 * std::abs(z.zeros.front()) * scale;
  return s;
}

ModelSpectrum davies_spectrum(double alpha, int kmax) {
  if (alpha == 0.0) throw ConfigError("davies_spectrum: alpha must be nonzero");
  if (kmax < 0) throw ConfigError("davies_spectrum: kmax must be non-negative");
  const double r = std::sqrt(std::abs(alpha));
  const Complex phase = std::polar(1.0, (alpha > 0 ? 1.0 : -1.0) * std::numbers::pi / 4.0);
  std::vector<Complex> ev;
  for (int k = 0; k <= kmax; ++k) ev.push_back(phase * ((2.0 * k + 1.0) * r));
  return finish(std::move(ev), ModelSource::Davies);
}

ModelSpectrum quad_tensor_spectrum(const std::vector<double>& lambdas, int kmax) {
  if (lambdas.empty()) throw ConfigError("quad_tensor_spectrum: empty lambda list");
  if (kmax < 0) throw ConfigError("quad_tensor_spectrum: kmax must be non-negative");
  std::vector<ModelSpectrum> factors;
  for (double l : lambdas) {
    if (l == 0.0) throw ConfigError("quad_tensor_spectrum: lambda_j must be nonzero");
    factors.push_back(davies_spectrum(l, kmax));
  }
  std::vector<Complex> sums{Complex(0.0, 0.0)};
  for (const auto& f : factors) {
    std::vector<Complex> next;
    next.reserve(sums.size() * f.eigenvalues.size());
    for (const auto& s : sums)
      for (const auto& e : f.eigenvalues) next.push_back(s + e);
    sums = std::move(next);
  }
  std::stable_sort(sums.begin(), sums.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  ModelSpectrum s = finish(std::move(sums), ModelSource::QuadTensor);
  double m = 0.0;
  for (double l : lambdas) m += std::sqrt(std::abs(l) / 2.0);
  s.min_real = m;
  return s;
}

double halfplane_decay_envelope(double t, int n) {
  if (t < 0.0) throw ConfigError("halfplane_decay_envelope: t must be non-negative");
  if (n < 2) throw ConfigError("halfplane_decay_envelope: n must be at least 2");
  return std::exp(-(n - 1) * t * t * t / 12.0);
}

GLStability gl_stability(std::optional<double> J_m) {
  GLStability s;
  s.J_c = std::pow(2.0 / std::abs(airy_mu1()), 1.5);
  s.stable = !J_m || *J_m > s.J_c;
  return s;
}

}  // namespace semispec
