#include "polarmi/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace polarmi {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void QuadratureSpec::validate() const {
  if (amp_points < 16)
    throw std::invalid_argument("QuadratureSpec: amp_points must be >= 16");
  if (phase_points < 64)
    throw std::invalid_argument("QuadratureSpec: phase_points must be >= 64");
  if (!is_pow2(phase_points))
    throw std::invalid_argument(
        "QuadratureSpec: phase_points must be a power of two, got " +
        std::to_string(phase_points));
  if (!(amp_truncation_sigmas > 0))
    throw std::invalid_argument(
        "QuadratureSpec: amp_truncation_sigmas must be positive");
  if (mc_samples < 1)
    throw std::invalid_argument("QuadratureSpec: mc_samples must be >= 1");
}

double AngularGrid::total_mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * bin_width();
}

void AngularGrid::normalize() {
  double m = total_mass();
  if (!(m > 0.0))
    throw std::runtime_error("AngularGrid: cannot normalize nonpositive mass");
  for (double& v : values) v /= m;
}

AngularGrid AngularGrid::uniform(int n) {
  AngularGrid g;
  g.values.assign(n, 1.0 / kTwoPi);
  return g;
}

// --------------------------------------------------------------------------
// Scaled modified Bessel functions. Power series below the switchover,
// asymptotic expansion (DLMF 10.40.1) above. Both are ~1e-13 at x = 25.
// --------------------------------------------------------------------------

namespace {

constexpr double kBesselSwitch = 25.0;

double bessel_series_scaled(double x, int nu) {
  // sum_k (x/2)^{2k+nu} / (k! (k+nu)!), scaled by e^{-x} at the end.
  double term = nu == 0 ? 1.0 : x / 2.0;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= (x / 2.0) * (x / 2.0) / (static_cast<double>(k) * (k + nu));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum * std::exp(-x);
}

double bessel_asymptotic_scaled(double x, int nu) {
  // I_nu(x) e^{-x} ~ 1/sqrt(2 pi x) * sum_k t_k,  t_0 = 1,
  // t_k = t_{k-1} * -(4 nu^2 - (2k-1)^2) / (8 k x).
  double t = 1.0, sum = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 40; ++k) {
    double num = 4.0 * nu * nu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    t *= -num / (8.0 * k * x);
    if (std::abs(t) > prev_abs) break;  // divergent tail of the expansion
    prev_abs = std::abs(t);
    sum += t;
    if (std::abs(t) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(kTwoPi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
  if (x < 0.0) throw std::domain_error("bessel_i0_scaled: negative argument");
  return x < kBesselSwitch ? bessel_series_scaled(x, 0)
                           : bessel_asymptotic_scaled(x, 0);
}

double bessel_i1_scaled(double x) {
  if (x < 0.0) throw std::domain_error("bessel_i1_scaled: negative argument");
  return x < kBesselSwitch ? bessel_series_scaled(x, 1)
                           : bessel_asymptotic_scaled(x, 1);
}

// --------------------------------------------------------------------------
// erfc / log-erfc. std::erfc already beats the accuracy contract; the log
// variant continues past the underflow point with the asymptotic series
// erfc(x) = e^{-x^2}/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...).
// --------------------------------------------------------------------------

double erfc(double x) { return std::erfc(x); }

double log_erfc(double x) {
  if (x < 15.0) return std::log(std::erfc(x));
  double inv2x2 = 1.0 / (2.0 * x * x);
  double t = 1.0, sum = 1.0;
  for (int k = 1; k < 20; ++k) {
    t *= -(2.0 * k - 1.0) * inv2x2;
    sum += t;
    if (std::abs(t) < 1e-18) break;
  }
  return -x * x - std::log(x * std::sqrt(kPi)) + std::log(sum);
}

// --------------------------------------------------------------------------
// Radix-2 FFT, iterative, in-place.
// --------------------------------------------------------------------------

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(static_cast<int>(n)))
    throw std::invalid_argument("fft_radix2: length must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
  }
}

AngularGrid circular_convolve(const AngularGrid& a, const AngularGrid& b) {
  const int n = a.size();
  if (b.size() != n)
    throw std::invalid_argument("circular_convolve: grid sizes differ (" +
                                std::to_string(n) + " vs " +
                                std::to_string(b.size()) + ")");
  // h(theta_m) = d * sum_j a_j b((m-j)*d); b at angle s*d is stored at index
  // (s + n/2) mod n, so rotate b by half a turn and cyclically convolve.
  std::vector<std::complex<double>> fa(n), fb(n);
  for (int i = 0; i < n; ++i) {
    fa[i] = a.values[i];
    fb[i] = b.values[(i + n / 2) % n];
  }
  fft_radix2(fa, false);
  fft_radix2(fb, false);
  for (int i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_radix2(fa, true);
  AngularGrid out;
  out.values.resize(n);
  const double d = a.bin_width();
  for (int i = 0; i < n; ++i) out.values[i] = std::max(0.0, fa[i].real() * d);
  out.normalize();
  return out;
}

AngularGrid convolve_with_wrapped_gaussian(const AngularGrid& a, double sigma) {
  if (!(sigma > 0.0))
    throw std::domain_error("convolve_with_wrapped_gaussian: sigma must be > 0");
  const int n = a.size();
  std::vector<std::complex<double>> f(a.values.begin(), a.values.end());
  fft_radix2(f, false);
  for (int k = 0; k < n; ++k) {
    int freq = k <= n / 2 ? k : k - n;
    f[k] *= std::exp(-0.5 * sigma * sigma * static_cast<double>(freq) * freq);
  }
  fft_radix2(f, true);
  AngularGrid out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = std::max(0.0, f[i].real());
  out.normalize();
  return out;
}

// --------------------------------------------------------------------------
// Gauss-Legendre on [0,1]: Newton iteration on P_n with the usual Chebyshev
// initial guesses; nodes then mapped from [-1,1].
// --------------------------------------------------------------------------

void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // evaluate P_n(x) and P'_n(x) by recurrence
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // symmetric pair; map [-1,1] -> [0,1] with descending x giving ascending
    // nodes from the left end
    nodes[i] = (1.0 - x) / 2.0;
    nodes[n - 1 - i] = (1.0 + x) / 2.0;
    weights[i] = w / 2.0;
    weights[n - 1 - i] = w / 2.0;
  }
}

// --------------------------------------------------------------------------
// RNG
// --------------------------------------------------------------------------

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; reject u1 == 0 to keep log finite.
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

std::complex<double> Rng::complex_normal() {
  const double s = std::sqrt(0.5);
  double re = normal();
  double im = normal();
  return {s * re, s * im};
}

}  // namespace polarmi
