#pragma once

// Shared numeric kernels: scaled Bessel functions, erfc/log-erfc, radix-2 FFT,
// circular convolution of angular densities, Gauss-Legendre nodes, seeded RNG.

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace polarmi {

// Raised when a quantity that should be resolvable on the configured grids
// is not (unresolved kernels, inconsistent cross-checks, mass deficits).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
// Euler-Mascheroni constant, used by the closed-form asymptotics.
inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

// Grid sizes and sampling budgets for the decomposition engine. amp_points and
// phase_points are minimums; the engine raises them internally when the noise
// kernel would otherwise be unresolved (high SNR). phase_points must be a
// power of two (radix-2 transforms).
struct QuadratureSpec {
  int amp_points = 512;
  int phase_points = 4096;
  double amp_truncation_sigmas = 8.0;
  std::int64_t mc_samples = 2'000'000;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument on bad fields
};

// Uniform samples of a density over [-pi, pi): values[m] = p(-pi + m*delta),
// delta = 2*pi/size. Densities, not probabilities: sum(values)*delta == 1.
struct AngularGrid {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double bin_width() const { return kTwoPi / size(); }
  double angle(int m) const { return -kPi + m * bin_width(); }
  double total_mass() const;
  void normalize();  // rescale so total_mass() == 1; throws if mass <= 0

  static AngularGrid uniform(int n);
};

// I0(x)*exp(-x) and I1(x)*exp(-x). Power series below x=25, asymptotic
// expansion above; both give >= 12 digits at the switchover.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

double erfc(double x);
// ln(erfc(x)), valid for all x including x >> 27 where erfc underflows.
double log_erfc(double x);

// In-place radix-2 complex FFT. a.size() must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

// Circular convolution (f*g)(t) = integral f(s) g(t-s) ds of two densities on
// the same grid, via FFT; result renormalized to unit mass.
AngularGrid circular_convolve(const AngularGrid& a, const AngularGrid& b);

// Convolve with a wrapped Gaussian N(0, sigma^2) analytically: the k-th
// Fourier coefficient is attenuated by exp(-sigma^2 k^2 / 2).
AngularGrid convolve_with_wrapped_gaussian(const AngularGrid& a, double sigma);

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights);

// Deterministic RNG. The engine (mt19937_64) is fully specified by the
// standard; the value transforms live here because std distributions are not
// bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();           // [0, 1), 53-bit
  double normal();            // N(0, 1), Box-Muller
  std::complex<double> complex_normal();  // CN(0, 1): re,im ~ N(0, 1/2)

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace polarmi
