#pragma once

// Circular (directional) distributions on [-pi, pi): wrapped Gaussian,
// von Mises, truncated Gaussian, uniform, and grid-sampled densities, with
// trigonometric moments, circular variance and differential entropy.
//
// Entropies are in nats throughout this module; conversion to bits happens
// only at reporting boundaries.

#include <complex>
#include <limits>

#include "polarmi/numerics.hpp"

namespace polarmi {

struct CircularMoments {
  double mean_direction;    // mu°, radians in [-pi, pi)
  double resultant_length;  // rho° in [0, 1]
  double circular_variance; // V° = 1 - rho°
  double circular_std;      // sqrt(-2 ln rho°); +inf when rho° = 0
};

class CircularDistribution {
 public:
  enum class Kind { WrappedGaussian, VonMises, TruncatedGaussian, Uniform, Sampled };

  static CircularDistribution wrapped_gaussian(double mu, double sigma);
  static CircularDistribution von_mises(double mu, double kappa);
  static CircularDistribution truncated_gaussian(double mu, double sigma);
  static CircularDistribution uniform();
  static CircularDistribution sampled(AngularGrid grid);

  Kind kind() const { return kind_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double kappa() const { return kappa_; }
  const AngularGrid& grid() const { return grid_; }

  double pdf(double theta) const;

  // pdf sampled on an n-point uniform grid (Sampled: resampled by periodic
  // linear interpolation if n differs from the native grid).
  AngularGrid sample_grid(int n) const;

  // E[exp(j * order * Theta)]. Closed form where available, spectrally
  // accurate trapezoid quadrature otherwise.
  std::complex<double> trigonometric_moment(int order) const;

  CircularMoments moments() const;

  // Differential entropy in nats; <= ln(2*pi) with equality iff uniform.
  double entropy() const;

 private:
  CircularDistribution() = default;
  Kind kind_ = Kind::Uniform;
  double mu_ = 0.0, sigma_ = 0.0, kappa_ = 0.0;
  AngularGrid grid_;
};

// lambda = 1 / (mass of N(0, sigma^2) on [-pi, pi)).
double truncated_gaussian_normalizer(double sigma);

// KL(candidate || reference) in nats on a shared grid; +inf if the reference
// vanishes where the candidate does not. Used to verify the max-entropy
// characterizations (von Mises under a circular-variance constraint,
// truncated Gaussian under a second-moment constraint).
double max_entropy_check(const CircularDistribution& candidate,
                         const CircularDistribution& reference);

// Inverse of V°(kappa) = 1 - I1(kappa)/I0(kappa); monotone bisection.
double von_mises_kappa_for_variance(double circular_variance);

// Wrap an angle into [-pi, pi).
double wrap_angle(double theta);

}  // namespace polarmi
