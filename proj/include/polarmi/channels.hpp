#pragma once

// Conditional output densities of the complex AWGN channel in polar
// coordinates (Rayleigh / Rice amplitude, Middleton phase), the partially
// coherent channel obtained by circularly convolving the phase conditional
// with a phase-noise density, and the effective-SNR reduction of white
// phase noise acting as spectral loss.

#include <optional>

#include "polarmi/dirstats.hpp"
#include "polarmi/numerics.hpp"

namespace polarmi {

struct Snr {
  double linear = 1.0;  // P_s / (2 * sigma_n^2)
  double db = 0.0;

  static Snr from_db(double db);
  static Snr from_linear(double linear);
};

struct ChannelSpec {
  // per-dimension AWGN variance sigma_n^2 (total complex noise power 2*sigma_n^2)
  double noise_variance_per_dim = 0.5;
  // i.i.d. multiplicative phase noise Y = X * exp(j*Theta) + N
  std::optional<CircularDistribution> phase_noise;
  // white phase noise folded into amplitude attenuation exp(-sigma2/2)
  std::optional<double> spectral_loss_sigma2;

  void validate() const;
  static ChannelSpec awgn(double noise_variance_per_dim);
};

// Density of |Y| when Y is zero-mean complex Gaussian with total power
// `total_power` (signal plus noise): 2y/T * exp(-y^2/T).
double rayleigh_pdf(double y_amp, double total_power);

// log of the Rice density of |Y| given |X| = x_amp over complex AWGN with
// per-dimension variance noise_var. Finite for all finite arguments (the
// Bessel factor is evaluated in scaled form), -inf at y_amp = 0.
double rice_log_pdf(double y_amp, double x_amp, double noise_var);

// Conditional phase density p(angle(Y) - angle(X) = theta | |X| = x_amp) for
// the AWGN channel; 2*pi-periodic, uniform at x_amp = 0.
double awgn_phase_pdf(double theta, double x_amp, double noise_var);

// awgn_phase_pdf sampled on an n-point grid and, when the channel carries
// multiplicative phase noise, circularly convolved with its density.
// Wrapped-Gaussian noise uses the closed-form Fourier attenuation; other
// kinds are sampled on the same grid. Result is normalized.
AngularGrid conditional_phase_grid(double x_amp, const ChannelSpec& channel, int n);

// SNR after replacing white phase noise of variance sigma2 by its coherent
// amplitude attenuation: linear SNR scales by exp(-sigma2).
Snr effective_snr_with_spectral_loss(const Snr& snr, double sigma2);

}  // namespace polarmi
