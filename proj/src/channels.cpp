#include "polarmi/channels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polarmi {

Snr Snr::from_db(double db) {
  if (!std::isfinite(db)) throw std::domain_error("Snr: db must be finite");
  return {std::pow(10.0, db / 10.0), db};
}

Snr Snr::from_linear(double linear) {
  if (!(linear > 0.0) || !std::isfinite(linear))
    throw std::domain_error("Snr: linear value must be positive and finite");
  return {linear, 10.0 * std::log10(linear)};
}

void ChannelSpec::validate() const {
  if (!(noise_variance_per_dim > 0.0) || !std::isfinite(noise_variance_per_dim))
    throw std::invalid_argument("ChannelSpec: noise_variance_per_dim must be > 0");
  if (spectral_loss_sigma2 && !(*spectral_loss_sigma2 >= 0.0))
    throw std::invalid_argument("ChannelSpec: spectral_loss_sigma2 must be >= 0");
}

ChannelSpec ChannelSpec::awgn(double noise_variance_per_dim) {
  ChannelSpec c;
  c.noise_variance_per_dim = noise_variance_per_dim;
  c.validate();
  return c;
}

double rayleigh_pdf(double y_amp, double total_power) {
  if (!(total_power > 0.0)) throw std::domain_error("rayleigh_pdf: total_power must be > 0");
  if (y_amp <= 0.0) return 0.0;
  return 2.0 * y_amp / total_power * std::exp(-y_amp * y_amp / total_power);
}

double rice_log_pdf(double y_amp, double x_amp, double noise_var) {
  if (!(noise_var > 0.0)) throw std::domain_error("rice_log_pdf: noise_var must be > 0");
  if (y_amp < 0.0 || x_amp < 0.0)
    throw std::domain_error("rice_log_pdf: amplitudes must be nonnegative");
  if (y_amp == 0.0) return -std::numeric_limits<double>::infinity();
  const double d = y_amp - x_amp;
  return std::log(y_amp / noise_var) - d * d / (2.0 * noise_var) +
         std::log(bessel_i0_scaled(x_amp * y_amp / noise_var));
}

double awgn_phase_pdf(double theta, double x_amp, double noise_var) {
  if (!(noise_var > 0.0)) throw std::domain_error("awgn_phase_pdf: noise_var must be > 0");
  if (x_amp < 0.0) throw std::domain_error("awgn_phase_pdf: x_amp must be nonnegative");
  const double a = x_amp / std::sqrt(2.0 * noise_var);
  if (a == 0.0) return 1.0 / kTwoPi;
  const double c = a * std::cos(theta);
  const double s = a * std::sin(theta);
  double p = std::exp(-a * a) / kTwoPi;
  if (c != 0.0) {
    // |c|/(2 sqrt(pi)) * exp(-s^2) * erfc(-c), combined in the log domain so
    // the two factors cannot underflow/overflow separately at high SNR
    const double mag =
        std::exp(std::log(std::abs(c) / (2.0 * std::sqrt(kPi))) - s * s + log_erfc(-c));
    p += c > 0.0 ? mag : -mag;
  }
  return std::max(0.0, p);
}

AngularGrid conditional_phase_grid(double x_amp, const ChannelSpec& channel, int n) {
  channel.validate();
  AngularGrid g = AngularGrid::uniform(n);
  for (int m = 0; m < n; ++m)
    g.values[m] = awgn_phase_pdf(g.angle(m), x_amp, channel.noise_variance_per_dim);
  if (!(g.total_mass() > 0.0))
    throw NumericalError("conditional_phase_grid: grid too coarse to resolve the conditional");
  g.normalize();
  if (channel.phase_noise) {
    const CircularDistribution& pn = *channel.phase_noise;
    switch (pn.kind()) {
      case CircularDistribution::Kind::Uniform:
        return AngularGrid::uniform(n);
      case CircularDistribution::Kind::WrappedGaussian:
        if (wrap_angle(pn.mu()) == 0.0) {
          g = convolve_with_wrapped_gaussian(g, pn.sigma());
          break;
        }
        [[fallthrough]];
      default:
        g = circular_convolve(g, pn.sample_grid(n));
    }
    g.normalize();
  }
  return g;
}

Snr effective_snr_with_spectral_loss(const Snr& snr, double sigma2) {
  if (!(sigma2 >= 0.0)) throw std::domain_error("effective_snr_with_spectral_loss: sigma2 < 0");
  return Snr::from_linear(snr.linear * std::exp(-sigma2));
}

}  // namespace polarmi
