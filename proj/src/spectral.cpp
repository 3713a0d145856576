#include "polarmi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "polarmi/decomp.hpp"
#include "polarmi/inputs.hpp"

namespace polarmi {

namespace {

constexpr int kChunk = 16384;  // samples per FFT block

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const SpectralSimConfig& cfg) {
  if (!(cfg.sigma > 0.0))
    throw std::invalid_argument("simulate_spectral_loss: sigma must be > 0");
  if (cfg.oversample < 2 || !is_pow2(cfg.oversample))
    throw std::invalid_argument(
        "simulate_spectral_loss: oversample must be a power of two >= 2 so "
        "the band edges land on FFT bins");
  if (cfg.oversample > kChunk / 2)
    throw std::invalid_argument(
        "simulate_spectral_loss: oversample exceeds the FFT block size");
  if (cfg.n_symbols < 1)
    throw std::invalid_argument(
        "simulate_spectral_loss: n_symbols must be >= 1");
}

}  // namespace

double phase_noise_acf(double sigma, bool tau_is_zero) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("phase_noise_acf: sigma must be > 0");
  return tau_is_zero ? 1.0 : std::exp(-sigma * sigma);
}

double coherent_power_fraction(double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("coherent_power_fraction: sigma must be > 0");
  return std::exp(-sigma * sigma);
}

SpectralLossReport simulate_spectral_loss(const SpectralSimConfig& cfg) {
  validate(cfg);
  const int L = kChunk;
  const int nb2 = L / (2 * cfg.oversample);  // one-sided band width in bins
  const auto in_band = [&](int k) { return std::min(k, L - k) < nb2; };
  const double synth_scale =
      static_cast<double>(L) / std::sqrt(2.0 * nb2 - 1.0);  // E|x_t|^2 = 1

  const long long total_samples =
      static_cast<long long>(cfg.n_symbols) * cfg.oversample;
  const int chunks = static_cast<int>((total_samples + L - 1) / L);

  Rng rng(cfg.seed);
  std::vector<std::complex<double>> x(L), y(L);
  double power_in = 0.0, power_rot = 0.0;
  double psd_in = 0.0, psd_out = 0.0;
  std::complex<double> num(0.0, 0.0);
  double den = 0.0;
  double wsum = 0.0, wphi = 0.0, wphi2 = 0.0;

  for (int chunk = 0; chunk < chunks; ++chunk) {
    // band-limited complex Gaussian block, flat spectrum over the band
    for (int k = 0; k < L; ++k)
      x[k] = in_band(k) ? synth_scale * rng.complex_normal()
                        : std::complex<double>(0.0, 0.0);
    fft_radix2(x, true);

    // iid phase rotation per sample (unitary)
    for (int t = 0; t < L; ++t) {
      const double theta = cfg.sigma * rng.normal();
      y[t] = x[t] * std::polar(1.0, theta);
      power_in += std::norm(x[t]);
      power_rot += std::norm(y[t]);
    }

    // spectrum before filtering: coherent band + aliased white remainder
    fft_radix2(y, false);
    for (int k = 0; k < L; ++k)
      (in_band(k) ? psd_in : psd_out) += std::norm(y[k]);

    // brick-wall filter, back to the time domain
    for (int k = 0; k < L; ++k)
      if (!in_band(k)) y[k] = 0.0;
    fft_radix2(y, true);

    for (int t = 0; t < L; ++t) {
      const std::complex<double> corr = y[t] * std::conj(x[t]);
      num += corr;
      den += std::norm(x[t]);
      const double w = std::norm(x[t]);
      const double phi = std::arg(corr);  // arg(0) == 0, weighted out anyway
      wsum += w;
      wphi += w * phi;
      wphi2 += w * phi * phi;
    }
  }

  if (std::abs(power_rot / power_in - 1.0) > 0.005) {
    std::ostringstream os;
    os << "simulate_spectral_loss: rotation changed total power by factor "
       << power_rot / power_in << "; the transform chain is inconsistent";
    throw NumericalError(os.str());
  }

  SpectralLossReport rep;
  rep.predicted_amp_attenuation = std::exp(-0.5 * cfg.sigma * cfg.sigma);
  rep.measured_amp_attenuation = std::abs(num) / den;
  const double mean_phi = wphi / wsum;
  rep.residual_phase_std =
      std::sqrt(std::max(0.0, wphi2 / wsum - mean_phi * mean_phi));
  const int n_in = 2 * nb2 - 1;
  rep.aliasing_floor = (psd_out / (L - n_in)) / (psd_in / n_in);
  return rep;
}

double spectral_loss_capacity(const Snr& snr, double sigma2) {
  if (sigma2 < 0.0)
    throw std::invalid_argument("spectral_loss_capacity: sigma2 must be >= 0");
  return std::log2(1.0 + snr.linear * std::exp(-sigma2));
}

std::vector<FiberPoint> fiber_capacity_curve(const FiberModelSpec& spec,
                                             const QuadratureSpec& quad) {
  if (!(spec.c > 0.0))
    throw std::invalid_argument("fiber_capacity_curve: c must be > 0");
  if (!(spec.noise_variance_per_dim > 0.0))
    throw std::invalid_argument(
        "fiber_capacity_curve: noise variance must be > 0");
  if (spec.rings < 1)
    throw std::invalid_argument("fiber_capacity_curve: rings must be >= 1");
  if (spec.power_grid.empty())
    throw std::invalid_argument("fiber_capacity_curve: empty power grid");
  for (std::size_t i = 0; i < spec.power_grid.size(); ++i) {
    if (!(spec.power_grid[i] > 0.0) ||
        (i > 0 && spec.power_grid[i] <= spec.power_grid[i - 1]))
      throw std::invalid_argument(
          "fiber_capacity_curve: power grid must be positive and strictly "
          "increasing");
  }

  const double nv = spec.noise_variance_per_dim;
  std::vector<FiberPoint> curve;
  curve.reserve(spec.power_grid.size());
  for (double p : spec.power_grid) {
    const double sigma2 = spec.c * p * p;
    const Snr raw = Snr::from_linear(p / (2.0 * nv));
    const Snr eff = effective_snr_with_spectral_loss(raw, sigma2);
    const double p_eff = eff.linear * 2.0 * nv;
    const DecompositionResult res =
        decompose(make_rings(spec.rings, p_eff), ChannelSpec::awgn(nv), eff,
                  quad);
    FiberPoint pt;
    pt.power_w = p;
    pt.power_dbm = 10.0 * std::log10(p / 1e-3);
    pt.eff_snr_db = eff.db;
    pt.cap_bits = res.amplitude_term + res.phase_term;
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace polarmi
