// Spectral loss of white phase noise.
//
// Rotating a band-limited signal by an iid phase per sample splits it into a
// coherent copy attenuated by exp(-sigma^2/2) and a spectrally white
// remainder; brick-wall filtering back to the signal band keeps the coherent
// part and 1/oversample of the remainder. simulate_spectral_loss measures the
// effect end to end; spectral_loss_capacity and fiber_capacity_curve apply
// the resulting power attenuation exp(-sigma^2), the latter with the
// phenomenological fiber law sigma^2 = c * P^2.
#pragma once

#include <cstdint>
#include <vector>

#include "polarmi/channels.hpp"
#include "polarmi/numerics.hpp"

namespace polarmi {

struct SpectralSimConfig {
  double sigma = 1.0;      // per-sample phase std, radians
  int oversample = 64;     // samples per symbol; power of two >= 2
  int n_symbols = 200000;  // symbols to simulate (rounded up to whole chunks)
  std::uint64_t seed = 1;
};

struct SpectralLossReport {
  double measured_amp_attenuation = 0.0;   // |<y x*>| / <|x|^2> after filtering
  double predicted_amp_attenuation = 0.0;  // exp(-sigma^2/2)
  double residual_phase_std = 0.0;         // weighted std of arg(y x*), radians
  double aliasing_floor = 0.0;  // out-of-band / in-band PSD before filtering
};

struct FiberModelSpec {
  double c = 1.1e5;                    // W^-2, phase-noise law sigma^2 = c P^2
  double noise_variance_per_dim = 1.8e-6;  // W (demo value, see README)
  int rings = 16;
  std::vector<double> power_grid;      // W, strictly increasing
};

struct FiberPoint {
  double power_w = 0.0;
  double power_dbm = 0.0;
  double eff_snr_db = 0.0;
  double cap_bits = 0.0;
};

// Autocorrelation of exp(j Theta_t), Theta iid N(0, sigma^2): 1 at lag zero,
// exp(-sigma^2) elsewhere. Throws std::invalid_argument for sigma <= 0.
double phase_noise_acf(double sigma, bool tau_is_zero);

// exp(-sigma^2): fraction of the power left in the coherent component; the
// complement is spread over the whole sampled bandwidth.
double coherent_power_fraction(double sigma);

// Synthesizes band-limited complex Gaussian noise at `oversample` samples
// per symbol, rotates every sample by an iid N(0, sigma^2) phase, brick-wall
// filters back to the symbol band, and reports the measured attenuation, the
// residual phase spread, and the pre-filter out-of-band PSD floor.
// Deterministic per seed. Throws std::invalid_argument on bad configs and
// NumericalError if the unitarity (power conservation) check fails.
SpectralLossReport simulate_spectral_loss(const SpectralSimConfig& cfg);

// log2(1 + snr * exp(-sigma2)): capacity of the attenuated AWGN channel.
double spectral_loss_capacity(const Snr& snr, double sigma2);

// Capacity curve of the fiber model: per power point, sigma^2 = c P^2 folds
// into an effective SNR, and the capacity estimate is the amplitude plus
// phase term of the ring-input decomposition at that SNR.
std::vector<FiberPoint> fiber_capacity_curve(const FiberModelSpec& spec,
                                             const QuadratureSpec& quad = {});

}  // namespace polarmi
