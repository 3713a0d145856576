// White-phase-noise spectral loss: analytic factors, the Monte Carlo
// oversampling simulator, and the fiber capacity application.
//
// Independent references used below:
//  - attenuation factor exp(-sigma^2/2): the simulator measures it from a
//    band-limited signal it has never seen in closed form;
//  - pre-filter aliasing floor: rotating by iid phases splits the signal
//    into a coherent part (power e^{-s^2}) and a spectrally white part
//    (power 1 - e^{-s^2}) spread over all `ov` bands, so the out-of-band to
//    in-band PSD ratio is (1-c)/(c*ov + (1-c)) with c = e^{-s^2};
//  - fiber peak: argmax of P*exp(-c P^2) is 1/sqrt(2c) = 3.2878866 dBm for
//    c = 1.1e5 (capacity is increasing in effective SNR, so the curve peaks
//    exactly where the effective SNR does).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "polarmi/channels.hpp"
#include "polarmi/decomp.hpp"
#include "polarmi/dirstats.hpp"
#include "polarmi/inputs.hpp"
#include "polarmi/spectral.hpp"

namespace {

double predicted_floor(double sigma, int ov) {
  const double c = std::exp(-sigma * sigma);
  return (1.0 - c) / (c * ov + (1.0 - c));
}

polarmi::SpectralSimConfig cfg(double sigma, int ov, int n,
                               std::uint64_t seed) {
  polarmi::SpectralSimConfig c;
  c.sigma = sigma;
  c.oversample = ov;
  c.n_symbols = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("autocorrelation of the rotated process is two-valued") {
  CHECK(polarmi::phase_noise_acf(1.0, true) == 1.0);
  CHECK(std::abs(polarmi::phase_noise_acf(1.0, false) - std::exp(-1.0)) <
        1e-15);
  CHECK(std::abs(polarmi::phase_noise_acf(1e-8, false) - 1.0) < 1e-12);
  CHECK(std::abs(polarmi::coherent_power_fraction(0.5) - std::exp(-0.25)) <
        1e-15);
  CHECK(polarmi::coherent_power_fraction(10.0) < 1e-43);
  const double kept = polarmi::coherent_power_fraction(0.7);
  CHECK(std::abs(kept + (1.0 - kept) - 1.0) < 1e-15);
  CHECK_THROWS_AS(polarmi::phase_noise_acf(0.0, true), std::invalid_argument);
  CHECK_THROWS_AS(polarmi::coherent_power_fraction(-1.0),
                  std::invalid_argument);
}

TEST_CASE("simulator reproduces the coherent attenuation factor") {
  const auto rep = polarmi::simulate_spectral_loss(cfg(1.0, 64, 50000, 1));
  CHECK(std::abs(rep.predicted_amp_attenuation - 0.60653065971263342) < 1e-15);
  CHECK(std::abs(rep.measured_amp_attenuation / rep.predicted_amp_attenuation -
                 1.0) < 0.01);
  CHECK(rep.measured_amp_attenuation > 0.0);
  CHECK(rep.measured_amp_attenuation <= 1.0);
  CHECK(rep.residual_phase_std >= 0.0);

  const auto mild = polarmi::simulate_spectral_loss(cfg(0.5, 64, 50000, 1));
  CHECK(std::abs(mild.measured_amp_attenuation - 0.8824969025845954) <
        0.01 * 0.8824969025845954);
}

TEST_CASE("simulator is deterministic per seed") {
  const auto a = polarmi::simulate_spectral_loss(cfg(1.0, 16, 20000, 7));
  const auto b = polarmi::simulate_spectral_loss(cfg(1.0, 16, 20000, 7));
  CHECK(a.measured_amp_attenuation == b.measured_amp_attenuation);
  CHECK(a.residual_phase_std == b.residual_phase_std);
  CHECK(a.aliasing_floor == b.aliasing_floor);
  const auto c = polarmi::simulate_spectral_loss(cfg(1.0, 16, 20000, 8));
  CHECK(a.measured_amp_attenuation != c.measured_amp_attenuation);
}

TEST_CASE("residual phase shrinks as the oversampling factor grows") {
  std::vector<double> stds;
  for (int ov : {8, 16, 32, 64})
    stds.push_back(
        polarmi::simulate_spectral_loss(cfg(1.0, ov, 20000, 3)).residual_phase_std);
  for (std::size_t i = 1; i < stds.size(); ++i) CHECK(stds[i] < stds[i - 1]);
  // each doubling of ov halves the out-of-band residual power
  CHECK(stds[0] / stds[3] > 2.0);
}

TEST_CASE("aliasing floor follows the coherent/spread power split") {
  for (int ov : {2, 8, 64}) {
    const auto rep = polarmi::simulate_spectral_loss(cfg(1.0, ov, 30000, 5));
    const double want = predicted_floor(1.0, ov);
    CHECK(std::abs(rep.aliasing_floor / want - 1.0) < 0.15);
  }
  const double f2 =
      polarmi::simulate_spectral_loss(cfg(1.0, 2, 30000, 5)).aliasing_floor;
  const double f64 =
      polarmi::simulate_spectral_loss(cfg(1.0, 64, 30000, 5)).aliasing_floor;
  CHECK(10.0 * std::log10(f2 / f64) >= 10.0);
}

TEST_CASE("simulator rejects bad configs") {
  CHECK_THROWS_AS(polarmi::simulate_spectral_loss(cfg(1.0, 1, 10000, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(polarmi::simulate_spectral_loss(cfg(1.0, 12, 10000, 1)),
                  std::invalid_argument);  // band edges must land on bins
  CHECK_THROWS_AS(polarmi::simulate_spectral_loss(cfg(0.0, 16, 10000, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(polarmi::simulate_spectral_loss(cfg(1.0, 16, 0, 1)),
                  std::invalid_argument);
}

TEST_CASE("closed-form capacity of the attenuated channel") {
  const auto snr = polarmi::Snr::from_db(20.0);
  CHECK(std::abs(polarmi::spectral_loss_capacity(snr, 0.0) -
                 std::log2(101.0)) < 1e-12);
  CHECK(std::abs(polarmi::spectral_loss_capacity(snr, 1.0) -
                 5.2398541246605925) < 1e-12);
  // deep roll-off: C -> snr_eff * log2(e)
  const double c = polarmi::spectral_loss_capacity(snr, 10.0);
  const double snr_eff = 100.0 * std::exp(-10.0);
  CHECK(std::abs(c / (snr_eff / std::numbers::ln2) - 1.0) < 0.01);
  CHECK_THROWS_AS(polarmi::spectral_loss_capacity(snr, -0.1),
                  std::invalid_argument);
}

TEST_CASE("fiber curve reduces to the AWGN ring decomposition at tiny c") {
  polarmi::FiberModelSpec spec;
  spec.c = 1e-12;
  spec.noise_variance_per_dim = 1.8e-6;
  spec.rings = 8;
  spec.power_grid = {1e-4, 5e-4};
  const auto curve = polarmi::fiber_capacity_curve(spec);
  REQUIRE(curve.size() == 2);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double p = spec.power_grid[i];
    const auto snr =
        polarmi::Snr::from_linear(p / (2.0 * spec.noise_variance_per_dim));
    const auto ref = polarmi::decompose(
        polarmi::make_rings(8, snr.linear * 2.0 * spec.noise_variance_per_dim),
        polarmi::ChannelSpec::awgn(spec.noise_variance_per_dim), snr);
    CHECK(std::abs(curve[i].cap_bits -
                   (ref.amplitude_term + ref.phase_term)) < 1e-6);
    CHECK(curve[i].power_w == p);
    CHECK(std::abs(curve[i].power_dbm - 10.0 * std::log10(p / 1e-3)) < 1e-12);
  }
}

TEST_CASE("fiber curve is unimodal with the peak at 1/sqrt(2c)") {
  polarmi::FiberModelSpec spec;
  spec.c = 1.1e5;
  spec.noise_variance_per_dim = 1.8e-6;
  spec.rings = 16;
  for (double dbm = -6.0; dbm <= 9.001; dbm += 0.5)
    spec.power_grid.push_back(1e-3 * std::pow(10.0, dbm / 10.0));
  const auto curve = polarmi::fiber_capacity_curve(spec);
  REQUIRE(curve.size() == spec.power_grid.size());

  std::size_t peak = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].cap_bits > curve[peak].cap_bits) peak = i;
  CHECK(std::abs(curve[peak].power_dbm - 3.2878866) < 0.5);
  for (std::size_t i = 1; i <= peak; ++i)
    CHECK(curve[i].cap_bits > curve[i - 1].cap_bits);
  for (std::size_t i = peak + 1; i < curve.size(); ++i)
    CHECK(curve[i].cap_bits < curve[i - 1].cap_bits);
  // effective SNR column is the attenuated budget
  for (const auto& pt : curve) {
    const double s2 = spec.c * pt.power_w * pt.power_w;
    const double want = pt.power_w * std::exp(-s2) /
                        (2.0 * spec.noise_variance_per_dim);
    CHECK(std::abs(pt.eff_snr_db - 10.0 * std::log10(want)) < 1e-9);
  }
}

TEST_CASE("iid-rotation reduction floors at the amplitude entropy") {
  // With negligible additive noise the per-sample-rotation model keeps the
  // full amplitude information no matter how strong the phase noise, while
  // the attenuation model sends the capacity to zero: the documented
  //   "capacity does not reduce with signal power"
  // caveat of the zero-noise limit.
  const double c = 1.1e5;
  const double p = 0.02;  // sigma^2 = c p^2 = 44: phase is fully scrambled
  const double nv = 1.8e-6;
  const auto snr = polarmi::Snr::from_linear(p / (2.0 * nv));
  polarmi::ChannelSpec ch = polarmi::ChannelSpec::awgn(nv);
  ch.phase_noise =
      polarmi::CircularDistribution::wrapped_gaussian(0.0, std::sqrt(c * p * p));
  const auto rot = polarmi::decompose(
      polarmi::make_rings(16, snr.linear * 2.0 * nv), ch, snr);
  CHECK(std::abs(rot.amplitude_term - 4.0) < 0.02);
  CHECK(std::abs(rot.phase_term) < 1e-6);
  CHECK(rot.sum > 3.9);
  const double folded = polarmi::spectral_loss_capacity(snr, c * p * p);
  CHECK(folded < 1e-3);
}

TEST_CASE("fiber spec validation") {
  polarmi::FiberModelSpec spec;
  spec.c = 1.1e5;
  spec.noise_variance_per_dim = 1.8e-6;
  spec.rings = 16;
  spec.power_grid = {2e-3, 1e-3};  // not increasing
  CHECK_THROWS_AS(polarmi::fiber_capacity_curve(spec), std::invalid_argument);
  spec.power_grid = {-1e-3, 1e-3};
  CHECK_THROWS_AS(polarmi::fiber_capacity_curve(spec), std::invalid_argument);
  spec.power_grid = {1e-3};
  spec.c = 0.0;
  CHECK_THROWS_AS(polarmi::fiber_capacity_curve(spec), std::invalid_argument);
  spec.c = 1.1e5;
  spec.rings = 0;
  CHECK_THROWS_AS(polarmi::fiber_capacity_curve(spec), std::invalid_argument);
}
