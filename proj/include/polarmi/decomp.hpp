#pragma once

// Polar decomposition of the mutual information of the complex AWGN channel,
// optionally with multiplicative phase noise. The chain rule applied to polar
// coordinates splits I(X;Y) exactly into
//
//   amplitude_term = I(|X|;|Y|)
//   phase_term     = I(angle X; angle Y | |X|)
//   mixed_term_1   = I(|X|; angle Y | |Y|)
//   mixed_term_2   = I(angle X; |Y| | |X|, angle Y)
//
// decompose() evaluates the four terms on shared quadrature grids; direct_mi()
// computes I(X;Y) by an independent route (output-plane quadrature for
// discrete inputs, radial quadrature plus a Monte Carlo cross-check for
// continuous ones) so the chain-rule identity can be verified end to end.
// All results are in bits per symbol.

#include <optional>
#include <vector>

#include "polarmi/channels.hpp"
#include "polarmi/inputs.hpp"
#include "polarmi/numerics.hpp"

namespace polarmi {

struct DecompositionResult {
  Snr snr{};
  double amplitude_term = 0.0;
  double phase_term = 0.0;
  double mixed_term_1 = 0.0;
  double mixed_term_2 = 0.0;
  double sum = 0.0;  // arithmetic sum of the four terms above
  // I(X;Y) from direct_mi when the caller filled it in (sweep does)
  std::optional<double> direct_total;
};

// Discretized conditional law of the channel in polar output coordinates.
//
// The radial axis carries a composite Gauss-Legendre rule (6-point panels of
// width ~sigma_n) so that the kink of the amplitude density at y=0 falls on a
// panel boundary; the phase axis is a uniform power-of-two grid. Input
// amplitudes become discrete levels: constellations and rings keep their exact
// radii, Gaussian and half-Gaussian amplitudes are replaced by 128
// Gauss-Legendre nodes mapped through the amplitude CDF. Each level's density
// lives on a radial window of +-(truncation+4) noise deviations around the
// level; raw window masses must be 1 within 1e-7 per slice and 1e-6 overall,
// otherwise the constructor throws NumericalError. Slices are then calibrated
// to unit mass so downstream identities hold exactly on the grid.
//
// Rows of the relative-phase conditional include the polar Jacobian, so plain
// weight*delta sums integrate them; multiplicative phase noise is applied
// spectrally per row and leaves slice masses unchanged.
class JointDensityGrid {
 public:
  JointDensityGrid(const InputSpec& input, const ChannelSpec& channel,
                   const Snr& snr, const QuadratureSpec& quad);

  // radial quadrature nodes/weights (composite Gauss-Legendre panels)
  int radial_points() const { return static_cast<int>(r_.size()); }
  double radius(int i) const { return r_[i]; }
  double radial_weight(int i) const { return wq_[i]; }
  double y_max() const { return y_max_; }
  int nodes_per_panel() const { return kNodesPerPanel; }

  int phase_points() const { return np_; }

  // discretized input amplitude distribution
  int level_count() const { return static_cast<int>(levels_.size()); }
  double level_amplitude(int l) const { return levels_[l].a; }
  double level_weight(int l) const { return levels_[l].w; }
  bool continuous_phase() const { return continuous_phase_; }
  const std::vector<double>& level_phases(int l) const {
    return levels_[l].phases;
  }
  const std::vector<double>& level_phase_probs(int l) const {
    return levels_[l].phase_probs;
  }

  // radial support window of level l as a node range [lo, hi)
  int window_lo(int l) const { return levels_[l].lo; }
  int window_hi(int l) const { return levels_[l].hi; }

  // raw quadrature mass of slice l before calibration
  double slice_mass(int l) const { return levels_[l].raw_mass; }
  // weighted sum of raw slice masses (total captured probability)
  double captured_mass() const { return captured_mass_; }

  // calibrated conditional amplitude density g_l(r_i); zero outside the window
  double amplitude_density(int l, int i) const;
  // output amplitude mixture sum_l w_l g_l on the full radial grid
  const std::vector<double>& amplitude_mixture() const { return gbar_; }

  // one radial row of the relative-phase conditional:
  // row[m] = f_l(r_i, -pi + m*dpsi), phase noise applied, slice-calibrated
  void conditional_row(int l, int i, std::vector<double>& row) const;

  // relative-phase conditional marginalized over |Y| (unit mass), i.e. the
  // row marginal sum_i wq_i * f_l(r_i, psi)
  AngularGrid phase_conditional(int l) const;

  bool has_phase_noise() const { return !noise_spectrum_.empty(); }
  double noise_var() const { return nv_; }

 private:
  struct Level {
    double a = 0.0;
    double w = 0.0;
    std::vector<double> phases;       // empty when phase is continuous
    std::vector<double> phase_probs;  // aligned with phases
    int lo = 0, hi = 0;               // radial node window
    std::vector<double> g;            // calibrated density on [lo, hi)
    double raw_mass = 0.0;
  };

  static constexpr int kNodesPerPanel = 6;

  void build_radial_grid(double power, double a_max, const QuadratureSpec& quad);
  void build_levels(const InputSpec& input);

  double nv_ = 0.5;
  double sigma_ = 1.0;  // sqrt(nv_)
  double y_max_ = 0.0;
  double panel_width_ = 0.0;
  int np_ = 0;
  bool continuous_phase_ = false;
  double captured_mass_ = 0.0;
  std::vector<double> r_, wq_;
  std::vector<double> gbar_;
  std::vector<Level> levels_;
  // per-bin attenuation of the phase-noise density (empty when none);
  // multiplying a row's FFT by it performs the circular convolution
  std::vector<std::complex<double>> noise_spectrum_;
  std::vector<double> cos_table_;  // cos(psi_m) for row construction
};

// Evaluate the four-term decomposition. The input's power must equal
// snr.linear * 2 * channel.noise_variance_per_dim (throws
// std::invalid_argument otherwise); channels carrying spectral_loss_sigma2
// must be folded into an effective SNR first (also invalid_argument).
// Grid-resolution failures surface as NumericalError.
DecompositionResult decompose(const InputSpec& input,
                              const ChannelSpec& channel, const Snr& snr,
                              const QuadratureSpec& quad = {});

// I(X;Y) in bits by a route independent of decompose(): log-sum-exp
// quadrature over the output plane for discrete inputs without phase noise;
// a single relative-entropy quadrature in polar coordinates when phase noise
// is present; for continuous-amplitude inputs a fine quantile rule for the
// output mixture plus (without phase noise) a seeded Monte Carlo cross-check
// that throws NumericalError if quadrature and sampling disagree by more than
// max(0.02 bits, 8 standard errors).
double direct_mi(const InputSpec& input, const ChannelSpec& channel,
                 const Snr& snr, const QuadratureSpec& quad = {});

// High-SNR closed forms, bits. For a Gaussian input the amplitude and phase
// terms approach (1/2)log2(SNR) -/+ c with c = (1/2)log2(pi) - (1+gamma)/
// (2 ln 2) + 1 ~ 0.688; their sum is exactly log2(SNR). A single continuous-
// phase ring approaches (1/2)log2(4*pi*SNR/e); the amplitude-only channel
// with optimal (half-Gaussian) amplitude approaches (1/2)log2(SNR) - 1/2.
double gaussian_amplitude_asymptote(const Snr& snr);
double gaussian_phase_asymptote(const Snr& snr);
double psk_phase_asymptote(const Snr& snr);
double noncoherent_asymptote(const Snr& snr);

// decompose + direct_mi per grid point, input rescaled to the power implied
// by each SNR. Results keep grid order. Failures are rethrown with the
// offending SNR named in the message.
std::vector<DecompositionResult> sweep(const InputSpec& input,
                                       const ChannelSpec& channel,
                                       const std::vector<Snr>& grid,
                                       const QuadratureSpec& quad = {});

}  // namespace polarmi
