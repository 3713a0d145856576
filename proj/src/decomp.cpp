// Implementation notes.
//
// Everything is assembled from slice-calibrated conditional densities on
// shared grids, so the structural zeros of the decomposition (no amplitude
// information in a single-level input, no phase information in a
// single-phase-per-level input, no |X| -> angle(Y) leakage for circularly
// symmetric inputs) come out of the float arithmetic exactly, not just
// small: the paired accumulations below are written so that the cancelling
// sums are performed bit-identically.
//
// Term assembly, in nats until the final conversion (w = level weight,
// g = |Y| density given the level, q/m = relative/absolute phase marginals,
// f = relative-phase joint, A = absolute-phase joint mixed over the level's
// phase set, pbar/gbar = output mixtures):
//
//   amplitude = sum_l w [int g_l ln(g_l/gbar)]
//   phase     = sum_l w [int q_l ln q_l - int m_l ln m_l]
//   mixed1    = sum_l w [int A_l ln A_l - int A_l ln g_l]
//               - [int pbar ln pbar - int pbar ln gbar]
//   mixed2    = sum_l w [(int f_l ln f_l - int A_l ln A_l)
//                        + (int m_l ln m_l - int q_l ln q_l)]
//
// For uniform-phase levels A_l = g_l/(2 pi) analytically, which collapses
// phase/mixed1/mixed2 to one-dimensional radial sums; without phase noise
// the remaining angular integrals have closed forms in the scaled Bessel
// ratio, so the continuous no-noise path never touches a 2-D grid.

#include "polarmi/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polarmi {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr int kMaxRadialNodes = 16384;
constexpr int kMaxPhasePoints = 32768;
constexpr int kDecomposeLevels = 128;     // amplitude rule inside decompose()
constexpr int kDirectLevels = 1024;       // amplitude rule inside direct_mi()
constexpr int kDirectLevelsNoisy = 256;   // ... when every level needs 2-D rows
constexpr int kOutputPlaneCap = 8192;     // per-axis cap of the Cartesian rule

double xlnx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// The two paired accumulators below are used for both the per-level rows and
// the output-mixture rows; keeping them as the single shared loop is what
// makes the single-level cancellations exact.
double xlnx_sum(const double* v, int n) {
  double s = 0.0;
  for (int m = 0; m < n; ++m)
    if (v[m] > 0.0) s += v[m] * std::log(v[m]);
  return s;
}

double plain_sum(const double* v, int n) {
  double s = 0.0;
  for (int m = 0; m < n; ++m) s += v[m];
  return s;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Inverse error function (Winitzki seed + Newton on std::erf); the quantile
// maps only need it well inside (0, 1), where three steps reach full
// precision.
double erf_inv(double y) {
  const double a = 0.147;
  const double l = std::log1p(-y * y);
  const double t = 2.0 / (kPi * a) + 0.5 * l;
  double x = std::sqrt(std::sqrt(t * t - l / a) - t);
  for (int it = 0; it < 3; ++it)
    x -= (std::erf(x) - y) * 0.5 * std::sqrt(kPi) * std::exp(x * x);
  return x;
}

// F^{-1}(u) of the input amplitude law for the continuous families
double amplitude_quantile(const InputSpec& input, double u) {
  if (input.kind == InputSpec::Kind::GaussianComplex)
    return std::sqrt(-input.power * std::log1p(-u));  // Rayleigh, E a^2 = P
  return std::sqrt(2.0 * input.power) * erf_inv(u);   // half-Gaussian
}

struct LevelRule {
  std::vector<double> a, w;
};

LevelRule quantile_levels_gl(const InputSpec& input, int n) {
  LevelRule out;
  std::vector<double> u;
  gauss_legendre_01(n, u, out.w);
  out.a.resize(n);
  for (int i = 0; i < n; ++i) out.a[i] = amplitude_quantile(input, u[i]);
  return out;
}

LevelRule quantile_levels_midpoint(const InputSpec& input, int n) {
  LevelRule out;
  out.a.resize(n);
  out.w.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i)
    out.a[i] = amplitude_quantile(input, (i + 0.5) / n);
  return out;
}

struct RadialRule {
  double y_max = 0.0;
  double panel_width = 0.0;
  std::vector<double> r, wq;
};

// Composite Gauss-Legendre panels of width <= sigma_n on [0, y_max]; the
// derivative kink of amplitude densities at y = 0 then sits on a panel
// boundary and per-slice masses come out at ~1e-12. Past the node cap the
// panels widen and the slice-mass checks report the failure.
RadialRule build_radial_rule(double power, double a_max, double nv,
                             const QuadratureSpec& quad) {
  RadialRule rule;
  const double sigma = std::sqrt(nv);
  const double trunc = quad.amp_truncation_sigmas;
  rule.y_max = std::max(trunc * std::sqrt(power + 2.0 * nv),
                        a_max + (trunc + 4.0) * sigma) +
               2.0 * sigma;
  int panels = std::max((quad.amp_points + 5) / 6,
                        static_cast<int>(std::ceil(rule.y_max / sigma)));
  panels = std::min(panels, kMaxRadialNodes / 6);
  rule.panel_width = rule.y_max / panels;
  std::vector<double> gn, gw;
  gauss_legendre_01(6, gn, gw);
  rule.r.resize(static_cast<std::size_t>(panels) * 6);
  rule.wq.resize(rule.r.size());
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < 6; ++j) {
      rule.r[p * 6 + j] = (p + gn[j]) * rule.panel_width;
      rule.wq[p * 6 + j] = gw[j] * rule.panel_width;
    }
  }
  return rule;
}

void check_request(const InputSpec& input, const ChannelSpec& channel,
                   const Snr& snr, const QuadratureSpec& quad) {
  channel.validate();
  quad.validate();
  input.validate();
  if (channel.spectral_loss_sigma2.has_value())
    throw std::invalid_argument(
        "decompose/direct_mi: channel carries spectral_loss_sigma2; fold it "
        "via effective_snr_with_spectral_loss and pass a plain channel");
  const double want = snr.linear * 2.0 * channel.noise_variance_per_dim;
  if (std::abs(input.power - want) > 1e-9 * std::max(input.power, want)) {
    std::ostringstream os;
    os << "input power " << input.power << " does not match snr * 2 * nv = "
       << want << "; rescale the input (see InputSpec::with_power)";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// JointDensityGrid

void JointDensityGrid::build_levels(const InputSpec& input) {
  if (input.kind == InputSpec::Kind::GaussianComplex ||
      input.kind == InputSpec::Kind::HalfGaussianAmplitude) {
    continuous_phase_ = true;
    LevelRule rule = quantile_levels_gl(input, kDecomposeLevels);
    levels_.resize(rule.a.size());
    for (std::size_t l = 0; l < rule.a.size(); ++l) {
      levels_[l].a = rule.a[l];
      levels_[l].w = rule.w[l];
    }
    return;
  }
  PolarStructure ps = polar_structure(input);
  continuous_phase_ = ps.continuous_phase;
  levels_.resize(ps.amplitude_levels.size());
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    levels_[l].a = ps.amplitude_levels[l];
    levels_[l].w = ps.level_probs[l];
    levels_[l].phases = std::move(ps.phases_per_level[l]);
    levels_[l].phase_probs = std::move(ps.phase_probs_per_level[l]);
  }
}

void JointDensityGrid::build_radial_grid(double power, double a_max,
                                         const QuadratureSpec& quad) {
  RadialRule rule = build_radial_rule(power, a_max, nv_, quad);
  y_max_ = rule.y_max;
  panel_width_ = rule.panel_width;
  r_ = std::move(rule.r);
  wq_ = std::move(rule.wq);
}

JointDensityGrid::JointDensityGrid(const InputSpec& input,
                                   const ChannelSpec& channel, const Snr&,
                                   const QuadratureSpec& quad) {
  channel.validate();
  quad.validate();
  input.validate();
  if (channel.spectral_loss_sigma2.has_value())
    throw std::invalid_argument(
        "JointDensityGrid: fold spectral_loss_sigma2 into an effective SNR "
        "before building the grid");
  nv_ = channel.noise_variance_per_dim;
  sigma_ = std::sqrt(nv_);

  build_levels(input);
  double a_max = 0.0;
  for (const Level& lv : levels_) a_max = std::max(a_max, lv.a);
  build_radial_grid(input.power, a_max, quad);

  // phase bins: power of two (spectral row ops), >= 3 bins per angular
  // standard deviation of the sharpest row
  np_ = next_pow2(std::max(quad.phase_points, 16));
  const double np_needed = 6.0 * kPi * a_max / sigma_;
  while (static_cast<double>(np_) < np_needed) {
    if (np_ >= kMaxPhasePoints) {
      std::ostringstream os;
      os << "JointDensityGrid: resolving the phase conditional at amplitude "
         << a_max << " needs " << np_needed << " bins, cap is "
         << kMaxPhasePoints;
      throw NumericalError(os.str());
    }
    np_ <<= 1;
  }
  cos_table_.resize(np_);
  const double dpsi = kTwoPi / np_;
  for (int m = 0; m < np_; ++m) cos_table_[m] = std::cos(-kPi + m * dpsi);

  if (channel.phase_noise.has_value()) {
    const CircularDistribution& pn = *channel.phase_noise;
    noise_spectrum_.assign(np_, std::complex<double>(0.0, 0.0));
    if (pn.kind() == CircularDistribution::Kind::Uniform) {
      noise_spectrum_[0] = 1.0;
    } else if (pn.kind() == CircularDistribution::Kind::WrappedGaussian) {
      const double s2 = pn.sigma() * pn.sigma();
      for (int k = 0; k < np_; ++k) {
        const double ks = k <= np_ / 2 ? k : k - np_;
        noise_spectrum_[k] =
            std::polar(std::exp(-0.5 * s2 * ks * ks), -ks * pn.mu());
      }
      noise_spectrum_[np_ / 2] = noise_spectrum_[np_ / 2].real();
    } else {
      AngularGrid pg = pn.sample_grid(np_);
      std::vector<std::complex<double>> buf(np_);
      for (int j = 0; j < np_; ++j)
        buf[j] = pg.values[(j + np_ / 2) % np_];  // re-index to start at 0
      fft_radix2(buf, false);
      // dividing by the DC bin pins the density's quadrature mass to 1, so
      // the convolution preserves every row's mass
      for (int k = 0; k < np_; ++k) noise_spectrum_[k] = buf[k] / buf[0];
    }
  }

  // per-level amplitude slices on their radial windows
  gbar_.assign(r_.size(), 0.0);
  const int panels = static_cast<int>(r_.size()) / kNodesPerPanel;
  const double hw = (quad.amp_truncation_sigmas + 4.0) * sigma_;
  captured_mass_ = 0.0;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    Level& lv = levels_[l];
    const int plo = std::max(
        0, static_cast<int>(std::floor((lv.a - hw) / panel_width_)));
    const int phi = std::min(
        panels, static_cast<int>(std::ceil((lv.a + hw) / panel_width_)));
    lv.lo = plo * kNodesPerPanel;
    lv.hi = phi * kNodesPerPanel;
    lv.g.resize(lv.hi - lv.lo);
    double mass = 0.0;
    for (int i = lv.lo; i < lv.hi; ++i) {
      const double g = std::exp(rice_log_pdf(r_[i], lv.a, nv_));
      lv.g[i - lv.lo] = g;
      mass += wq_[i] * g;
    }
    lv.raw_mass = mass;
    if (!(std::abs(mass - 1.0) <= 1e-7)) {
      std::ostringstream os;
      os << "JointDensityGrid: slice mass at amplitude level " << l << " (a="
         << lv.a << ") is " << mass << "; the radial rule (panel width "
         << panel_width_ / sigma_
         << " noise deviations) cannot resolve this channel";
      throw NumericalError(os.str());
    }
    const double scale = 1.0 / mass;
    for (double& g : lv.g) g *= scale;
    for (int i = lv.lo; i < lv.hi; ++i) gbar_[i] += lv.w * lv.g[i - lv.lo];
    captured_mass_ += lv.w * mass;
  }
  if (captured_mass_ < 1.0 - 1e-6) {
    std::ostringstream os;
    os << "JointDensityGrid: captured probability mass " << captured_mass_
       << " is short of 1";
    throw NumericalError(os.str());
  }
}

double JointDensityGrid::amplitude_density(int l, int i) const {
  const Level& lv = levels_[l];
  if (i < lv.lo || i >= lv.hi) return 0.0;
  return lv.g[i - lv.lo];
}

void JointDensityGrid::conditional_row(int l, int i,
                                       std::vector<double>& row) const {
  const Level& lv = levels_[l];
  row.assign(np_, 0.0);
  if (i < lv.lo || i >= lv.hi) return;
  const double r = r_[i];
  const double u =
      std::log(r) - std::log(kTwoPi * nv_) - (r - lv.a) * (r - lv.a) / (2.0 * nv_);
  const double t = r * lv.a / nv_;
  for (int m = 0; m < np_; ++m)
    row[m] = std::exp(u + t * (cos_table_[m] - 1.0));
  if (!noise_spectrum_.empty()) {
    std::vector<std::complex<double>> buf(row.begin(), row.end());
    fft_radix2(buf, false);
    for (int k = 0; k < np_; ++k) buf[k] *= noise_spectrum_[k];
    fft_radix2(buf, true);
    for (int m = 0; m < np_; ++m) row[m] = std::max(buf[m].real(), 0.0);
  }
  const double scale = 1.0 / lv.raw_mass;
  for (double& v : row) v *= scale;
}

AngularGrid JointDensityGrid::phase_conditional(int l) const {
  AngularGrid out;
  out.values.assign(np_, 0.0);
  std::vector<double> row;
  for (int i = levels_[l].lo; i < levels_[l].hi; ++i) {
    conditional_row(l, i, row);
    for (int m = 0; m < np_; ++m) out.values[m] += wq_[i] * row[m];
  }
  return out;
}

// ---------------------------------------------------------------------------
// term assembly

namespace {

double amplitude_term_nats(const JointDensityGrid& g) {
  const std::vector<double>& gbar = g.amplitude_mixture();
  double amp = 0.0;
  for (int l = 0; l < g.level_count(); ++l) {
    double acc = 0.0;
    for (int i = g.window_lo(l); i < g.window_hi(l); ++i) {
      const double gl = g.amplitude_density(l, i);
      if (gl > 0.0) acc += g.radial_weight(i) * gl * std::log(gl / gbar[i]);
    }
    amp += g.level_weight(l) * acc;
  }
  return amp;
}

// For uniform-phase levels the absolute-phase conditional is g/(2 pi), so
// both relative entropies in mixed1 reduce to ln(2 pi) times the same
// quadrature mass, summed level-wise vs. mixture-wise; the result is zero to
// accumulation order.
double continuous_m1_nats(const JointDensityGrid& g) {
  const std::vector<double>& gbar = g.amplitude_mixture();
  double sbar = 0.0;
  for (int i = 0; i < g.radial_points(); ++i)
    sbar += g.radial_weight(i) * gbar[i];
  double sw = 0.0;
  for (int l = 0; l < g.level_count(); ++l) {
    double acc = 0.0;
    for (int i = g.window_lo(l); i < g.window_hi(l); ++i)
      acc += g.radial_weight(i) * g.amplitude_density(l, i);
    sw += g.level_weight(l) * acc;
  }
  return std::log(kTwoPi) * (sbar - sw);
}

// no phase noise: int f ln f reduces over the angle to
// g * (u - t + t I1/I0), and ln g = u + ln(2 pi I0 e^{-t}) cancels the
// radial singularity, leaving the smooth Bessel-ratio integrand below
void continuous_clean_phase_m2(const JointDensityGrid& g,
                               const ChannelSpec& channel, double& phase,
                               double& m2) {
  const int np = g.phase_points();
  const double dpsi = kTwoPi / np;
  const double ln2pi = std::log(kTwoPi);
  phase = 0.0;
  m2 = 0.0;
  for (int l = 0; l < g.level_count(); ++l) {
    const double a = g.level_amplitude(l);
    AngularGrid q = conditional_phase_grid(a, channel, np);
    double eq = 0.0;
    for (int m = 0; m < np; ++m) eq += xlnx(q.values[m]);
    eq *= dpsi;
    double acc = 0.0;
    for (int i = g.window_lo(l); i < g.window_hi(l); ++i) {
      const double t = g.radius(i) * a / g.noise_var();
      const double i0 = bessel_i0_scaled(t);
      const double ratio = bessel_i1_scaled(t) / i0;
      acc += g.radial_weight(i) * g.amplitude_density(l, i) *
             (t * (ratio - 1.0) - std::log(i0) - ln2pi);
    }
    phase += g.level_weight(l) * (ln2pi + eq);
    m2 += g.level_weight(l) * (acc - eq);
  }
}

void continuous_noisy_phase_m2(const JointDensityGrid& g, double& phase,
                               double& m2) {
  const int np = g.phase_points();
  const double dpsi = kTwoPi / np;
  const double ln2pi = std::log(kTwoPi);
  phase = 0.0;
  m2 = 0.0;
  std::vector<double> row, q(np);
  for (int l = 0; l < g.level_count(); ++l) {
    std::fill(q.begin(), q.end(), 0.0);
    double eff = 0.0, eg = 0.0;
    for (int i = g.window_lo(l); i < g.window_hi(l); ++i) {
      g.conditional_row(l, i, row);
      const double wq = g.radial_weight(i);
      eff += wq * xlnx_sum(row.data(), np);
      for (int m = 0; m < np; ++m) q[m] += wq * row[m];
      eg += wq * xlnx(g.amplitude_density(l, i));
    }
    const double eq = dpsi * xlnx_sum(q.data(), np);
    phase += g.level_weight(l) * (ln2pi + eq);
    m2 += g.level_weight(l) * (dpsi * eff - eq - eg);
  }
}

struct DiscreteTerms {
  double amp = 0.0, phase = 0.0, m1 = 0.0, m2 = 0.0;
  double direct = 0.0;  // E[int f ln f] - int pbar ln pbar, same grid
};

DiscreteTerms discrete_terms(const JointDensityGrid& g) {
  const int np = g.phase_points();
  const int mask = np - 1;
  const double dpsi = kTwoPi / np;
  const int nr = g.radial_points();
  const std::vector<double>& gbar = g.amplitude_mixture();

  // compact row storage for the output mixture over the union of windows
  std::vector<int> compact(nr, -1);
  int nunion = 0;
  for (int i = 0; i < nr; ++i) {
    for (int l = 0; l < g.level_count(); ++l) {
      if (i >= g.window_lo(l) && i < g.window_hi(l)) {
        compact[i] = nunion++;
        break;
      }
    }
  }
  std::vector<double> pbar(static_cast<std::size_t>(nunion) * np, 0.0);

  DiscreteTerms out;
  double m1_levels = 0.0, eff_weighted = 0.0;
  std::vector<double> row, arow(np), qm(np), mm(np);
  std::vector<std::complex<double>> ramp, buf;
  std::vector<int> shifts;

  for (int l = 0; l < g.level_count(); ++l) {
    const double w = g.level_weight(l);
    const std::vector<double>& phs = g.level_phases(l);
    const std::vector<double>& pps = g.level_phase_probs(l);

    // rotation plan: integer-bin index shifts when the phase set lives on
    // the grid, otherwise one spectral pass against a mixture of ramps
    bool integer_ok = true;
    shifts.assign(phs.size(), 0);
    for (std::size_t k = 0; k < phs.size(); ++k) {
      const double s = phs[k] / dpsi;
      const double r = std::round(s);
      if (std::abs(s - r) > 1e-9) {
        integer_ok = false;
        break;
      }
      shifts[k] = ((static_cast<int>(r) % np) + np) % np;
    }
    if (!integer_ok) {
      ramp.assign(np, std::complex<double>(0.0, 0.0));
      for (int k = 0; k < np; ++k) {
        const double ks = k <= np / 2 ? k : k - np;
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t p = 0; p < phs.size(); ++p)
          acc += pps[p] * std::polar(1.0, -ks * phs[p]);
        ramp[k] = acc;
      }
      ramp[np / 2] = ramp[np / 2].real();
    }

    std::fill(qm.begin(), qm.end(), 0.0);
    std::fill(mm.begin(), mm.end(), 0.0);
    double eff = 0.0, eaa = 0.0, eag = 0.0, aacc = 0.0;
    for (int i = g.window_lo(l); i < g.window_hi(l); ++i) {
      const double wq = g.radial_weight(i);
      g.conditional_row(l, i, row);
      eff += wq * xlnx_sum(row.data(), np);
      for (int m = 0; m < np; ++m) qm[m] += wq * row[m];

      if (integer_ok) {
        std::fill(arow.begin(), arow.end(), 0.0);
        for (std::size_t k = 0; k < shifts.size(); ++k) {
          const double pk = pps[k];
          const int sk = shifts[k];
          for (int m = 0; m < np; ++m)
            arow[m] += pk * row[(m - sk + np) & mask];
        }
      } else {
        buf.assign(row.begin(), row.end());
        fft_radix2(buf, false);
        for (int k = 0; k < np; ++k) buf[k] *= ramp[k];
        fft_radix2(buf, true);
        for (int m = 0; m < np; ++m) arow[m] = std::max(buf[m].real(), 0.0);
      }

      eaa += wq * xlnx_sum(arow.data(), np);
      const double gl = g.amplitude_density(l, i);
      if (gl > 0.0) eag += wq * plain_sum(arow.data(), np) * std::log(gl);
      for (int m = 0; m < np; ++m) mm[m] += wq * arow[m];
      double* pr = &pbar[static_cast<std::size_t>(compact[i]) * np];
      for (int m = 0; m < np; ++m) pr[m] += w * arow[m];

      if (gl > 0.0) aacc += wq * gl * std::log(gl / gbar[i]);
    }
    const double eq = dpsi * xlnx_sum(qm.data(), np);
    const double em = dpsi * xlnx_sum(mm.data(), np);
    out.amp += w * aacc;
    out.phase += w * (eq - em);
    out.m2 += w * (dpsi * (eff - eaa) + (em - eq));
    m1_levels += w * (eaa - eag);
    eff_weighted += w * eff;
  }

  // output-mixture pass, same loop shape as the per-level one above
  double epp = 0.0, epg = 0.0;
  for (int i = 0; i < nr; ++i) {
    if (compact[i] < 0) continue;
    const double wq = g.radial_weight(i);
    const double* pr = &pbar[static_cast<std::size_t>(compact[i]) * np];
    epp += wq * xlnx_sum(pr, np);
    if (gbar[i] > 0.0) epg += wq * plain_sum(pr, np) * std::log(gbar[i]);
  }
  out.m1 = dpsi * (m1_levels - (epp - epg));
  out.direct = dpsi * (eff_weighted - epp);
  return out;
}

// ---------------------------------------------------------------------------
// direct MI routes

// Cartesian midpoint rule over the output plane; h(Y|X) is the Gaussian
// entropy, so only h(Y) needs quadrature.
double direct_discrete_clean(const InputSpec& input, const ChannelSpec& ch,
                             const QuadratureSpec& quad) {
  const double nv = ch.noise_variance_per_dim;
  const double sigma = std::sqrt(nv);
  double ext = 0.0;
  for (const std::complex<double>& z : input.points)
    ext = std::max(ext, std::max(std::abs(z.real()), std::abs(z.imag())));
  const double bound = ext + (quad.amp_truncation_sigmas + 2.0) * sigma;
  int n = static_cast<int>(std::ceil(8.0 * bound / sigma));
  n = std::min(n, kOutputPlaneCap);
  const double h = 2.0 * bound / n;
  const int npts = static_cast<int>(input.points.size());
  const double norm = 1.0 / (kTwoPi * nv);

  std::vector<double> wrow(npts);
  double mass = 0.0, hy = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y2 = -bound + (iy + 0.5) * h;
    for (int j = 0; j < npts; ++j) {
      const double d = y2 - input.points[j].imag();
      wrow[j] = input.probs[j] * norm * std::exp(-d * d / (2.0 * nv));
    }
    for (int ix = 0; ix < n; ++ix) {
      const double y1 = -bound + (ix + 0.5) * h;
      double p = 0.0;
      for (int j = 0; j < npts; ++j) {
        const double d = y1 - input.points[j].real();
        p += wrow[j] * std::exp(-d * d / (2.0 * nv));
      }
      mass += p;
      hy -= xlnx(p);
    }
  }
  mass *= h * h;
  hy *= h * h;
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "direct_mi: output-plane mass " << mass << " (grid " << n << "x" << n
       << ") is not 1";
    throw NumericalError(os.str());
  }
  return (hy - std::log(kTwoPi * std::numbers::e * nv)) / kLn2;
}

LevelRule direct_levels(const InputSpec& input, int n_quantile) {
  if (input.kind == InputSpec::Kind::ContinuousRings) {
    LevelRule out;
    out.a = input.radii;
    out.w = input.probs;
    return out;
  }
  return quantile_levels_midpoint(input, n_quantile);
}

// radial quadrature of the output amplitude mixture; h(Y|X) is again exact,
// and a seeded Monte Carlo pass over the true channel guards the result
double direct_continuous_clean(const InputSpec& input, const ChannelSpec& ch,
                               const QuadratureSpec& quad) {
  const double nv = ch.noise_variance_per_dim;
  const double sigma = std::sqrt(nv);
  LevelRule lv = direct_levels(input, kDirectLevels);
  const int nl = static_cast<int>(lv.a.size());
  double a_max = 0.0;
  for (double a : lv.a) a_max = std::max(a_max, a);
  RadialRule rule = build_radial_rule(input.power, a_max, nv, quad);
  const int nr = static_cast<int>(rule.r.size());

  std::vector<double> gbar(nr, 0.0);
  for (int k = 0; k < nl; ++k)
    for (int i = 0; i < nr; ++i)
      gbar[i] += lv.w[k] * std::exp(rice_log_pdf(rule.r[i], lv.a[k], nv));
  double mass = 0.0, hy = 0.0;
  for (int i = 0; i < nr; ++i) {
    mass += rule.wq[i] * gbar[i];
    if (gbar[i] > 0.0)
      hy -= rule.wq[i] * gbar[i] *
            (std::log(gbar[i]) - std::log(kTwoPi * rule.r[i]));
  }
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "direct_mi: output amplitude mass " << mass << " is not 1";
    throw NumericalError(os.str());
  }
  const double quad_bits =
      (hy - std::log(kTwoPi * std::numbers::e * nv)) / kLn2;

  // Monte Carlo cross-check on the untouched channel law. ln pbar is
  // tabulated on a sigma/8 grid (it is smooth; the polar Jacobian is kept
  // out of the table) and interpolated linearly.
  const double dt = sigma / 8.0;
  const int nt = static_cast<int>(std::ceil(rule.y_max / dt)) + 2;
  std::vector<double> lnp(nt);
  std::vector<double> expo(nl);
  for (int j = 0; j < nt; ++j) {
    const double r = j * dt;
    double peak = -1e300;
    for (int k = 0; k < nl; ++k) {
      const double t = r * lv.a[k] / nv;
      expo[k] = std::log(lv.w[k]) - std::log(kTwoPi * nv) -
                (r - lv.a[k]) * (r - lv.a[k]) / (2.0 * nv) +
                std::log(bessel_i0_scaled(t));
      peak = std::max(peak, expo[k]);
    }
    double s = 0.0;
    for (int k = 0; k < nl; ++k) s += std::exp(expo[k] - peak);
    lnp[j] = peak + std::log(s);
  }

  const int nmc = static_cast<int>(quad.mc_samples);
  std::vector<std::complex<double>> xs = sample(input, nmc, quad.seed);
  Rng noise(quad.seed ^ 0x9e3779b97f4a7c15ULL);
  const double lf0 = -std::log(kTwoPi * nv);
  double s1 = 0.0, s2 = 0.0;
  for (int s = 0; s < nmc; ++s) {
    const double z1 = noise.normal();
    const double z2 = noise.normal();
    const double re = xs[s].real() + sigma * z1;
    const double im = xs[s].imag() + sigma * z2;
    const double r = std::hypot(re, im);
    const double pos = r / dt;
    int j = static_cast<int>(pos);
    j = std::min(j, nt - 2);
    const double frac = pos - j;
    const double lp = lnp[j] * (1.0 - frac) + lnp[j + 1] * frac;
    const double d = lf0 - 0.5 * (z1 * z1 + z2 * z2) - lp;
    s1 += d;
    s2 += d * d;
  }
  const double mc_mean = s1 / nmc;
  const double mc_var = std::max(0.0, s2 / nmc - mc_mean * mc_mean);
  const double mc_bits = mc_mean / kLn2;
  const double se_bits = std::sqrt(mc_var / nmc) / kLn2;
  if (std::abs(quad_bits - mc_bits) > std::max(0.02, 8.0 * se_bits)) {
    std::ostringstream os;
    os << "direct_mi: quadrature " << quad_bits << " and Monte Carlo "
       << mc_bits << " +- " << se_bits << " bits disagree";
    throw NumericalError(os.str());
  }
  return quad_bits;
}

double direct_continuous_noisy(const InputSpec& input, const ChannelSpec& ch,
                               const Snr& snr, const QuadratureSpec& quad) {
  InputSpec synth;
  if (input.kind == InputSpec::Kind::ContinuousRings) {
    synth = input;
  } else {
    LevelRule lv = quantile_levels_midpoint(input, kDirectLevelsNoisy);
    synth.kind = InputSpec::Kind::ContinuousRings;
    synth.radii = std::move(lv.a);
    synth.probs = std::move(lv.w);
    double e = 0.0;
    for (std::size_t i = 0; i < synth.radii.size(); ++i)
      e += synth.probs[i] * synth.radii[i] * synth.radii[i];
    synth.power = e;
  }
  JointDensityGrid grid(synth, ch, snr, quad);
  const int np = grid.phase_points();
  const double dpsi = kTwoPi / np;
  double eff_weighted = 0.0;
  std::vector<double> row;
  for (int l = 0; l < grid.level_count(); ++l) {
    double acc = 0.0;
    for (int i = grid.window_lo(l); i < grid.window_hi(l); ++i) {
      grid.conditional_row(l, i, row);
      acc += grid.radial_weight(i) * xlnx_sum(row.data(), np);
    }
    eff_weighted += grid.level_weight(l) * dpsi * acc;
  }
  const std::vector<double>& gbar = grid.amplitude_mixture();
  double hy = 0.0;
  for (int i = 0; i < grid.radial_points(); ++i) {
    if (gbar[i] > 0.0)
      hy -= grid.radial_weight(i) * gbar[i] *
            (std::log(gbar[i]) - std::log(kTwoPi));
  }
  return (eff_weighted + hy) / kLn2;
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points

DecompositionResult decompose(const InputSpec& input, const ChannelSpec& channel,
                              const Snr& snr, const QuadratureSpec& quad) {
  check_request(input, channel, snr, quad);
  JointDensityGrid grid(input, channel, snr, quad);
  double amp = 0.0, phase = 0.0, m1 = 0.0, m2 = 0.0;
  if (grid.continuous_phase()) {
    amp = amplitude_term_nats(grid);
    m1 = continuous_m1_nats(grid);
    if (grid.has_phase_noise())
      continuous_noisy_phase_m2(grid, phase, m2);
    else
      continuous_clean_phase_m2(grid, channel, phase, m2);
  } else {
    DiscreteTerms t = discrete_terms(grid);
    amp = t.amp;
    phase = t.phase;
    m1 = t.m1;
    m2 = t.m2;
  }
  DecompositionResult res;
  res.snr = snr;
  res.amplitude_term = amp / kLn2;
  res.phase_term = phase / kLn2;
  res.mixed_term_1 = m1 / kLn2;
  res.mixed_term_2 = m2 / kLn2;
  res.sum = res.amplitude_term + res.phase_term + res.mixed_term_1 +
            res.mixed_term_2;
  return res;
}

double direct_mi(const InputSpec& input, const ChannelSpec& channel,
                 const Snr& snr, const QuadratureSpec& quad) {
  check_request(input, channel, snr, quad);
  const bool discrete = input.kind == InputSpec::Kind::Discrete;
  if (discrete) {
    if (!channel.phase_noise.has_value())
      return direct_discrete_clean(input, channel, quad);
    JointDensityGrid grid(input, channel, snr, quad);
    return discrete_terms(grid).direct / kLn2;
  }
  if (!channel.phase_noise.has_value())
    return direct_continuous_clean(input, channel, quad);
  return direct_continuous_noisy(input, channel, snr, quad);
}

// constant is (1/2)log2(pi) - (1 + gamma)/(2 ln 2) + 1
double gaussian_amplitude_asymptote(const Snr& snr) {
  constexpr double c = 0.68802745565324412;
  return 0.5 * std::log2(snr.linear) - c;
}

double gaussian_phase_asymptote(const Snr& snr) {
  constexpr double c = 0.68802745565324412;
  return 0.5 * std::log2(snr.linear) + c;
}

// (1/2)log2(4 pi / e) above the half-SNR line
double psk_phase_asymptote(const Snr& snr) {
  constexpr double c = 1.1044005442916777;
  return 0.5 * std::log2(snr.linear) + c;
}

double noncoherent_asymptote(const Snr& snr) {
  return 0.5 * std::log2(snr.linear) - 0.5;
}

std::vector<DecompositionResult> sweep(const InputSpec& input,
                                       const ChannelSpec& channel,
                                       const std::vector<Snr>& grid,
                                       const QuadratureSpec& quad) {
  std::vector<DecompositionResult> out;
  out.reserve(grid.size());
  for (const Snr& s : grid) {
    const double target = s.linear * 2.0 * channel.noise_variance_per_dim;
    try {
      InputSpec scaled = input.with_power(target);
      DecompositionResult res = decompose(scaled, channel, s, quad);
      res.direct_total = direct_mi(scaled, channel, s, quad);
      out.push_back(res);
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << "sweep: failed at snr_db=" << s.db << ": " << e.what();
      throw NumericalError(os.str());
    } catch (const std::invalid_argument& e) {
      std::ostringstream os;
      os << "sweep: failed at snr_db=" << s.db << ": " << e.what();
      throw std::invalid_argument(os.str());
    }
  }
  return out;
}

}  // namespace polarmi
