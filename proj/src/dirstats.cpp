#include "polarmi/dirstats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polarmi {

namespace {

int pow2_at_least(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Grid size that resolves the sharpest feature of the density with spectral
// headroom. Closed-form kinds are smooth and periodic, so the uniform
// trapezoid rule below converges exponentially once the width is resolved.
int quadrature_points(const CircularDistribution& d) {
  switch (d.kind()) {
    case CircularDistribution::Kind::WrappedGaussian:
      return std::min(1 << 20, std::max(4096, pow2_at_least((int)std::ceil(16.0 * kTwoPi / d.sigma()))));
    case CircularDistribution::Kind::VonMises: {
      const double width = d.kappa() > 1.0 ? 1.0 / std::sqrt(d.kappa()) : 1.0;
      return std::min(1 << 20, std::max(4096, pow2_at_least((int)std::ceil(16.0 * kTwoPi / width))));
    }
    case CircularDistribution::Kind::TruncatedGaussian:
      // derivative kink at the seam costs the spectral rate; oversample
      return std::min(1 << 20, std::max(16384, pow2_at_least((int)std::ceil(16.0 * kTwoPi / d.sigma()))));
    case CircularDistribution::Kind::Sampled:
      return d.grid().size();
    case CircularDistribution::Kind::Uniform:
      return 256;
  }
  return 4096;
}

double gaussian_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi); }

}  // namespace

double wrap_angle(double theta) {
  double w = std::remainder(theta, kTwoPi);  // (-pi, pi]
  if (w >= kPi) w -= kTwoPi;
  return w;
}

CircularDistribution CircularDistribution::wrapped_gaussian(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("wrapped_gaussian: sigma must be > 0");
  CircularDistribution d;
  d.kind_ = Kind::WrappedGaussian;
  d.mu_ = wrap_angle(mu);
  d.sigma_ = sigma;
  return d;
}

CircularDistribution CircularDistribution::von_mises(double mu, double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("von_mises: kappa must be >= 0");
  CircularDistribution d;
  d.kind_ = Kind::VonMises;
  d.mu_ = wrap_angle(mu);
  d.kappa_ = kappa;
  return d;
}

CircularDistribution CircularDistribution::truncated_gaussian(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("truncated_gaussian: sigma must be > 0");
  CircularDistribution d;
  d.kind_ = Kind::TruncatedGaussian;
  d.mu_ = wrap_angle(mu);
  d.sigma_ = sigma;
  return d;
}

CircularDistribution CircularDistribution::uniform() { return CircularDistribution(); }

CircularDistribution CircularDistribution::sampled(AngularGrid grid) {
  if (grid.size() < 8) throw std::invalid_argument("sampled: need at least 8 grid points");
  for (double v : grid.values) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("sampled: grid values must be finite and nonnegative");
  }
  const double mass = grid.total_mass();
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("sampled: grid is not normalized (mass deviates by > 1e-6)");
  grid.normalize();
  CircularDistribution d;
  d.kind_ = Kind::Sampled;
  d.grid_ = std::move(grid);
  return d;
}

double CircularDistribution::pdf(double theta) const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0 / kTwoPi;
    case Kind::VonMises:
      return std::exp(kappa_ * (std::cos(theta - mu_) - 1.0)) /
             (kTwoPi * bessel_i0_scaled(kappa_));
    case Kind::TruncatedGaussian: {
      const double x = wrap_angle(theta - mu_);
      return truncated_gaussian_normalizer(sigma_) * gaussian_pdf(x / sigma_) / sigma_;
    }
    case Kind::WrappedGaussian: {
      const double x = wrap_angle(theta - mu_);
      const int kmax = (int)std::ceil(6.0 * sigma_ / kTwoPi) + 2;
      double tot = 0.0;
      for (int k = -kmax; k <= kmax; ++k) {
        const double dlt = (x + kTwoPi * k) / sigma_;
        tot += std::exp(-0.5 * dlt * dlt);
      }
      return tot / (sigma_ * std::sqrt(kTwoPi));
    }
    case Kind::Sampled: {
      const int n = grid_.size();
      const double dw = grid_.bin_width();
      const double u = (wrap_angle(theta) + kPi) / dw;
      const int i0 = (int)std::floor(u);
      const double frac = u - i0;
      const double a = grid_.values[((i0 % n) + n) % n];
      const double b = grid_.values[(((i0 + 1) % n) + n) % n];
      return std::max(0.0, a + frac * (b - a));
    }
  }
  return 0.0;
}

AngularGrid CircularDistribution::sample_grid(int n) const {
  if (n < 8) throw std::invalid_argument("sample_grid: need at least 8 points");
  if (kind_ == Kind::Sampled && n == grid_.size()) return grid_;
  AngularGrid g = AngularGrid::uniform(n);
  for (int m = 0; m < n; ++m) g.values[m] = pdf(g.angle(m));
  const double mass = g.total_mass();
  if (!(mass > 0.0))
    throw std::invalid_argument("sample_grid: grid too coarse to resolve the density");
  g.normalize();
  return g;
}

std::complex<double> CircularDistribution::trigonometric_moment(int order) const {
  if (order < 1) throw std::invalid_argument("trigonometric_moment: order must be >= 1");
  switch (kind_) {
    case Kind::Uniform:
      return {0.0, 0.0};
    case Kind::WrappedGaussian:
      return std::polar(std::exp(-0.5 * sigma_ * sigma_ * order * order), mu_ * order);
    default: {
      // uniform trapezoid rule: exact for band-limited periodic integrands,
      // spectrally accurate for the smooth kinds
      const int n = std::max(quadrature_points(*this), pow2_at_least(8 * order));
      const double dw = kTwoPi / n;
      std::complex<double> acc = 0.0;
      if (kind_ == Kind::Sampled && n == grid_.size()) {
        for (int m = 0; m < n; ++m)
          acc += grid_.values[m] * std::polar(1.0, order * grid_.angle(m));
      } else {
        for (int m = 0; m < n; ++m) {
          const double t = -kPi + m * dw;
          acc += pdf(t) * std::polar(1.0, order * t);
        }
      }
      return acc * dw;
    }
  }
}

CircularMoments CircularDistribution::moments() const {
  const std::complex<double> m1 = trigonometric_moment(1);
  CircularMoments out;
  out.resultant_length = std::min(1.0, std::abs(m1));
  out.mean_direction = out.resultant_length > 0.0 ? wrap_angle(std::arg(m1)) : 0.0;
  out.circular_variance = 1.0 - out.resultant_length;
  out.circular_std = out.resultant_length > 0.0
                         ? std::sqrt(std::max(0.0, -2.0 * std::log(out.resultant_length)))
                         : std::numeric_limits<double>::infinity();
  return out;
}

double CircularDistribution::entropy() const {
  switch (kind_) {
    case Kind::Uniform:
      return std::log(kTwoPi);
    case Kind::VonMises: {
      const double i0s = bessel_i0_scaled(kappa_);
      const double ratio = kappa_ > 0.0 ? bessel_i1_scaled(kappa_) / i0s : 0.0;
      return std::log(kTwoPi * i0s) + kappa_ * (1.0 - ratio);
    }
    case Kind::TruncatedGaussian: {
      const double mass = 1.0 / truncated_gaussian_normalizer(sigma_);
      const double c = kPi / sigma_;
      return 0.5 * std::log(kTwoPi * sigma_ * sigma_) + std::log(mass) +
             0.5 * (1.0 - 2.0 * c * gaussian_pdf(c) / mass);
    }
    case Kind::WrappedGaussian: {
      const int n = quadrature_points(*this);
      const double dw = kTwoPi / n;
      double acc = 0.0;
      for (int m = 0; m < n; ++m) {
        const double p = pdf(-kPi + m * dw);
        if (p > 1e-300) acc -= p * std::log(p);
      }
      return acc * dw;
    }
    case Kind::Sampled: {
      const double dw = grid_.bin_width();
      double acc = 0.0;
      for (double p : grid_.values)
        if (p > 1e-300) acc -= p * std::log(p);
      return acc * dw;
    }
  }
  return 0.0;
}

double truncated_gaussian_normalizer(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("truncated_gaussian_normalizer: sigma must be > 0");
  return 1.0 / std::erf(kPi / (sigma * std::sqrt(2.0)));
}

double max_entropy_check(const CircularDistribution& candidate,
                         const CircularDistribution& reference) {
  int n = 4096;
  if (candidate.kind() == CircularDistribution::Kind::Sampled)
    n = std::max(n, candidate.grid().size());
  if (reference.kind() == CircularDistribution::Kind::Sampled)
    n = std::max(n, reference.grid().size());
  const AngularGrid q = candidate.sample_grid(n);
  const AngularGrid p = reference.sample_grid(n);
  const double dw = q.bin_width();
  double kl = 0.0;
  for (int m = 0; m < n; ++m) {
    if (q.values[m] <= 1e-300) continue;  // 0 log 0 := 0
    if (p.values[m] <= 1e-300) return std::numeric_limits<double>::infinity();
    kl += q.values[m] * (std::log(q.values[m]) - std::log(p.values[m]));
  }
  kl *= dw;
  return (kl < 0.0 && kl > -1e-9) ? 0.0 : kl;
}

double von_mises_kappa_for_variance(double circular_variance) {
  if (!(circular_variance > 0.0))
    throw std::domain_error("von_mises_kappa_for_variance: variance must be in (0, 1]");
  if (circular_variance >= 1.0) return 0.0;
  const auto variance_of = [](double kappa) {
    return 1.0 - bessel_i1_scaled(kappa) / bessel_i0_scaled(kappa);
  };
  double hi = 1.0;
  while (variance_of(hi) > circular_variance && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (variance_of(mid) > circular_variance ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace polarmi
