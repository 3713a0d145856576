#include "polarmi/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "polarmi/numerics.hpp"

namespace polarmi {

namespace {

void require_power(double power) {
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::domain_error("input factory: power must be positive and finite");
}

double entropy_bits(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// scale Discrete points / ring radii so E[|X|^2] equals power exactly
void normalize_power(InputSpec& in) {
  double e = 0.0;
  if (in.kind == InputSpec::Kind::Discrete) {
    for (size_t i = 0; i < in.points.size(); ++i) e += in.probs[i] * std::norm(in.points[i]);
    const double s = std::sqrt(in.power / e);
    for (auto& z : in.points) z *= s;
  } else if (in.kind == InputSpec::Kind::ContinuousRings) {
    for (size_t i = 0; i < in.radii.size(); ++i) e += in.probs[i] * in.radii[i] * in.radii[i];
    const double s = std::sqrt(in.power / e);
    for (auto& r : in.radii) r *= s;
  }
}

}  // namespace

void InputSpec::validate() const {
  if (!(power > 0.0) || !std::isfinite(power))
    throw std::invalid_argument("InputSpec: power must be positive and finite");
  if (kind == Kind::GaussianComplex || kind == Kind::HalfGaussianAmplitude) return;

  const auto& weights = probs;
  const size_t n = kind == Kind::Discrete ? points.size() : radii.size();
  if (n == 0 || weights.size() != n)
    throw std::invalid_argument("InputSpec: probs must match the point/ring count");
  double sum = 0.0;
  for (double p : weights) {
    if (!(p > 0.0)) throw std::invalid_argument("InputSpec: probs must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("InputSpec: probs must sum to 1");

  double e = 0.0;
  if (kind == Kind::Discrete) {
    for (size_t i = 0; i < n; ++i) e += probs[i] * std::norm(points[i]);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        if (std::abs(points[i] - points[j]) <= 1e-12 * std::sqrt(power))
          throw std::invalid_argument("InputSpec: constellation points must be distinct");
      }
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      if (!(radii[i] > 0.0)) throw std::invalid_argument("InputSpec: ring radii must be positive");
      e += probs[i] * radii[i] * radii[i];
    }
  }
  if (std::abs(e - power) > 1e-9 * power)
    throw std::invalid_argument("InputSpec: E[|X|^2] does not match the declared power");
}

InputSpec InputSpec::with_power(double new_power) const {
  require_power(new_power);
  InputSpec out = *this;
  const double s = std::sqrt(new_power / power);
  out.power = new_power;
  for (auto& z : out.points) z *= s;
  for (auto& r : out.radii) r *= s;
  return out;
}

InputSpec make_gaussian(double power) {
  require_power(power);
  InputSpec in;
  in.kind = InputSpec::Kind::GaussianComplex;
  in.power = power;
  return in;
}

InputSpec make_half_gaussian(double power) {
  require_power(power);
  InputSpec in;
  in.kind = InputSpec::Kind::HalfGaussianAmplitude;
  in.power = power;
  return in;
}

InputSpec make_ook(double power) {
  require_power(power);
  InputSpec in;
  in.kind = InputSpec::Kind::Discrete;
  in.power = power;
  in.points = {{0.0, 0.0}, {std::sqrt(2.0 * power), 0.0}};
  in.probs = {0.5, 0.5};
  return in;
}

InputSpec make_psk(int m, double power) {
  require_power(power);
  if (m < 2) throw std::domain_error("make_psk: need at least 2 phases");
  InputSpec in;
  in.kind = InputSpec::Kind::Discrete;
  in.power = power;
  const double r = std::sqrt(power);
  for (int k = 0; k < m; ++k) {
    in.points.push_back(std::polar(r, kTwoPi * k / m));
    in.probs.push_back(1.0 / m);
  }
  return in;
}

InputSpec make_askpsk(int a_levels, int m_phases, bool offset, double power) {
  require_power(power);
  if (a_levels < 1 || m_phases < 1 || a_levels * m_phases < 2)
    throw std::domain_error("make_askpsk: need at least 2 points");
  InputSpec in;
  in.kind = InputSpec::Kind::Discrete;
  in.power = power;
  for (int i = 1; i <= a_levels; ++i) {
    const double shift = offset ? (i % 2) * kPi / m_phases : 0.0;
    for (int k = 0; k < m_phases; ++k) {
      in.points.push_back(std::polar((double)i, kTwoPi * k / m_phases + shift));
      in.probs.push_back(1.0 / (a_levels * m_phases));
    }
  }
  normalize_power(in);
  return in;
}

InputSpec make_qam(int m, double power) {
  require_power(power);
  static const int square[] = {4, 16, 64, 256, 1024};
  const bool is_square = std::find(std::begin(square), std::end(square), m) != std::end(square);
  if (!is_square && m != 512) throw std::domain_error("make_qam: unsupported constellation size");
  InputSpec in;
  in.kind = InputSpec::Kind::Discrete;
  in.power = power;
  const int side = is_square ? (int)std::lround(std::sqrt((double)m)) : 24;
  for (int ix = 0; ix < side; ++ix) {
    for (int iy = 0; iy < side; ++iy) {
      const double re = 2.0 * ix - side + 1;
      const double im = 2.0 * iy - side + 1;
      // 512 is the cross constellation: drop the 4x4 corner blocks
      if (!is_square && std::abs(re) > 15.0 && std::abs(im) > 15.0) continue;
      in.points.emplace_back(re, im);
      in.probs.push_back(1.0);
    }
  }
  for (auto& p : in.probs) p /= in.points.size();
  normalize_power(in);
  return in;
}

InputSpec make_rings(int r, double power) {
  require_power(power);
  if (r < 1) throw std::domain_error("make_rings: need at least 1 ring");
  InputSpec in;
  in.kind = InputSpec::Kind::ContinuousRings;
  in.power = power;
  for (int i = 1; i <= r; ++i) {
    in.radii.push_back((double)i);
    in.probs.push_back(1.0 / r);
  }
  normalize_power(in);
  return in;
}

PolarStructure polar_structure(const InputSpec& input) {
  input.validate();
  PolarStructure out;
  if (input.kind == InputSpec::Kind::ContinuousRings) {
    // rings are already distinct sorted radii
    std::vector<size_t> order(input.radii.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return input.radii[a] < input.radii[b]; });
    for (size_t idx : order) {
      out.amplitude_levels.push_back(input.radii[idx]);
      out.level_probs.push_back(input.probs[idx]);
      out.phases_per_level.emplace_back();
      out.phase_probs_per_level.emplace_back();
    }
    out.continuous_phase = true;
    out.amplitude_entropy_bits = entropy_bits(out.level_probs);
    return out;
  }
  if (input.kind != InputSpec::Kind::Discrete)
    throw std::invalid_argument("polar_structure: only discrete or ring inputs have one");

  std::vector<size_t> order(input.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(input.points[a]) < std::abs(input.points[b]);
  });
  const double tol = 1e-9 * std::sqrt(input.power);
  double cond_phase_bits = 0.0;
  for (size_t pos = 0; pos < order.size();) {
    const double level = std::abs(input.points[order[pos]]);
    double prob = 0.0;
    std::vector<std::pair<double, double>> members;  // (phase, prob)
    size_t end = pos;
    while (end < order.size() && std::abs(input.points[order[end]]) - level <= tol) {
      const size_t idx = order[end];
      prob += input.probs[idx];
      members.emplace_back(level > 0.0 ? std::arg(input.points[idx]) : 0.0,
                           input.probs[idx]);
      ++end;
    }
    std::sort(members.begin(), members.end());
    std::vector<double> phases, point_probs;
    for (auto& [ph, pp] : members) {
      phases.push_back(ph);
      point_probs.push_back(pp / prob);
    }
    cond_phase_bits += prob * entropy_bits(point_probs);
    out.amplitude_levels.push_back(level);
    out.level_probs.push_back(prob);
    out.phases_per_level.push_back(std::move(phases));
    out.phase_probs_per_level.push_back(std::move(point_probs));
    pos = end;
  }
  out.amplitude_entropy_bits = entropy_bits(out.level_probs);
  out.conditional_phase_entropy_bits = cond_phase_bits;
  return out;
}

std::vector<std::complex<double>> sample(const InputSpec& input, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: need n >= 1");
  input.validate();
  Rng rng(seed);
  std::vector<std::complex<double>> out(n);
  switch (input.kind) {
    case InputSpec::Kind::GaussianComplex: {
      const double s = std::sqrt(input.power);
      for (auto& z : out) z = s * rng.complex_normal();
      break;
    }
    case InputSpec::Kind::HalfGaussianAmplitude: {
      const double s = std::sqrt(input.power);
      for (auto& z : out)
        z = std::polar(s * std::abs(rng.normal()), kTwoPi * rng.uniform() - kPi);
      break;
    }
    case InputSpec::Kind::ContinuousRings:
    case InputSpec::Kind::Discrete: {
      std::vector<double> cdf(input.probs.size());
      std::partial_sum(input.probs.begin(), input.probs.end(), cdf.begin());
      cdf.back() = 1.0;
      for (auto& z : out) {
        const double u = rng.uniform();
        const size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (input.kind == InputSpec::Kind::Discrete) {
          z = input.points[idx];
        } else {
          z = std::polar(input.radii[idx], kTwoPi * rng.uniform() - kPi);
        }
      }
      break;
    }
  }
  return out;
}

std::string constellation_text(const InputSpec& input) {
  if (input.kind != InputSpec::Kind::Discrete)
    throw std::invalid_argument("constellation_text: only discrete constellations export");
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < input.points.size(); ++i) {
    os << input.points[i].real() << ' ' << input.points[i].imag() << ' ' << input.probs[i]
       << '\n';
  }
  return os.str();
}

}  // namespace polarmi
