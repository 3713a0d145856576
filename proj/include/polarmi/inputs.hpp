#pragma once

// Channel-input construction: continuous families (complex Gaussian,
// half-Gaussian amplitude, uniform-phase rings) and discrete constellations
// (OOK, PSK, ASK/PSK grids, QAM), all normalized to E[|X|^2] = power, plus
// extraction of the polar structure (amplitude levels, per-level phase sets,
// and the entropies H(|X|), H(angle(X) | |X|)).

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace polarmi {

struct InputSpec {
  enum class Kind { GaussianComplex, HalfGaussianAmplitude, ContinuousRings, Discrete };

  Kind kind = Kind::GaussianComplex;
  double power = 1.0;  // P_s = E[|X|^2]

  // ContinuousRings: equiprobable-by-probs radii, uniform independent phase
  std::vector<double> radii;
  // Discrete: point masses
  std::vector<std::complex<double>> points;
  // shared by ContinuousRings (per ring) and Discrete (per point)
  std::vector<double> probs;

  void validate() const;  // throws std::invalid_argument
  InputSpec with_power(double new_power) const;
};

struct PolarStructure {
  std::vector<double> amplitude_levels;            // sorted, distinct
  std::vector<double> level_probs;
  std::vector<std::vector<double>> phases_per_level;  // sorted; empty sets when continuous
  std::vector<std::vector<double>> phase_probs_per_level;  // aligned with phases_per_level
  bool continuous_phase = false;                   // rings: uniform phase per level
  double amplitude_entropy_bits = 0.0;             // H(|X|)
  std::optional<double> conditional_phase_entropy_bits;  // H(angle X | |X|); none if continuous
};

InputSpec make_gaussian(double power);
InputSpec make_half_gaussian(double power);
InputSpec make_ook(double power);
InputSpec make_psk(int m, double power);
// a_levels equispaced rings (radii proportional to 1..a_levels) times m_phases
// equispaced phases; with offset, odd rings are rotated by pi/m_phases.
InputSpec make_askpsk(int a_levels, int m_phases, bool offset, double power);
// m in {4, 16, 64, 256, 1024} square, 512 cross (24x24 minus 4x4 corners)
InputSpec make_qam(int m, double power);
InputSpec make_rings(int r, double power);

// Amplitude-level clustering (tolerance 1e-9 * sqrt(power)) and exact
// entropies. Requires a Discrete or ContinuousRings input.
PolarStructure polar_structure(const InputSpec& input);

// i.i.d. draws, deterministic per seed.
std::vector<std::complex<double>> sample(const InputSpec& input, int n, std::uint64_t seed);

// One "re im prob" line per constellation point (Discrete inputs only).
std::string constellation_text(const InputSpec& input);

}  // namespace polarmi
