// Command-line frontend. main_entry parses argv into a RunConfig; run()
// validates it, drives the library, and writes deterministic CSV or
// key-value reports (plus an optional SVG line chart). Exit codes:
//   0 success
//   2 usage error (unknown flags, malformed selectors or grids)
//   3 configuration error (physics the library rejects)
//   4 numerical error (grids the quadrature cannot resolve)
//   5 I/O error (unwritable output paths)
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarmi/dirstats.hpp"
#include "polarmi/inputs.hpp"
#include "polarmi/numerics.hpp"

namespace polarmi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitIo = 5;

// malformed flag values; distinct from the library's own validation errors
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  double start = 0.0, stop = 0.0, step = 1.0;
};

struct RunConfig {
  std::string subcommand;
  // decompose / constellation
  std::string input;
  std::string snr_db = "0:10:1";
  std::string phase_noise = "none";
  double noise_var = 0.5;  // per-dimension AWGN variance; SNR = P/(2*nv)
  double power = 1.0;      // constellation display power
  // dirstats
  std::string dist;
  double mu = 0.0;
  // spectral-sim
  double sigma = 1.0;
  int oversample = 64;
  int n_symbols = 200000;
  std::uint64_t seed = 1;
  // fiber
  double c = 1.1e5;
  int rings = 16;
  std::string power_dbm = "-10:10:0.25";
  double fiber_noise_var = 1.8e-6;
  // shared
  QuadratureSpec quad;
  std::string output_path;  // empty = stdout
  std::string plot_path;    // empty = no plot
};

// "start:stop:step" with step > 0 and start <= stop; throws UsageError
GridSpec parse_grid(const std::string& s);
std::vector<double> grid_values(const GridSpec& g);

// gaussian | halfgauss | ook | psk:M | askpsk:A,M[,offset] | qam:M | rings:R
InputSpec parse_input_selector(const std::string& s, double power);

// wrapped-gaussian:SIGMA | von-mises:KAPPA | uniform | none
std::optional<CircularDistribution> parse_phase_noise(const std::string& s);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int main_entry(int argc, const char* const* argv);

}  // namespace polarmi::cli
