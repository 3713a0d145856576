#include "polarmi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "polarmi/channels.hpp"
#include "polarmi/decomp.hpp"
#include "polarmi/spectral.hpp"

namespace polarmi::cli {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& tok, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw UsageError(ctx + ": '" + tok + "' is not a number");
  }
}

int parse_positive_int(const std::string& tok, const std::string& ctx) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError(ctx + ": '" + tok + "' is not a positive integer");
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw UsageError(ctx + ": '" + tok + "' is out of range");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

void write_text(const std::string& text, const std::string& path,
                std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("short write to '" + path + "'");
}

// minimal static line chart: axes, ticks, one polyline per series, legend
std::string svg_chart(
    const std::string& title, const std::string& x_label,
    const std::vector<double>& x,
    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  constexpr double kW = 800, kH = 500, kL = 70, kR = 770, kT = 40, kB = 440;
  double xmin = x.front(), xmax = x.back();
  if (xmax <= xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  double ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (double v : s.second) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymax <= ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const auto px = [&](double v) {
    return kL + (v - xmin) / (xmax - xmin) * (kR - kL);
  };
  const auto py = [&](double v) {
    return kB - (v - ymin) / (ymax - ymin) * (kB - kT);
  };
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
     << "\">\n";
  os << "<rect width=\"" << kW << "\" height=\"" << kH
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kB << "\" x2=\"" << kR
     << "\" y2=\"" << kB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
     << "\" y2=\"" << kB << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 5.0;
    const double yv = ymin + i * (ymax - ymin) / 5.0;
    os << "<line x1=\"" << px(xv) << "\" y1=\"" << kB << "\" x2=\"" << px(xv)
       << "\" y2=\"" << kB + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(xv) << "\" y=\"" << kB + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << xv << "</text>\n";
    os << "<line x1=\"" << kL - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kL
       << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kL - 8 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << yv << "</text>\n";
  }
  os << "<text x=\"" << (kL + kR) / 2 << "\" y=\"" << kH - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << x_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
      os << px(x[i]) << "," << py(series[s].second[i]) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << kR - 150 << "\" y=\"" << kT + 16 + 16 * s
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
       << "\">" << series[s].first << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int run_decompose(const RunConfig& cfg, std::ostream& out) {
  const GridSpec grid = parse_grid(cfg.snr_db);
  const InputSpec input = parse_input_selector(cfg.input, 1.0);
  const std::optional<CircularDistribution> pn =
      parse_phase_noise(cfg.phase_noise);

  std::vector<Snr> snrs;
  for (double db : grid_values(grid)) snrs.push_back(Snr::from_db(db));
  ChannelSpec ch = ChannelSpec::awgn(cfg.noise_var);
  ch.phase_noise = pn;
  const std::vector<DecompositionResult> rows =
      sweep(input, ch, snrs, cfg.quad);

  std::ostringstream csv;
  csv << std::setprecision(6);
  csv << "snr_db, amp_bits, phase_bits, mixed1_bits, mixed2_bits, sum_bits, "
         "direct_bits\n";
  for (const DecompositionResult& r : rows) {
    csv << r.snr.db << ", " << r.amplitude_term << ", " << r.phase_term
        << ", " << r.mixed_term_1 << ", " << r.mixed_term_2 << ", " << r.sum
        << ", " << *r.direct_total << "\n";
  }
  write_text(csv.str(), cfg.output_path, out);

  if (!cfg.plot_path.empty()) {
    std::vector<double> xs;
    std::vector<std::pair<std::string, std::vector<double>>> series(5);
    series[0].first = "amplitude";
    series[1].first = "phase";
    series[2].first = "mixed I";
    series[3].first = "mixed II";
    series[4].first = "sum";
    for (const DecompositionResult& r : rows) {
      xs.push_back(r.snr.db);
      series[0].second.push_back(r.amplitude_term);
      series[1].second.push_back(r.phase_term);
      series[2].second.push_back(r.mixed_term_1);
      series[3].second.push_back(r.mixed_term_2);
      series[4].second.push_back(r.sum);
    }
    write_text(svg_chart("mutual information decomposition, input " +
                             cfg.input,
                         "SNR (dB)", xs, series),
               cfg.plot_path, out);
  }
  return kExitOk;
}

int run_dirstats(const RunConfig& cfg, std::ostream& out) {
  const std::vector<std::string> parts = split(cfg.dist, ':');
  const std::string& kind = parts[0];
  const std::string ctx = "distribution selector '" + cfg.dist + "'";
  CircularDistribution d = CircularDistribution::uniform();
  if (kind == "uniform") {
    if (parts.size() != 1) throw UsageError(ctx + ": uniform takes no value");
  } else if (kind == "wrapped-gaussian" || kind == "von-mises" ||
             kind == "truncated-gaussian") {
    if (parts.size() != 2)
      throw UsageError(ctx + ": expected " + kind + ":VALUE");
    const double v = parse_double(parts[1], ctx);
    if (kind == "wrapped-gaussian")
      d = CircularDistribution::wrapped_gaussian(cfg.mu, v);
    else if (kind == "von-mises")
      d = CircularDistribution::von_mises(cfg.mu, v);
    else
      d = CircularDistribution::truncated_gaussian(cfg.mu, v);
  } else {
    throw UsageError(ctx + ": unknown kind '" + kind + "'");
  }

  const CircularMoments m = d.moments();
  const double h = d.entropy();
  std::ostringstream os;
  os << std::setprecision(17);
  os << "kind=" << kind << "\n";
  os << "mean_direction=" << m.mean_direction << "\n";
  os << "resultant_length=" << m.resultant_length << "\n";
  os << "circular_variance=" << m.circular_variance << "\n";
  os << "circular_std=" << m.circular_std << "\n";
  os << "entropy_nats=" << h << "\n";
  os << "entropy_bits=" << h / std::numbers::ln2 << "\n";
  write_text(os.str(), cfg.output_path, out);
  return kExitOk;
}

int run_spectral_sim(const RunConfig& cfg, std::ostream& out) {
  SpectralSimConfig sc;
  sc.sigma = cfg.sigma;
  sc.oversample = cfg.oversample;
  sc.n_symbols = cfg.n_symbols;
  sc.seed = cfg.seed;
  const SpectralLossReport rep = simulate_spectral_loss(sc);
  std::ostringstream os;
  os << std::setprecision(17);
  os << "sigma=" << sc.sigma << "\n";
  os << "oversample=" << sc.oversample << "\n";
  os << "n_symbols=" << sc.n_symbols << "\n";
  os << "seed=" << sc.seed << "\n";
  os << "measured_amp_attenuation=" << rep.measured_amp_attenuation << "\n";
  os << "predicted_amp_attenuation=" << rep.predicted_amp_attenuation << "\n";
  os << "residual_phase_std=" << rep.residual_phase_std << "\n";
  os << "aliasing_floor=" << rep.aliasing_floor << "\n";
  os << "aliasing_floor_db=" << 10.0 * std::log10(rep.aliasing_floor) << "\n";
  write_text(os.str(), cfg.output_path, out);
  return kExitOk;
}

int run_fiber(const RunConfig& cfg, std::ostream& out) {
  const GridSpec grid = parse_grid(cfg.power_dbm);
  FiberModelSpec spec;
  spec.c = cfg.c;
  spec.noise_variance_per_dim = cfg.fiber_noise_var;
  spec.rings = cfg.rings;
  for (double dbm : grid_values(grid))
    spec.power_grid.push_back(1e-3 * std::pow(10.0, dbm / 10.0));
  const std::vector<FiberPoint> curve = fiber_capacity_curve(spec, cfg.quad);

  std::ostringstream csv;
  csv << std::setprecision(6);
  csv << "power_w, power_dbm, eff_snr_db, cap_bits\n";
  for (const FiberPoint& pt : curve)
    csv << pt.power_w << ", " << pt.power_dbm << ", " << pt.eff_snr_db << ", "
        << pt.cap_bits << "\n";
  write_text(csv.str(), cfg.output_path, out);

  if (!cfg.plot_path.empty()) {
    std::vector<double> xs;
    std::vector<std::pair<std::string, std::vector<double>>> series(1);
    series[0].first = "amplitude + phase capacity";
    for (const FiberPoint& pt : curve) {
      xs.push_back(pt.power_dbm);
      series[0].second.push_back(pt.cap_bits);
    }
    write_text(svg_chart("fiber capacity model", "launch power (dBm)", xs,
                         series),
               cfg.plot_path, out);
  }
  return kExitOk;
}

int run_constellation(const RunConfig& cfg, std::ostream& out) {
  const InputSpec input = parse_input_selector(cfg.input, cfg.power);
  write_text(constellation_text(input), cfg.output_path, out);
  return kExitOk;
}

}  // namespace

GridSpec parse_grid(const std::string& s) {
  const std::string ctx = "grid '" + s + "'";
  const std::vector<std::string> parts = split(s, ':');
  GridSpec g;
  if (parts.size() == 1) {  // bare value: one-point grid
    g.start = g.stop = parse_double(parts[0], ctx);
    g.step = 1.0;
    return g;
  }
  if (parts.size() != 3)
    throw UsageError(ctx + ": expected start:stop:step or a single value");
  g.start = parse_double(parts[0], ctx);
  g.stop = parse_double(parts[1], ctx);
  g.step = parse_double(parts[2], ctx);
  if (!(g.step > 0.0)) throw UsageError(ctx + ": step must be > 0");
  if (g.start > g.stop) throw UsageError(ctx + ": start exceeds stop");
  return g;
}

std::vector<double> grid_values(const GridSpec& g) {
  const int n =
      static_cast<int>(std::floor((g.stop - g.start) / g.step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = g.start + i * g.step;
  return out;
}

InputSpec parse_input_selector(const std::string& s, double power) {
  const std::string ctx = "input selector '" + s + "'";
  const std::size_t colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? std::string() : s.substr(colon + 1);

  if (head == "gaussian" || head == "halfgauss" || head == "ook") {
    if (colon != std::string::npos)
      throw UsageError(ctx + ": " + head + " takes no value");
    if (head == "gaussian") return make_gaussian(power);
    if (head == "halfgauss") return make_half_gaussian(power);
    return make_ook(power);
  }
  if (head == "psk" || head == "qam" || head == "rings") {
    if (colon == std::string::npos)
      throw UsageError(ctx + ": expected " + head + ":N");
    const int n = parse_positive_int(rest, ctx);
    if (head == "psk") return make_psk(n, power);
    if (head == "qam") return make_qam(n, power);
    return make_rings(n, power);
  }
  if (head == "askpsk") {
    const std::vector<std::string> parts = split(rest, ',');
    if (parts.size() < 2 || parts.size() > 3)
      throw UsageError(ctx + ": expected askpsk:A,M[,offset]");
    const int a = parse_positive_int(parts[0], ctx);
    const int m = parse_positive_int(parts[1], ctx);
    bool offset = false;
    if (parts.size() == 3) {
      if (parts[2] != "offset")
        throw UsageError(ctx + ": trailing token must be 'offset'");
      offset = true;
    }
    return make_askpsk(a, m, offset, power);
  }
  throw UsageError(ctx + ": unknown input family '" + head + "'");
}

std::optional<CircularDistribution> parse_phase_noise(const std::string& s) {
  if (s == "none" || s.empty()) return std::nullopt;
  if (s == "uniform") return CircularDistribution::uniform();
  const std::string ctx = "phase-noise selector '" + s + "'";
  const std::size_t colon = s.find(':');
  const std::string head = s.substr(0, colon);
  if (colon == std::string::npos)
    throw UsageError(ctx + ": expected KIND:VALUE, 'uniform' or 'none'");
  const double v = parse_double(s.substr(colon + 1), ctx);
  if (head == "wrapped-gaussian")
    return CircularDistribution::wrapped_gaussian(0.0, v);
  if (head == "von-mises") return CircularDistribution::von_mises(0.0, v);
  throw UsageError(ctx + ": unknown kind '" + head + "'");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.subcommand == "decompose") return run_decompose(cfg, out);
    if (cfg.subcommand == "dirstats") return run_dirstats(cfg, out);
    if (cfg.subcommand == "spectral-sim") return run_spectral_sim(cfg, out);
    if (cfg.subcommand == "fiber") return run_fiber(cfg, out);
    if (cfg.subcommand == "constellation") return run_constellation(cfg, out);
    err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int main_entry(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{
      "Mutual information of complex AWGN and partially coherent channels, "
      "decomposed into amplitude, phase and mixed terms"};
  app.require_subcommand(1);

  CLI::App* dec = app.add_subcommand(
      "decompose", "sweep the four-term decomposition over an SNR grid");
  dec->add_option("--input", cfg.input,
                  "gaussian | halfgauss | ook | psk:M | askpsk:A,M[,offset] "
                  "| qam:M | rings:R")
      ->required();
  dec->add_option("--snr-db", cfg.snr_db,
                  "SNR in dB: start:stop:step or a single value")
      ->required();
  dec->add_option("--phase-noise", cfg.phase_noise,
                  "wrapped-gaussian:SIGMA | von-mises:KAPPA | uniform | none");
  dec->add_option("--noise-var", cfg.noise_var,
                  "AWGN variance per dimension (default 0.5: SNR dB = signal "
                  "power dB)");
  dec->add_option("--amp-points", cfg.quad.amp_points,
                  "minimum radial quadrature nodes");
  dec->add_option("--phase-points", cfg.quad.phase_points,
                  "minimum phase bins (power of two)");
  dec->add_option("--trunc-sigmas", cfg.quad.amp_truncation_sigmas,
                  "radial truncation in noise deviations");
  dec->add_option("--mc-samples", cfg.quad.mc_samples,
                  "Monte Carlo samples for the continuous-input cross-check");
  dec->add_option("--seed", cfg.quad.seed, "Monte Carlo seed");
  dec->add_option("--output", cfg.output_path, "CSV path (default stdout)");
  dec->add_option("--plot", cfg.plot_path, "write an SVG line chart here");

  CLI::App* dir = app.add_subcommand(
      "dirstats", "summarize a circular distribution");
  dir->add_option("--dist", cfg.dist,
                  "wrapped-gaussian:SIGMA | von-mises:KAPPA | "
                  "truncated-gaussian:SIGMA | uniform")
      ->required();
  dir->add_option("--mu", cfg.mu, "location parameter (radians)");
  dir->add_option("--output", cfg.output_path, "report path (default stdout)");

  CLI::App* spec = app.add_subcommand(
      "spectral-sim",
      "measure the spectral loss of white phase noise by simulation");
  spec->add_option("--sigma", cfg.sigma, "per-sample phase std (radians)");
  spec->add_option("--oversample", cfg.oversample,
                   "samples per symbol (power of two >= 2)");
  spec->add_option("--n-symbols", cfg.n_symbols, "symbols to simulate");
  spec->add_option("--seed", cfg.seed, "RNG seed");
  spec->add_option("--output", cfg.output_path,
                   "report path (default stdout)");

  CLI::App* fib = app.add_subcommand(
      "fiber", "capacity curve of the phenomenological fiber model");
  fib->add_option("--c", cfg.c, "nonlinearity coefficient (W^-2)");
  fib->add_option("--rings", cfg.rings, "input rings");
  fib->add_option("--power-dbm", cfg.power_dbm,
                  "launch power in dBm: start:stop:step or a single value");
  fib->add_option("--noise-var", cfg.fiber_noise_var,
                  "AWGN variance per dimension in W (demo default 1.8e-6)");
  fib->add_option("--amp-points", cfg.quad.amp_points,
                  "minimum radial quadrature nodes");
  fib->add_option("--output", cfg.output_path, "CSV path (default stdout)");
  fib->add_option("--plot", cfg.plot_path, "write an SVG line chart here");

  CLI::App* con = app.add_subcommand(
      "constellation", "print a discrete constellation as 're im prob' rows");
  con->add_option("--input", cfg.input, "input selector")->required();
  con->add_option("--power", cfg.power, "average power E|X|^2");
  con->add_option("--output", cfg.output_path, "path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  cfg.subcommand = app.get_subcommands().at(0)->get_name();
  return run(cfg, std::cout, std::cerr);
}

}  // namespace polarmi::cli
