// End-to-end tests of the command-line frontend. Each case shells out to the
// built binary (path in $POLARMI_CLI) and inspects exit codes and output
// bytes, so the whole flag->spec->engine->CSV chain is exercised exactly the
// way a user drives it.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliResult {
  int code = -1;
  std::string text;
};

CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("POLARMI_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "POLARMI_CLI must point at the binary");
  const std::string cmd = std::string("\"") + bin + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.text.append(buf, n);
  const int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

std::vector<double> fields_of(const std::string& line) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

double report_value(const std::string& text, const std::string& key) {
  const std::string needle = key + "=";
  const std::size_t pos = text.find(needle);
  REQUIRE_MESSAGE(pos != std::string::npos, "missing key: " << key);
  return std::stod(text.substr(pos + needle.size()));
}

constexpr const char* kDecomposeHeader =
    "snr_db, amp_bits, phase_bits, mixed1_bits, mixed2_bits, sum_bits, "
    "direct_bits";

}  // namespace

TEST_CASE("decompose sweep emits the documented CSV") {
  const auto res =
      run_cli("decompose --input gaussian --snr-db -5:25:1");
  REQUIRE(res.code == 0);
  const auto rows = lines_of(res.text);
  REQUIRE(rows.size() == 32);  // header + 31 grid points
  CHECK(rows[0] == kDecomposeHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields_of(rows[i]);
    REQUIRE(f.size() == 7);
    CHECK(f[0] == doctest::Approx(-5.0 + (i - 1)).epsilon(1e-12));
    CHECK(std::abs((f[1] + f[2] + f[3] + f[4]) - f[5]) < 1e-4);  // sum column
    CHECK(std::abs(f[5] - f[6]) < 5e-3);  // decomposition closes on direct
  }
  const auto last = fields_of(rows.back());  // 25 dB
  CHECK(std::abs(last[3]) < 1e-3);           // no amplitude->phase leakage
}

TEST_CASE("decompose saturates 16-QAM at high SNR") {
  const auto res = run_cli("decompose --input qam:16 --snr-db 40:40:1");
  REQUIRE(res.code == 0);
  const auto rows = lines_of(res.text);
  REQUIRE(rows.size() == 2);
  const auto f = fields_of(rows[1]);
  CHECK(std::abs(f[1] - 1.5) < 0.01);
  CHECK(std::abs(f[2] - 2.5) < 0.01);
  CHECK(std::abs(f[5] - 4.0) < 0.01);

  // a bare value is a one-point grid
  const auto bare = run_cli("decompose --input qam:16 --snr-db 40");
  REQUIRE(bare.code == 0);
  CHECK(bare.text == res.text);
}

TEST_CASE("selector grammar reaches every input family") {
  for (const char* sel :
       {"halfgauss", "ook", "psk:8", "askpsk:4,8", "askpsk:4,8,offset",
        "qam:4", "rings:2"}) {
    const auto res = run_cli(std::string("decompose --input ") + sel +
                             " --snr-db 5:5:1");
    CAPTURE(sel);
    REQUIRE(res.code == 0);
    const auto rows = lines_of(res.text);
    REQUIRE(rows.size() == 2);
    const auto f = fields_of(rows[1]);
    CHECK(std::abs(f[5] - f[6]) < 5e-3);
  }
}

TEST_CASE("phase noise flag feeds the partially coherent channel") {
  const auto noisy = run_cli(
      "decompose --input rings:2 --phase-noise wrapped-gaussian:1 "
      "--snr-db 10:10:1");
  REQUIRE(noisy.code == 0);
  const auto clean = run_cli("decompose --input rings:2 --snr-db 10:10:1");
  REQUIRE(clean.code == 0);
  const auto fn = fields_of(lines_of(noisy.text)[1]);
  const auto fc = fields_of(lines_of(clean.text)[1]);
  CHECK(std::abs(fn[1] - fc[1]) < 1e-6);  // amplitude column unaffected
  CHECK(fn[2] < fc[2] - 0.1);             // phase column degraded
  const auto uni = run_cli(
      "decompose --input rings:2 --phase-noise uniform --snr-db 10:10:1");
  REQUIRE(uni.code == 0);
  CHECK(std::abs(fields_of(lines_of(uni.text)[1])[2]) < 1e-6);
  const auto vm = run_cli(
      "decompose --input rings:2 --phase-noise von-mises:3 --snr-db 10:10:1");
  REQUIRE(vm.code == 0);
  const double vphase = fields_of(lines_of(vm.text)[1])[2];
  CHECK(vphase > 0.05);
  CHECK(vphase < fc[2]);
}

TEST_CASE("reruns are byte-identical") {
  const std::string flags =
      "decompose --input qam:4 --snr-db 0:10:5 --output cli_rerun_";
  REQUIRE(run_cli(flags + "a.csv").code == 0);
  REQUIRE(run_cli(flags + "b.csv").code == 0);
  CHECK(slurp("cli_rerun_a.csv") == slurp("cli_rerun_b.csv"));
  std::remove("cli_rerun_a.csv");
  std::remove("cli_rerun_b.csv");
}

TEST_CASE("usage errors exit with 2 and name the offender") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("decompose --snr-db 0:5:1").code == 2);  // missing --input
  const auto sel = run_cli("decompose --input psk:zero --snr-db 0:5:1");
  CHECK(sel.code == 2);
  CHECK(sel.text.find("psk:zero") != std::string::npos);
  CHECK(run_cli("decompose --input wat --snr-db 0:5:1").code == 2);
  CHECK(run_cli("decompose --input gaussian --snr-db 5:0:1").code == 2);
  CHECK(run_cli("decompose --input gaussian --snr-db 0:5:0").code == 2);
  CHECK(run_cli("decompose --input gaussian --snr-db abc").code == 2);
  CHECK(run_cli("decompose --input gaussian --snr-db 0:5:1 "
                "--phase-noise gauss:1").code == 2);
  CHECK(run_cli("decompose --input gaussian --snr-db 0:5:1 --bogus").code ==
        2);
}

TEST_CASE("impossible physics exits with 3") {
  const auto res = run_cli(
      "decompose --input gaussian --snr-db 0:5:1 --noise-var -1");
  CHECK(res.code == 3);
  CHECK(run_cli("decompose --input psk:1 --snr-db 0:5:1").code == 3);
  CHECK(run_cli("fiber --c 1.1e5 --rings 0 --power-dbm 0:3:1").code == 3);
  CHECK(run_cli("constellation --input rings:4").code == 3);
}

TEST_CASE("grids the quadrature cannot resolve exit with 4") {
  const auto res =
      run_cli("decompose --input gaussian --snr-db 65:65:1");
  CHECK(res.code == 4);
  CHECK(res.text.find("65") != std::string::npos);
}

TEST_CASE("unwritable output paths exit with 5") {
  CHECK(run_cli("decompose --input gaussian --snr-db 0:0:1 "
                "--output /nonexistent-dir/out.csv").code == 5);
}

TEST_CASE("dirstats reports the distribution summary") {
  const auto wg = run_cli("dirstats --dist wrapped-gaussian:1");
  REQUIRE(wg.code == 0);
  CHECK(std::abs(report_value(wg.text, "resultant_length") -
                 0.60653065971263342) < 1e-9);
  CHECK(std::abs(report_value(wg.text, "mean_direction")) < 1e-12);
  const auto uni = run_cli("dirstats --dist uniform");
  REQUIRE(uni.code == 0);
  CHECK(std::abs(report_value(uni.text, "entropy_nats") -
                 std::log(2.0 * 3.141592653589793)) < 1e-12);
  CHECK(std::abs(report_value(uni.text, "resultant_length")) < 1e-12);
  CHECK(run_cli("dirstats --dist wrapped-gaussian:-1").code == 3);
  CHECK(run_cli("dirstats --dist what:1").code == 2);
}

TEST_CASE("spectral-sim reports the attenuation measurement") {
  const std::string flags =
      "spectral-sim --sigma 1 --oversample 8 --n-symbols 4000 --seed 3";
  const auto a = run_cli(flags);
  REQUIRE(a.code == 0);
  CHECK(std::abs(report_value(a.text, "predicted_amp_attenuation") -
                 0.60653065971263342) < 1e-12);
  const double meas = report_value(a.text, "measured_amp_attenuation");
  CHECK(meas > 0.5);
  CHECK(meas < 0.7);
  CHECK(report_value(a.text, "residual_phase_std") > 0.0);
  CHECK(report_value(a.text, "aliasing_floor") > 0.0);
  const auto b = run_cli(flags);
  CHECK(a.text == b.text);
  CHECK(run_cli("spectral-sim --sigma 1 --oversample 3 --n-symbols 4000")
            .code == 3);
}

TEST_CASE("fiber subcommand emits the dual-axis curve") {
  const auto res = run_cli("fiber --c 1.1e5 --rings 4 --power-dbm 0:6:2");
  REQUIRE(res.code == 0);
  const auto rows = lines_of(res.text);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "power_w, power_dbm, eff_snr_db, cap_bits");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields_of(rows[i]);
    REQUIRE(f.size() == 4);
    CHECK(std::abs(f[1] - (0.0 + 2.0 * (i - 1))) < 1e-9);
    // both columns carry 6 significant digits, so the round trip is ~1e-6
    CHECK(std::abs(f[0] - 1e-3 * std::pow(10.0, f[1] / 10.0)) <
          1e-5 * f[0]);
    CHECK(f[3] > 0.0);
  }
}

TEST_CASE("constellation subcommand prints the point set") {
  const auto res = run_cli("constellation --input psk:4 --power 2");
  REQUIRE(res.code == 0);
  const auto rows = lines_of(res.text);
  REQUIRE(rows.size() == 4);
  double psum = 0.0, power = 0.0;
  for (const auto& row : rows) {
    std::istringstream is(row);
    double re = 0.0, im = 0.0, pr = 0.0;
    REQUIRE((is >> re >> im >> pr));
    psum += pr;
    power += pr * (re * re + im * im);
  }
  CHECK(std::abs(psum - 1.0) < 1e-12);
  CHECK(std::abs(power - 2.0) < 1e-12);
}

TEST_CASE("plot flag writes a line chart") {
  const auto res = run_cli(
      "decompose --input rings:2 --snr-db 0:10:5 --output cli_plot.csv "
      "--plot cli_plot.svg");
  REQUIRE(res.code == 0);
  const std::string svg = slurp("cli_plot.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::remove("cli_plot.csv");
  std::remove("cli_plot.svg");

  const auto fib = run_cli(
      "fiber --c 1.1e5 --rings 4 --power-dbm 0:4:2 --output cli_fib.csv "
      "--plot cli_fib.svg");
  REQUIRE(fib.code == 0);
  CHECK(slurp("cli_fib.svg").rfind("<svg", 0) == 0);
  std::remove("cli_fib.csv");
  std::remove("cli_fib.svg");
}

TEST_CASE("help is reachable and exits cleanly") {
  const auto res = run_cli("--help");
  CHECK(res.code == 0);
  CHECK(res.text.find("decompose") != std::string::npos);
  CHECK(res.text.find("fiber") != std::string::npos);
}
