#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flocert/certifier.hpp"
#include "flocert/errors.hpp"
#include "flocert/fock.hpp"
#include "flocert/gaussian.hpp"
#include "flocert/io.hpp"
#include "flocert/linalg.hpp"
#include "flocert/simulator.hpp"

namespace {

using namespace flocert;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInput = 2;
constexpr int kExitPrecondition = 3;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    io::write_file(out_path, text);
}

int cmd_certify(const std::string& state_path, bool with_decomposition,
                double tol, const std::string& out_path) {
  io::State st = io::load_state(state_path);
  if (st.modes != 4)
    throw WrongModeCount("certify requires a 4-mode state");
  if (st.kind == io::State::Kind::Correlation)
    throw ParseError("certify requires a pure or density state document");
  auto report = certifier::certify(st.as_density(), with_decomposition, tol);
  write_output(io::serialize_report(report), out_path);
  return report.is_convex_gaussian ? kExitOk : kExitNegative;
}

double scan_concurrence_plus(double p) {
  ComplexMatrix rho = fock::depolarized_a8(p);
  ComplexMatrix block(8, 8);
  const auto idx = fock::sector_indices(4, Sector::Even);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) block(i, j) = rho(idx[i], idx[j]);
  return certifier::concurrence_mixed(block, Sector::Even).c;
}

int cmd_scan(double pmin, double pmax, int steps,
             const std::string& out_path) {
  if (!(pmin >= 0.0 && pmin < pmax && pmax <= 1.0) || steps < 2)
    throw OutOfRange("scan requires 0 <= pmin < pmax <= 1 and steps >= 2");
  std::string out = "p,c_plus,f_gauss,distance_lower,distance_upper\n";
  for (int i = 0; i < steps; ++i) {
    double p = pmin + (pmax - pmin) * i / (steps - 1);
    double c = std::min(scan_concurrence_plus(p), 1.0);
    double f = 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - c * c));
    out += io::format_double(p) + "," + io::format_double(c) + "," +
           io::format_double(f) + "," + io::format_double(1.0 - std::sqrt(f)) +
           "," + io::format_double(std::sqrt(std::max(0.0, 1.0 - f))) + "\n";
  }
  double lo = 0.0, hi = 1.0;  // c(lo) > 0, c(hi) = 0
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (scan_concurrence_plus(mid) > 1e-13 ? lo : hi) = mid;
  }
  double p_cr = 0.5 * (lo + hi);
  out += "p_cr," + io::format_double(p_cr) + ",,,\n";
  write_output(out, out_path);
  std::cerr << "p_cr = " << io::format_double(p_cr) << "\n";
  return kExitOk;
}

simulator::Backend pick_backend(const std::string& name, bool oracle,
                                const simulator::Circuit& circuit) {
  if (name == "dense") return simulator::Backend::Dense;
  if (name == "cov") return simulator::Backend::Cov;
  if (name == "auto")
    return (oracle && circuit.total_modes() <= 6) ? simulator::Backend::Dense
                                                  : simulator::Backend::Cov;
  throw OutOfRange("backend must be dense, cov or auto");
}

int cmd_simulate(const std::string& circuit_path, const std::string& backend,
                 bool oracle, bool exact, std::uint64_t shots,
                 std::uint64_t seed, const std::string& out_path) {
  simulator::Circuit circuit = io::load_circuit(circuit_path);
  simulator::Backend be = pick_backend(backend, oracle, circuit);
  simulator::Histogram hist =
      exact ? simulator::outcome_distribution_exact(circuit, be)
            : simulator::outcome_distribution_shots(circuit, be, shots, seed);
  write_output(io::serialize_histogram(hist), out_path);
  return kExitOk;
}

int cmd_crosscheck(const std::string& circuit_path, bool corrupt_update,
                   const std::string& out_path) {
  simulator::Circuit circuit = io::load_circuit(circuit_path);
  if (circuit.total_modes() > 6)
    throw TooManyModes("crosscheck requires at most 6 total modes");
  auto dense =
      simulator::outcome_distribution_exact(circuit, simulator::Backend::Dense);
  simulator::set_corrupt_update(corrupt_update);
  auto cov =
      simulator::outcome_distribution_exact(circuit, simulator::Backend::Cov);
  simulator::set_corrupt_update(false);
  double max_diff = 0.0;
  std::string worst = "";
  auto probe = [&](const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b) {
    for (const auto& [key, value] : a) {
      auto it = b.find(key);
      double other = (it == b.end()) ? 0.0 : it->second;
      if (std::abs(value - other) > max_diff) {
        max_diff = std::abs(value - other);
        worst = key;
      }
    }
  };
  probe(dense.table, cov.table);
  probe(cov.table, dense.table);
  std::string out = "{\"max_discrepancy\":" + io::format_double(max_diff) +
                    ",\"worst_branch\":\"" + worst + "\",\"pass\":" +
                    (max_diff <= 1e-9 ? "true" : "false") + "}\n";
  write_output(out, out_path);
  return (max_diff <= 1e-9) ? kExitOk : kExitNegative;
}

int cmd_random_state(const std::string& kind, std::uint64_t seed,
                     int components, const std::string& out_path) {
  Rng rng(seed);
  io::State st;
  st.modes = 4;
  if (kind == "gaussian-pure") {
    st.kind = io::State::Kind::Pure;
    st.amplitudes =
        gaussian::gaussian_state_vector(gaussian::random_pure_gaussian(4, rng));
  } else if (kind == "even-pure") {
    st.kind = io::State::Kind::Pure;
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexVector psi = ComplexVector::Zero(16);
    for (int j : fock::sector_indices(4, Sector::Even))
      psi(j) = Complex(normal(rng), normal(rng));
    st.amplitudes = psi / psi.norm();
  } else if (kind == "gaussian-mixture") {
    if (components < 1 || components > 8)
      throw OutOfRange("mixtures take 1..8 components");
    st.kind = io::State::Kind::Density;
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::vector<double> weights(components);
    double total = 0.0;
    for (double& w : weights) total += (w = unif(rng));
    ComplexMatrix rho = ComplexMatrix::Zero(16, 16);
    for (int c = 0; c < components; ++c) {
      Sector parity = (rng() % 2 == 0) ? Sector::Even : Sector::Odd;
      ComplexVector psi = gaussian::gaussian_state_vector(
          gaussian::random_pure_gaussian(4, rng, parity));
      rho += (weights[c] / total) * (psi * psi.adjoint());
    }
    st.matrix = rho;
  } else if (kind == "even-mixed") {
    st.kind = io::State::Kind::Density;
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix rho = ComplexMatrix::Zero(16, 16);
    for (Sector sector : {Sector::Even, Sector::Odd}) {
      ComplexMatrix a(8, 8);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) a(i, j) = Complex(normal(rng), normal(rng));
      rho += fock::embed_sector(ComplexMatrix(a * a.adjoint()), 4, sector);
    }
    st.matrix = rho / rho.trace().real();
  } else {
    throw OutOfRange("kind must be gaussian-pure, even-pure, "
                     "gaussian-mixture or even-mixed");
  }
  write_output(io::serialize_state(st), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermionic linear optics simulator and convex-Gaussianity "
               "certifier for four-mode states"};
  app.require_subcommand(1);
  double tol = 1e-8;
  app.add_option("--tol", tol, "Verdict tolerance on the concurrences");

  std::string state_path, circuit_path, out_path;
  bool decompose_flag = false;

  auto* certify = app.add_subcommand("certify", "Certify convex-Gaussianity");
  certify->add_option("state", state_path, "State file (pure or density)")
      ->required();
  certify->add_flag("--decompose", decompose_flag,
                    "Include the optimal Gaussian decomposition");
  certify->add_option("--out", out_path, "Report file (default: stdout)");

  auto* decompose =
      app.add_subcommand("decompose", "Certify and always decompose");
  decompose->add_option("state", state_path, "State file")->required();
  decompose->add_option("--out", out_path, "Report file (default: stdout)");

  double pmin = 0.0, pmax = 1.0;
  int steps = 101;
  auto* scan = app.add_subcommand(
      "scan-a8", "Scan the depolarized-a8 family and locate the threshold");
  scan->add_option("--pmin", pmin, "Lower end of the scan");
  scan->add_option("--pmax", pmax, "Upper end of the scan");
  scan->add_option("--steps", steps, "Number of rows");
  scan->add_option("--out", out_path, "CSV file (default: stdout)");

  std::string backend = "auto";
  bool oracle = false, exact = false;
  std::uint64_t shots = 1024, seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a circuit");
  simulate->add_option("circuit", circuit_path, "Circuit file")->required();
  simulate->add_option("--backend", backend, "dense | cov | auto");
  simulate->add_flag("--oracle", oracle,
                     "Allow auto to pick the dense oracle backend");
  simulate->add_flag("--exact", exact, "Enumerate all branches exactly");
  simulate->add_option("--shots", shots, "Shot count for sampling mode");
  simulate->add_option("--seed", seed, "Sampling seed");
  simulate->add_option("--out", out_path, "Histogram file (default: stdout)");

  bool corrupt_update = false;
  auto* crosscheck = app.add_subcommand(
      "crosscheck", "Compare dense and correlation backends branch by branch");
  crosscheck->add_option("circuit", circuit_path, "Circuit file")->required();
  crosscheck->add_flag("--exact", exact, "Accepted for symmetry; always exact");
  crosscheck
      ->add_flag("--corrupt-update", corrupt_update,
                 "Deliberately corrupt the correlation backend (negative "
                 "control)")
      ->group("");  // hidden
  crosscheck->add_option("--out", out_path, "Report file (default: stdout)");

  std::string kind = "gaussian-pure";
  int components = 3;
  auto* random_state =
      app.add_subcommand("random-state", "Generate a reproducible test state");
  random_state->add_option("--kind", kind,
                           "gaussian-pure | even-pure | gaussian-mixture | "
                           "even-mixed");
  random_state->add_option("--seed", seed, "Generator seed");
  random_state->add_option("--components", components, "Mixture size (<= 8)");
  random_state->add_option("--out", out_path, "State file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify->parsed())
      return cmd_certify(state_path, decompose_flag, tol, out_path);
    if (decompose->parsed())
      return cmd_certify(state_path, /*with_decomposition=*/true, tol,
                         out_path);
    if (scan->parsed()) return cmd_scan(pmin, pmax, steps, out_path);
    if (simulate->parsed())
      return cmd_simulate(circuit_path, backend, oracle, exact, shots, seed,
                          out_path);
    if (crosscheck->parsed())
      return cmd_crosscheck(circuit_path, corrupt_update, out_path);
    if (random_state->parsed())
      return cmd_random_state(kind, seed, components, out_path);
  } catch (const NotConvexGaussian& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
