#pragma once

#include <string>

#include "flocert/certifier.hpp"
#include "flocert/simulator.hpp"
#include "flocert/types.hpp"

namespace flocert::io {

/// On-disk state document: JSON with `modes`, `kind` and either complex
/// `amplitudes`/`matrix` (entries as [re, im] pairs) or a real `matrix` for
/// correlation kind. All writers emit 17 significant digits.
struct State {
  enum class Kind { Pure, Density, Correlation };
  Kind kind = Kind::Pure;
  int modes = 0;
  ComplexVector amplitudes;   // Pure
  ComplexMatrix matrix;       // Density
  RealMatrix correlation;     // Correlation

  /// Density-operator view (outer product for pure states). Throws for
  /// correlation kind.
  ComplexMatrix as_density() const;
};

State parse_state(const std::string& text);   // throws ParseError
std::string serialize_state(const State& state);
State load_state(const std::string& path);
void save_state(const State& state, const std::string& path);

/// Circuit document: `modes`, optional `ancilla` {modes, copies, state:
/// path}, `ops` list of {"type":"evolve","h":[[...]],"t":...} and
/// {"type":"measure","mode":...}; either op takes an optional
/// "if": {"outcome": i, "equals": 0|1}. `h` is real antisymmetric over the
/// full Majorana index set; a smaller matrix is zero-padded (top-left block).
/// The ancilla state path is resolved relative to the circuit file.
simulator::Circuit parse_circuit(const std::string& text,
                                 const std::string& base_dir = ".");
simulator::Circuit load_circuit(const std::string& path);

std::string serialize_histogram(const simulator::Histogram& hist);
simulator::Histogram parse_histogram(const std::string& text);

std::string serialize_report(const certifier::CertificateReport& report);
certifier::CertificateReport parse_report(const std::string& text);

/// Shortest representation with 17 significant digits.
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace flocert::io
