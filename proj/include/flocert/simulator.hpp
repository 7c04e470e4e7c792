#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flocert/gaussian.hpp"
#include "flocert/types.hpp"

namespace flocert::simulator {

/// Classical condition on an earlier measurement. `outcome_index` is the
/// static position of the referenced Measure among the circuit's Measure
/// instructions; a guard referencing a skipped measurement is false.
struct Guard {
  int outcome_index = 0;
  int required_bit = 0;
};

/// Quadratic evolution exp(-iHt), H = i sum h_kl c_k c_l, stored compactly:
/// h_sub is the antisymmetric block over the listed 0-based Majorana indices
/// and h vanishes elsewhere.
struct Evolve {
  std::vector<int> support;
  RealMatrix h_sub;
  double t = 0.0;
  std::optional<Guard> guard;
};

/// Occupation measurement of a mode (1-based over the full mode set).
struct Measure {
  int mode = 1;
  std::optional<Guard> guard;
};

using Instruction = std::variant<Evolve, Measure>;

/// Ancilla register: `copies` independent copies of a 4-mode density
/// operator, appended after the computational modes.
struct Ancilla {
  int modes = 4;
  int copies = 1;
  ComplexMatrix state;  // 16x16 density operator
};

struct Circuit {
  int d_comp = 0;
  std::optional<Ancilla> ancilla;
  std::vector<Instruction> ops;

  int total_modes() const {
    return d_comp + (ancilla ? ancilla->modes * ancilla->copies : 0);
  }
  int measure_count() const;
};

/// Structural checks: index ranges, guard back-references, antisymmetry.
void validate(const Circuit& circuit);

struct RunRecord {
  /// One entry per Measure in static order: 0, 1, or -1 when skipped.
  std::vector<int> outcomes;
  /// Conditional probability of each recorded outcome (1 for skipped).
  std::vector<double> probabilities;
  double joint_probability = 1.0;
  std::optional<ComplexMatrix> final_dense;  // density operator
  std::optional<gaussian::CorrelationMatrix> final_correlation;
  std::uint64_t seed = 0;
};

/// Dense density-operator backend; the oracle. Total modes <= 6.
RunRecord run_dense(const Circuit& circuit, Rng& rng);

/// Correlation-matrix backend. The circuit must have no ancilla (use
/// run_with_ancilla, which samples a Gaussian component first).
RunRecord run_cov(const Circuit& circuit, Rng& rng);

/// Certifies the ancilla convex-Gaussian, samples one decomposition
/// component per copy, direct-sums correlation matrices with the
/// computational vacuum, and delegates to the correlation backend.
/// Throws NotConvexGaussian (with both concurrences) otherwise.
RunRecord run_with_ancilla(const Circuit& circuit, Rng& rng);

enum class Backend { Dense, Cov };

struct Histogram {
  /// Key: one character per Measure in static order, '0'/'1'/'-' (skipped).
  std::map<std::string, double> table;  // probability or frequency
  bool exact = false;
  Backend backend = Backend::Cov;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
};

/// Exact branch enumeration with chain-rule probabilities (<= 20 measures);
/// ancillas are averaged over their Gaussian decomposition (cov backend) or
/// carried in the density operator (dense backend).
Histogram outcome_distribution_exact(const Circuit& circuit, Backend backend);

/// Sampled distribution; shot s uses an independent generator seeded by a
/// splitmix64 stream over (seed, s), so shots can run in any order.
Histogram outcome_distribution_shots(const Circuit& circuit, Backend backend,
                                     std::uint64_t shots, std::uint64_t seed);

/// Test hook: deliberately corrupts the correlation-backend measurement
/// probabilities (negative control for backend cross-validation).
void set_corrupt_update(bool corrupt);

/// splitmix64 step, the documented per-shot seed derivation.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace flocert::simulator
