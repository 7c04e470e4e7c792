#include "flocert/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>

#include "flocert/certifier.hpp"
#include "flocert/errors.hpp"
#include "flocert/fock.hpp"
#include "flocert/linalg.hpp"

namespace flocert::simulator {

namespace {

constexpr double kCertainTol = 1e-12;
constexpr int kDenseModeCap = 6;
constexpr int kMaxMeasures = 20;

std::atomic<bool> g_corrupt_update{false};

double corrupt(double p0) {
  if (!g_corrupt_update.load(std::memory_order_relaxed)) return p0;
  return std::clamp(p0 * 0.98 + 0.01, 0.0, 1.0);
}

int measure_index_of(const Circuit& circuit, size_t op_pos) {
  int idx = 0;
  for (size_t i = 0; i < op_pos; ++i)
    if (std::holds_alternative<Measure>(circuit.ops[i])) ++idx;
  return idx;
}

bool guard_active(const std::optional<Guard>& guard,
                  const std::vector<int>& outcomes) {
  if (!guard) return true;
  return outcomes[guard->outcome_index] == guard->required_bit;
}

// --- dense backend ---------------------------------------------------------

// Little-endian tensor product: `low` occupies the low-order modes.
ComplexMatrix kron_little(const ComplexMatrix& low, const ComplexMatrix& high) {
  const int nl = static_cast<int>(low.rows());
  const int nh = static_cast<int>(high.rows());
  ComplexMatrix out(nl * nh, nl * nh);
  for (int a = 0; a < nh; ++a)
    for (int b = 0; b < nh; ++b)
      out.block(a * nl, b * nl, nl, nl) = high(a, b) * low;
  return out;
}

ComplexMatrix initial_dense(const Circuit& circuit) {
  const int d = circuit.d_comp;
  ComplexMatrix rho = ComplexMatrix::Zero(fock::dim(d), fock::dim(d));
  rho(0, 0) = 1.0;
  if (circuit.ancilla)
    for (int c = 0; c < circuit.ancilla->copies; ++c)
      rho = kron_little(rho, circuit.ancilla->state);
  return rho;
}

ComplexMatrix dense_evolution_unitary(const Evolve& ev, int total_modes) {
  const int n = fock::dim(total_modes);
  ComplexMatrix h_op = ComplexMatrix::Zero(n, n);
  const int s = static_cast<int>(ev.support.size());
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) {
      if (ev.h_sub(i, j) == 0.0) continue;
      h_op += Complex(0, 2.0 * ev.h_sub(i, j)) *
              (fock::majorana(ev.support[i] + 1, total_modes) *
               fock::majorana(ev.support[j] + 1, total_modes));
    }
  auto [vals, vecs] = linalg::eigh(h_op, 1e-9);
  ComplexVector phases(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    phases(i) = std::exp(Complex(0, -vals(i) * ev.t));
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

double dense_prob_zero(const ComplexMatrix& rho, int mode) {
  double p1 = 0.0;
  for (int j = 0; j < rho.rows(); ++j)
    if (fock::occupation(j, mode)) p1 += rho(j, j).real();
  return std::clamp(1.0 - p1, 0.0, 1.0);
}

ComplexMatrix dense_project(const ComplexMatrix& rho, int mode, int outcome,
                            double prob) {
  ComplexMatrix out = rho;
  for (int j = 0; j < rho.rows(); ++j)
    if (fock::occupation(j, mode) != outcome) {
      out.row(j).setZero();
      out.col(j).setZero();
    }
  return out / prob;
}

// --- shared runner skeleton -------------------------------------------------

// Runs the circuit once; `choose` picks the outcome of each measurement
// given (static measure index, prob of outcome 0). State handling is
// supplied by the backend callbacks.
template <class State, class EvolveFn, class ProbFn, class ApplyFn,
          class ChooseFn>
RunRecord run_generic(const Circuit& circuit, State state, EvolveFn do_evolve,
                      ProbFn prob_zero, ApplyFn apply_outcome,
                      ChooseFn choose) {
  RunRecord rec;
  rec.outcomes.assign(circuit.measure_count(), -1);
  rec.probabilities.assign(circuit.measure_count(), 1.0);
  int midx = 0;
  for (const Instruction& op : circuit.ops) {
    if (const Evolve* ev = std::get_if<Evolve>(&op)) {
      if (guard_active(ev->guard, rec.outcomes)) do_evolve(state, *ev);
    } else {
      const Measure& ms = std::get<Measure>(op);
      if (guard_active(ms.guard, rec.outcomes)) {
        double p0 = prob_zero(state, ms.mode);
        int outcome = choose(midx, p0);
        double p = (outcome == 0) ? p0 : 1.0 - p0;
        apply_outcome(state, ms.mode, outcome, p);
        rec.outcomes[midx] = outcome;
        rec.probabilities[midx] = p;
        rec.joint_probability *= p;
      }
      ++midx;
    }
  }
  if constexpr (std::is_same_v<State, ComplexMatrix>) {
    rec.final_dense = std::move(state);
  } else {
    rec.final_correlation = std::move(state);
  }
  return rec;
}

int sample_outcome(double p0, Rng& rng) {
  if (p0 < kCertainTol) return 1;
  if (1.0 - p0 < kCertainTol) return 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return (unif(rng) < p0) ? 0 : 1;
}

RunRecord run_dense_chosen(const Circuit& circuit,
                           const std::function<int(int, double)>& choose) {
  const int total = circuit.total_modes();
  return run_generic(
      circuit, initial_dense(circuit),
      [&](ComplexMatrix& rho, const Evolve& ev) {
        ComplexMatrix u = dense_evolution_unitary(ev, total);
        rho = u * rho * u.adjoint();
      },
      [](const ComplexMatrix& rho, int mode) {
        return dense_prob_zero(rho, mode);
      },
      [](ComplexMatrix& rho, int mode, int outcome, double prob) {
        rho = dense_project(rho, mode, outcome, prob);
      },
      choose);
}

RunRecord run_cov_chosen(const Circuit& circuit,
                         gaussian::CorrelationMatrix initial,
                         const std::function<int(int, double)>& choose) {
  return run_generic(
      circuit, std::move(initial),
      [](gaussian::CorrelationMatrix& cm, const Evolve& ev) {
        cm = gaussian::evolve_support(cm, ev.support, ev.h_sub, ev.t);
      },
      [](const gaussian::CorrelationMatrix& cm, int mode) {
        return corrupt(
            std::clamp(0.5 * (1.0 + cm.m(2 * mode - 2, 2 * mode - 1)), 0.0,
                       1.0));
      },
      [](gaussian::CorrelationMatrix& cm, int mode, int outcome, double) {
        cm = gaussian::measure_mode_forced(cm, mode, outcome).state;
      },
      choose);
}

// --- ancilla decomposition sampling ----------------------------------------

struct AncillaComponents {
  std::vector<double> weights;
  std::vector<gaussian::CorrelationMatrix> correlations;
};

AncillaComponents decompose_ancilla(const Ancilla& ancilla) {
  if (ancilla.modes != 4)
    throw WrongAncillaModes("ancilla must have exactly 4 modes");
  auto report = certifier::certify(ancilla.state, /*with_decomposition=*/true);
  if (!report.is_convex_gaussian)
    throw NotConvexGaussian(
        "ancilla state is not convex-Gaussian (C+ = " +
            std::to_string(report.c_plus) +
            ", C- = " + std::to_string(report.c_minus) + ")",
        report.c_plus, report.c_minus);
  AncillaComponents out;
  for (const auto& comp : *report.decomposition) {
    out.weights.push_back(comp.weight);
    out.correlations.push_back(comp.correlation);
  }
  return out;
}

gaussian::CorrelationMatrix direct_sum_initial(
    const Circuit& circuit,
    const std::vector<const gaussian::CorrelationMatrix*>& copies) {
  const int total = circuit.total_modes();
  gaussian::CorrelationMatrix cm = gaussian::vacuum_correlation(total);
  int offset = 2 * circuit.d_comp;
  for (const auto* copy : copies) {
    cm.m.block(offset, offset, 8, 8) = copy->m;
    offset += 8;
  }
  return cm;
}

}  // namespace

int Circuit::measure_count() const {
  int count = 0;
  for (const Instruction& op : ops)
    if (std::holds_alternative<Measure>(op)) ++count;
  return count;
}

void validate(const Circuit& circuit) {
  if (circuit.d_comp < 0 || circuit.total_modes() < 1)
    throw OutOfRange("circuit must span at least one mode");
  if (circuit.ancilla && circuit.ancilla->copies < 1)
    throw OutOfRange("ancilla copy count must be positive");
  const int total = circuit.total_modes();
  int midx = 0;
  for (const Instruction& op : circuit.ops) {
    const std::optional<Guard>* guard = nullptr;
    if (const Evolve* ev = std::get_if<Evolve>(&op)) {
      guard = &ev->guard;
      if (ev->h_sub.rows() != static_cast<Eigen::Index>(ev->support.size()) ||
          ev->h_sub.rows() != ev->h_sub.cols())
        throw OutOfRange("evolution submatrix does not match its support");
      if (linalg::max_abs(RealMatrix(ev->h_sub + ev->h_sub.transpose())) >
          1e-10)
        throw NotAntisymmetric("evolution coefficient matrix");
      for (int k : ev->support)
        if (k < 0 || k >= 2 * total)
          throw IndexOutOfRange("evolution support index out of range");
    } else {
      const Measure& ms = std::get<Measure>(op);
      guard = &ms.guard;
      if (ms.mode < 1 || ms.mode > total)
        throw IndexOutOfRange("measured mode out of range");
      ++midx;
    }
    if (*guard) {
      const int ref = (*guard)->outcome_index;
      const int limit =
          std::holds_alternative<Measure>(op) ? midx - 1 : midx;
      if (ref < 0 || ref >= limit)
        throw InvalidGuard("guard must reference an earlier measurement");
      if ((*guard)->required_bit != 0 && (*guard)->required_bit != 1)
        throw InvalidGuard("guard bit must be 0 or 1");
    }
  }
}

RunRecord run_dense(const Circuit& circuit, Rng& rng) {
  validate(circuit);
  if (circuit.total_modes() > kDenseModeCap)
    throw TooManyModes("dense backend supports at most 6 total modes");
  return run_dense_chosen(
      circuit, [&](int, double p0) { return sample_outcome(p0, rng); });
}

RunRecord run_cov(const Circuit& circuit, Rng& rng) {
  validate(circuit);
  if (circuit.ancilla)
    throw WrongAncillaModes(
        "correlation backend takes no ancilla; sample a Gaussian component "
        "first (run_with_ancilla)");
  return run_cov_chosen(
      circuit, gaussian::vacuum_correlation(circuit.total_modes()),
      [&](int, double p0) { return sample_outcome(p0, rng); });
}

RunRecord run_with_ancilla(const Circuit& circuit, Rng& rng) {
  validate(circuit);
  if (!circuit.ancilla) return run_cov(circuit, rng);
  AncillaComponents comps = decompose_ancilla(*circuit.ancilla);
  std::discrete_distribution<int> pick(comps.weights.begin(),
                                       comps.weights.end());
  std::vector<const gaussian::CorrelationMatrix*> copies;
  for (int c = 0; c < circuit.ancilla->copies; ++c)
    copies.push_back(&comps.correlations[pick(rng)]);
  return run_cov_chosen(
      circuit, direct_sum_initial(circuit, copies),
      [&](int, double p0) { return sample_outcome(p0, rng); });
}

namespace {

std::string outcome_key(const std::vector<int>& outcomes) {
  std::string key;
  key.reserve(outcomes.size());
  for (int o : outcomes) key += (o < 0) ? '-' : static_cast<char>('0' + o);
  return key;
}

// Enumerates all outcome sequences by re-running the circuit with forced
// outcomes (states are small; re-execution keeps the recursion simple).
void enumerate_branches(
    const Circuit& circuit,
    const std::function<RunRecord(const std::function<int(int, double)>&)>&
        runner,
    double weight, Histogram* hist) {
  (void)circuit;
  // Depth-first over forced outcome prefixes; each frame re-runs the circuit
  // from scratch (states are small, re-execution keeps the recursion simple).
  struct Frame {
    std::vector<int> forced;
  };
  std::vector<Frame> stack;
  stack.push_back({{}});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    size_t used = 0;
    bool pruned = false;
    bool extended = false;
    RunRecord rec = runner([&](int, double p0) -> int {
      if (pruned) return 0;
      if (used < frame.forced.size()) {
        int bit = frame.forced[used++];
        double p = (bit == 0) ? p0 : 1.0 - p0;
        if (p < kCertainTol) pruned = true;
        return bit;
      }
      extended = true;
      if (frame.forced.size() >= kMaxMeasures)
        throw TooManyBranches("exact enumeration limited to 20 measurements");
      return 0;
    });
    if (pruned) continue;
    if (extended) {
      for (int bit : {1, 0}) {
        Frame next = frame;
        next.forced.push_back(bit);
        stack.push_back(std::move(next));
      }
      continue;
    }
    hist->table[outcome_key(rec.outcomes)] += weight * rec.joint_probability;
  }
}

}  // namespace

Histogram outcome_distribution_exact(const Circuit& circuit, Backend backend) {
  validate(circuit);
  if (circuit.measure_count() > kMaxMeasures)
    throw TooManyBranches("exact enumeration limited to 20 measurements");
  Histogram hist;
  hist.exact = true;
  hist.backend = backend;
  auto forced_runner = [](auto run_one) {
    return [run_one](const std::function<int(int, double)>& choose) {
      return run_one(choose);
    };
  };
  if (backend == Backend::Dense) {
    if (circuit.total_modes() > kDenseModeCap)
      throw TooManyModes("dense backend supports at most 6 total modes");
    enumerate_branches(
        circuit,
        forced_runner([&](const std::function<int(int, double)>& choose) {
          return run_dense_chosen(circuit, choose);
        }),
        1.0, &hist);
    return hist;
  }
  if (!circuit.ancilla) {
    enumerate_branches(
        circuit,
        forced_runner([&](const std::function<int(int, double)>& choose) {
          return run_cov_chosen(
              circuit, gaussian::vacuum_correlation(circuit.total_modes()),
              choose);
        }),
        1.0, &hist);
    return hist;
  }
  // Ancilla: average exactly over Gaussian-component assignments.
  AncillaComponents comps = decompose_ancilla(*circuit.ancilla);
  const int k = circuit.ancilla->copies;
  const size_t r = comps.weights.size();
  double assignments = std::pow(static_cast<double>(r), k);
  if (assignments > 4096.0)
    throw TooManyBranches("too many ancilla component assignments");
  std::vector<size_t> choice(k, 0);
  while (true) {
    double weight = 1.0;
    std::vector<const gaussian::CorrelationMatrix*> copies;
    for (int c = 0; c < k; ++c) {
      weight *= comps.weights[choice[c]];
      copies.push_back(&comps.correlations[choice[c]]);
    }
    if (weight > 1e-15) {
      gaussian::CorrelationMatrix initial =
          direct_sum_initial(circuit, copies);
      enumerate_branches(
          circuit,
          forced_runner([&](const std::function<int(int, double)>& choose) {
            return run_cov_chosen(circuit, initial, choose);
          }),
          weight, &hist);
    }
    int pos = 0;
    while (pos < k && ++choice[pos] == r) choice[pos++] = 0;
    if (pos == k) break;
  }
  return hist;
}

Histogram outcome_distribution_shots(const Circuit& circuit, Backend backend,
                                     std::uint64_t shots, std::uint64_t seed) {
  validate(circuit);
  Histogram hist;
  hist.exact = false;
  hist.backend = backend;
  hist.seed = seed;
  hist.shots = shots;
  const double unit = 1.0 / static_cast<double>(shots);
  if (backend == Backend::Cov && circuit.ancilla) {
    // Certify and decompose the ancilla once; shots only sample components.
    AncillaComponents comps = decompose_ancilla(*circuit.ancilla);
    std::discrete_distribution<int> pick(comps.weights.begin(),
                                         comps.weights.end());
    for (std::uint64_t s = 0; s < shots; ++s) {
      Rng rng(split_seed(seed, s));
      std::vector<const gaussian::CorrelationMatrix*> copies;
      for (int c = 0; c < circuit.ancilla->copies; ++c)
        copies.push_back(&comps.correlations[pick(rng)]);
      RunRecord rec = run_cov_chosen(
          circuit, direct_sum_initial(circuit, copies),
          [&](int, double p0) { return sample_outcome(p0, rng); });
      hist.table[outcome_key(rec.outcomes)] += unit;
    }
    return hist;
  }
  for (std::uint64_t s = 0; s < shots; ++s) {
    Rng rng(split_seed(seed, s));
    RunRecord rec = (backend == Backend::Dense) ? run_dense(circuit, rng)
                                                : run_with_ancilla(circuit, rng);
    hist.table[outcome_key(rec.outcomes)] += unit;
  }
  return hist;
}

void set_corrupt_update(bool corrupt) {
  g_corrupt_update.store(corrupt, std::memory_order_relaxed);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace flocert::simulator
