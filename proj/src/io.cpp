#include "flocert/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flocert/errors.hpp"
#include "flocert/fock.hpp"

namespace flocert::io {

namespace {

using nlohmann::json;

json must_parse(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError("invalid JSON document");
  return j;
}

double get_number(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number())
    throw ParseError("missing or non-numeric field '" + field + "'");
  return j[field].get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number_integer())
    throw ParseError("missing or non-integer field '" + field + "'");
  return j[field].get<int>();
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

ComplexVector parse_complex_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  ComplexVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = parse_complex(j[i], where);
  return v;
}

ComplexMatrix parse_complex_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty nested array");
  ComplexMatrix m(j.size(), j[0].size());
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size())
      throw ParseError(where + ": ragged matrix rows");
    for (size_t c = 0; c < j[r].size(); ++c)
      m(r, c) = parse_complex(j[r][c], where);
  }
  return m;
}

RealMatrix parse_real_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty nested array");
  RealMatrix m(j.size(), j[0].size());
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size())
      throw ParseError(where + ": ragged matrix rows");
    for (size_t c = 0; c < j[r].size(); ++c) {
      if (!j[r][c].is_number())
        throw ParseError(where + ": entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

// --- writers (hand-rolled so every number carries 17 significant digits) ---

void emit(std::string* out, double x) { *out += format_double(x); }

void emit(std::string* out, const Complex& z) {
  *out += '[';
  emit(out, z.real());
  *out += ',';
  emit(out, z.imag());
  *out += ']';
}

template <class Vec>
void emit_vector(std::string* out, const Vec& v) {
  *out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) *out += ',';
    emit(out, v(i));
  }
  *out += ']';
}

template <class Mat>
void emit_matrix(std::string* out, const Mat& m) {
  *out += '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) *out += ',';
    *out += '[';
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) *out += ',';
      emit(out, m(r, c));
    }
    *out += ']';
  }
  *out += ']';
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";  // canonicalize -0 (JSON integer parsing drops it)
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

ComplexMatrix State::as_density() const {
  if (kind == Kind::Pure) return amplitudes * amplitudes.adjoint();
  if (kind == Kind::Density) return matrix;
  throw ParseError("a correlation document has no density-operator view");
}

State parse_state(const std::string& text) {
  json j = must_parse(text);
  State st;
  st.modes = get_int(j, "modes");
  if (st.modes < 1 || st.modes > 8)
    throw ParseError("field 'modes' must be in 1..8");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ParseError("missing string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const int n = fock::dim(st.modes);
  if (kind == "pure") {
    st.kind = State::Kind::Pure;
    if (!j.contains("amplitudes"))
      throw ParseError("pure state requires field 'amplitudes'");
    st.amplitudes = parse_complex_vector(j["amplitudes"], "amplitudes");
    if (st.amplitudes.size() != n)
      throw ParseError("amplitudes length does not match 2^modes");
    if (std::abs(st.amplitudes.norm() - 1.0) > 1e-8)
      throw ParseError("pure state amplitudes are not normalized");
  } else if (kind == "density") {
    st.kind = State::Kind::Density;
    if (!j.contains("matrix"))
      throw ParseError("density state requires field 'matrix'");
    st.matrix = parse_complex_matrix(j["matrix"], "matrix");
    if (st.matrix.rows() != n || st.matrix.cols() != n)
      throw ParseError("matrix dimensions do not match 2^modes");
  } else if (kind == "correlation") {
    st.kind = State::Kind::Correlation;
    if (!j.contains("matrix"))
      throw ParseError("correlation state requires field 'matrix'");
    st.correlation = parse_real_matrix(j["matrix"], "matrix");
    if (st.correlation.rows() != 2 * st.modes ||
        st.correlation.cols() != 2 * st.modes)
      throw ParseError("correlation matrix must be 2*modes square");
  } else {
    throw ParseError("kind must be pure, density or correlation");
  }
  return st;
}

std::string serialize_state(const State& state) {
  std::string out = "{\"modes\":" + std::to_string(state.modes);
  switch (state.kind) {
    case State::Kind::Pure:
      out += ",\"kind\":\"pure\",\"amplitudes\":";
      emit_vector(&out, state.amplitudes);
      break;
    case State::Kind::Density:
      out += ",\"kind\":\"density\",\"matrix\":";
      emit_matrix(&out, state.matrix);
      break;
    case State::Kind::Correlation:
      out += ",\"kind\":\"correlation\",\"matrix\":";
      emit_matrix(&out, state.correlation);
      break;
  }
  out += "}\n";
  return out;
}

State load_state(const std::string& path) {
  return parse_state(read_file(path));
}

void save_state(const State& state, const std::string& path) {
  write_file(path, serialize_state(state));
}

namespace {

std::optional<simulator::Guard> parse_guard(const json& op) {
  if (!op.contains("if")) return std::nullopt;
  const json& g = op["if"];
  simulator::Guard guard;
  guard.outcome_index = get_int(g, "outcome");
  guard.required_bit = get_int(g, "equals");
  return guard;
}

simulator::Evolve parse_evolve(const json& op, int total_modes) {
  RealMatrix h = parse_real_matrix(op["h"], "h");
  if (h.rows() != h.cols()) throw ParseError("h must be square");
  if (h.rows() > 2 * total_modes)
    throw ParseError("h exceeds the circuit's Majorana index range");
  simulator::Evolve ev;
  ev.t = get_number(op, "t");
  ev.guard = parse_guard(op);
  // Compact support: keep only indices touched by a nonzero coefficient.
  std::vector<int> support;
  for (int i = 0; i < h.rows(); ++i) {
    bool touched = false;
    for (int j = 0; j < h.cols(); ++j)
      if (h(i, j) != 0.0 || h(j, i) != 0.0) touched = true;
    if (touched) support.push_back(i);
  }
  if (support.empty()) support = {0, 1};
  ev.support = support;
  ev.h_sub.resize(support.size(), support.size());
  for (size_t a = 0; a < support.size(); ++a)
    for (size_t b = 0; b < support.size(); ++b)
      ev.h_sub(a, b) = h(support[a], support[b]);
  return ev;
}

}  // namespace

simulator::Circuit parse_circuit(const std::string& text,
                                 const std::string& base_dir) {
  json j = must_parse(text);
  simulator::Circuit circuit;
  circuit.d_comp = get_int(j, "modes");
  if (j.contains("ancilla")) {
    const json& a = j["ancilla"];
    simulator::Ancilla anc;
    anc.modes = get_int(a, "modes");
    anc.copies = get_int(a, "copies");
    if (!a.contains("state") || !a["state"].is_string())
      throw ParseError("ancilla requires a 'state' file path");
    std::filesystem::path p = a["state"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    State st = load_state(p.string());
    if (st.kind == State::Kind::Correlation)
      throw ParseError("ancilla state must be pure or density kind");
    if (st.modes != anc.modes)
      throw ParseError("ancilla state mode count mismatch");
    anc.state = st.as_density();
    circuit.ancilla = anc;
  }
  if (!j.contains("ops") || !j["ops"].is_array())
    throw ParseError("missing 'ops' array");
  const int total = circuit.total_modes();
  for (const json& op : j["ops"]) {
    if (!op.contains("type") || !op["type"].is_string())
      throw ParseError("every op needs a string 'type'");
    const std::string type = op["type"].get<std::string>();
    if (type == "evolve") {
      if (!op.contains("h")) throw ParseError("evolve op requires 'h'");
      circuit.ops.emplace_back(parse_evolve(op, total));
    } else if (type == "measure") {
      simulator::Measure ms;
      ms.mode = get_int(op, "mode");
      ms.guard = parse_guard(op);
      circuit.ops.emplace_back(ms);
    } else {
      throw ParseError("unknown op type: " + type);
    }
  }
  try {
    simulator::validate(circuit);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid circuit: ") + e.what());
  }
  return circuit;
}

simulator::Circuit load_circuit(const std::string& path) {
  return parse_circuit(read_file(path),
                       std::filesystem::path(path).parent_path().string());
}

std::string serialize_histogram(const simulator::Histogram& hist) {
  std::string out = "{\"backend\":\"";
  out += (hist.backend == simulator::Backend::Dense) ? "dense" : "cov";
  out += "\",\"mode\":\"";
  out += hist.exact ? "exact" : "shots";
  out += "\"";
  if (!hist.exact) {
    out += ",\"seed\":" + std::to_string(hist.seed);
    out += ",\"shots\":" + std::to_string(hist.shots);
  }
  out += ",\"histogram\":{";
  bool first = true;
  for (const auto& [key, value] : hist.table) {
    if (!first) out += ',';
    first = false;
    out += '"' + key + "\":";
    emit(&out, value);
  }
  out += "}}\n";
  return out;
}

simulator::Histogram parse_histogram(const std::string& text) {
  json j = must_parse(text);
  simulator::Histogram hist;
  if (!j.contains("backend") || !j["backend"].is_string() ||
      !j.contains("mode") || !j["mode"].is_string() ||
      !j.contains("histogram") || !j["histogram"].is_object())
    throw ParseError("malformed histogram document");
  hist.backend = (j["backend"].get<std::string>() == "dense")
                     ? simulator::Backend::Dense
                     : simulator::Backend::Cov;
  hist.exact = j["mode"].get<std::string>() == "exact";
  if (j.contains("seed")) hist.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("shots")) hist.shots = j["shots"].get<std::uint64_t>();
  for (const auto& [key, value] : j["histogram"].items())
    hist.table[key] = value.get<double>();
  return hist;
}

std::string serialize_report(const certifier::CertificateReport& report) {
  std::string out = "{\"c_plus\":";
  emit(&out, report.c_plus);
  out += ",\"c_minus\":";
  emit(&out, report.c_minus);
  out += ",\"is_convex_gaussian\":";
  out += report.is_convex_gaussian ? "true" : "false";
  out += ",\"spectrum_plus\":";
  emit_vector(&out, report.spectrum_plus);
  out += ",\"spectrum_minus\":";
  emit_vector(&out, report.spectrum_minus);
  if (report.f_gauss) {
    out += ",\"f_gauss\":";
    emit(&out, *report.f_gauss);
    out += ",\"distance_lower\":";
    emit(&out, *report.distance_lower);
    out += ",\"distance_upper\":";
    emit(&out, *report.distance_upper);
  }
  if (report.decomposition) {
    out += ",\"decomposition\":[";
    bool first = true;
    for (const auto& comp : *report.decomposition) {
      if (!first) out += ',';
      first = false;
      out += "{\"weight\":";
      emit(&out, comp.weight);
      out += ",\"sector\":\"";
      out += (comp.sector == Sector::Even) ? "even" : "odd";
      out += "\",\"amplitudes\":";
      emit_vector(&out, comp.state);
      out += ",\"correlation\":";
      emit_matrix(&out, comp.correlation.m);
      out += '}';
    }
    out += ']';
  }
  out += "}\n";
  return out;
}

certifier::CertificateReport parse_report(const std::string& text) {
  json j = must_parse(text);
  certifier::CertificateReport report;
  report.c_plus = get_number(j, "c_plus");
  report.c_minus = get_number(j, "c_minus");
  if (!j.contains("is_convex_gaussian") || !j["is_convex_gaussian"].is_boolean())
    throw ParseError("missing boolean field 'is_convex_gaussian'");
  report.is_convex_gaussian = j["is_convex_gaussian"].get<bool>();
  auto parse_spectrum = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_array())
      throw ParseError(std::string("missing array field '") + field + "'");
    RealVector v(j[field].size());
    for (size_t i = 0; i < j[field].size(); ++i)
      v(i) = j[field][i].get<double>();
    return v;
  };
  report.spectrum_plus = parse_spectrum("spectrum_plus");
  report.spectrum_minus = parse_spectrum("spectrum_minus");
  if (j.contains("f_gauss")) {
    report.f_gauss = get_number(j, "f_gauss");
    report.distance_lower = get_number(j, "distance_lower");
    report.distance_upper = get_number(j, "distance_upper");
  }
  if (j.contains("decomposition")) {
    std::vector<certifier::GaussianComponent> comps;
    for (const json& c : j["decomposition"]) {
      certifier::GaussianComponent comp;
      comp.weight = get_number(c, "weight");
      comp.sector = (c.contains("sector") &&
                     c["sector"].get<std::string>() == "odd")
                        ? Sector::Odd
                        : Sector::Even;
      comp.state = parse_complex_vector(c["amplitudes"], "amplitudes");
      comp.correlation = {4, parse_real_matrix(c["correlation"], "correlation")};
      comps.push_back(std::move(comp));
    }
    report.decomposition = std::move(comps);
  }
  return report;
}

}  // namespace flocert::io
