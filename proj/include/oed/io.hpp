#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "oed/errors.hpp"
#include "oed/experiment_design.hpp"
#include "oed/experiment_log.hpp"
#include "oed/informativity.hpp"
#include "oed/matrix.hpp"
#include "oed/rational.hpp"
#include "oed/realization.hpp"
#include "oed/state_space.hpp"

namespace oed {

using Json = nlohmann::ordered_json;

namespace detail {

/// All file formats carry entries as exact rational text ("num" or
/// "num/den"); doubles convert losslessly through their binary expansion,
/// so round-trips are bit-exact in both scalar modes.
template <typename T>
Rational to_rational(const T& v) {
  if constexpr (std::is_same_v<T, double>)
    return Rational(v);
  else
    return v;
}

template <typename T>
T from_rational(const Rational& r) {
  if constexpr (std::is_same_v<T, double>)
    return r.get_d();
  else
    return r;
}

template <typename T>
std::string entry_to_string(const T& v) {
  return to_string(to_rational(v));
}

template <typename T>
T entry_from_string(const std::string& s) {
  return from_rational<T>(parse_rational(s));
}

template <typename T>
Json matrix_to_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(entry_to_string(m(i, j)));
  return out;
}

template <typename T>
Matrix<T> matrix_from_json(const Json& j, int rows, int cols, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw ConfigError("field '" + name + "' must hold " + std::to_string(rows * cols) +
                      " row-major entries");
  Matrix<T> m(rows, cols);
  int idx = 0;
  for (const auto& e : j) {
    Rational r;
    if (e.is_string())
      r = parse_rational(e.template get<std::string>());
    else if (e.is_number_integer())
      r = parse_rational(e.dump());
    else if (e.is_number())
      r = Rational(e.template get<double>());
    else
      throw ConfigError("field '" + name + "' holds a non-scalar entry");
    m(idx / cols, idx % cols) = from_rational<T>(r);
    ++idx;
  }
  return m;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

// --- state-space systems -------------------------------------------------

template <typename T>
Json system_to_json(const StateSpaceSystem<T>& sys) {
  Json j;
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["p"] = sys.p();
  j["A"] = detail::matrix_to_json(sys.A);
  j["B"] = detail::matrix_to_json(sys.B);
  j["C"] = detail::matrix_to_json(sys.C);
  j["D"] = detail::matrix_to_json(sys.D);
  return j;
}

template <typename T>
StateSpaceSystem<T> system_from_json(const Json& j) {
  for (const char* field : {"n", "m", "p", "A", "B", "C", "D"})
    if (!j.contains(field)) throw ConfigError(std::string("system is missing field '") + field + "'");
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  const int p = j.at("p").get<int>();
  if (n < 0 || m < 1 || p < 1) throw ConfigError("system needs n >= 0, m >= 1, p >= 1");
  return StateSpaceSystem<T>(detail::matrix_from_json<T>(j.at("A"), n, n, "A"),
                             detail::matrix_from_json<T>(j.at("B"), n, m, "B"),
                             detail::matrix_from_json<T>(j.at("C"), p, n, "C"),
                             detail::matrix_from_json<T>(j.at("D"), p, m, "D"));
}

// --- experiment logs (CSV) -----------------------------------------------

template <typename T>
std::string log_to_csv(const ExperimentLog<T>& log) {
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= log.m(); ++i) out << ",u_" << i;
  for (int i = 1; i <= log.p(); ++i) out << ",y_" << i;
  out << "\n";
  for (int t = 0; t < log.t(); ++t) {
    out << t;
    for (int i = 0; i < log.m(); ++i) out << "," << detail::entry_to_string(log.u(i, t));
    for (int i = 0; i < log.p(); ++i) out << "," << detail::entry_to_string(log.y(i, t));
    out << "\n";
  }
  return out.str();
}

template <typename T>
ExperimentLog<T> log_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty log file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.empty() || header[0] != "t") throw ConfigError("log header must start with 't'");
  int m = 0;
  std::size_t pos = 1;
  while (pos < header.size() && header[pos] == "u_" + std::to_string(m + 1)) {
    ++m;
    ++pos;
  }
  int p = 0;
  while (pos < header.size() && header[pos] == "y_" + std::to_string(p + 1)) {
    ++p;
    ++pos;
  }
  if (m < 1 || p < 1 || pos != header.size())
    throw ConfigError("log header must be t,u_1..u_m,y_1..y_p");
  std::vector<std::vector<T>> u_rows(m), y_rows(p);
  int t = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != 1 + m + p)
      throw ConfigError("log row " + std::to_string(t) + " has wrong field count");
    if (fields[0] != std::to_string(t))
      throw ConfigError("log row " + std::to_string(t) + " has time index " + fields[0]);
    try {
      for (int i = 0; i < m; ++i) u_rows[i].push_back(detail::entry_from_string<T>(fields[1 + i]));
      for (int i = 0; i < p; ++i) y_rows[i].push_back(detail::entry_from_string<T>(fields[1 + m + i]));
    } catch (const ConfigError&) {
      throw ConfigError("log row " + std::to_string(t) + " holds a malformed value");
    }
    ++t;
  }
  Matrix<T> u(m, t), y(p, t);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < t; ++j) u(i, j) = u_rows[i][j];
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < t; ++j) y(i, j) = y_rows[i][j];
  return ExperimentLog<T>(u, y);
}

// --- informativity reports -----------------------------------------------

inline Json report_to_json(const InformativityReport& report) {
  Json j;
  j["ell_min"] = report.ell_min;
  j["n_min"] = report.n_min;
  j["L_actual"] = report.L_actual;
  j["rank_H"] = report.rank_H;
  j["length_ok"] = report.length_ok;
  j["rank_ok"] = report.rank_ok;
  j["informative"] = report.informative;
  j["delta_profile"] = report.delta_profile;
  j["t"] = report.t;
  j["T"] = report.T;
  return j;
}

inline InformativityReport report_from_json(const Json& j) {
  InformativityReport r;
  r.ell_min = j.at("ell_min").get<Count>();
  r.n_min = j.at("n_min").get<Count>();
  r.L_actual = j.at("L_actual").get<Count>();
  r.rank_H = j.at("rank_H").get<Count>();
  r.length_ok = j.at("length_ok").get<bool>();
  r.rank_ok = j.at("rank_ok").get<bool>();
  r.informative = j.at("informative").get<bool>();
  r.delta_profile = j.at("delta_profile").get<std::vector<Count>>();
  r.t = j.at("t").get<Count>();
  r.T = j.at("T").get<Count>();
  return r;
}

// --- design traces (JSON lines) -------------------------------------------

template <typename T>
std::string trace_to_jsonl(const DesignTrace<T>& trace) {
  std::ostringstream out;
  for (const auto& step : trace.steps) {
    Json j;
    j["t"] = step.t;
    j["k"] = step.k;
    j["rank_H"] = step.rank_H;
    j["rank_G"] = step.rank_G;
    if (step.hyperplane.has_value()) {
      Json eta = Json::array();
      for (int i = 0; i < step.hyperplane->eta.rows(); ++i)
        eta.push_back(detail::entry_to_string(step.hyperplane->eta(i, 0)));
      j["eta"] = eta;
      j["beta"] = detail::entry_to_string(step.hyperplane->beta);
    } else {
      j["eta"] = nullptr;
      j["beta"] = nullptr;
    }
    Json u = Json::array();
    for (int i = 0; i < step.u.rows(); ++i) u.push_back(detail::entry_to_string(step.u(i, 0)));
    j["u"] = u;
    out << j.dump() << "\n";
  }
  return out.str();
}

// --- identified models ----------------------------------------------------

template <typename T>
Json identified_model_to_json(const IdentifiedModel<T>& model) {
  Json j = system_to_json(model.system);
  Json x0 = Json::array();
  for (int i = 0; i < model.x0.rows(); ++i) x0.push_back(detail::entry_to_string(model.x0(i, 0)));
  j["x0"] = x0;
  j["residual"] = detail::entry_to_string(model.residual);
  j["source_report"] = report_to_json(model.source_report);
  return j;
}

// --- small file helpers ----------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in " + what + ": " + e.what());
  }
}

}  // namespace oed
