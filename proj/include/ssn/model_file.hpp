#ifndef SSN_MODEL_FILE_HPP
#define SSN_MODEL_FILE_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ssn/error.hpp"
#include "ssn/libsvm_io.hpp"
#include "ssn/models.hpp"

namespace ssn {

/// A trained linear model.  omega includes the bias weight when
/// bias_appended is set.
struct Model {
  Task task = Task::Svc;
  DenseVector omega;
  bool bias_appended = false;
  double C = 0.0;
  double epsilon = 0.0;

  std::size_t raw_features() const { return omega.size() - (bias_appended ? 1 : 0); }

  friend bool operator==(const Model&, const Model&) = default;
};

// Text layout:
//   task svc|svr
//   n <weights>
//   bias_appended 0|1
//   C <value>
//   epsilon <value>
//   <one weight per line>
inline void write_model(std::ostream& out, const Model& m) {
  out << "task " << to_string(m.task) << '\n'
      << "n " << m.omega.size() << '\n'
      << "bias_appended " << (m.bias_appended ? 1 : 0) << '\n'
      << "C " << detail::format_double(m.C) << '\n'
      << "epsilon " << detail::format_double(m.epsilon) << '\n';
  for (double w : m.omega) out << detail::format_double(w) << '\n';
}

inline Model read_model(std::istream& in) {
  Model m;
  std::string line;
  std::size_t lineno = 0;
  auto header = [&](std::string_view key) -> std::string {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(lineno, "missing '" + std::string(key) + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 ||
        line[key.size()] != ' ')
      throw ParseError(lineno, "expected '" + std::string(key) + " <value>'");
    return line.substr(key.size() + 1);
  };
  auto number = [&](const std::string& s) {
    double v;
    if (!detail::parse_double(s, v)) throw ParseError(lineno, "bad number '" + s + "'");
    return v;
  };

  const std::string task = header("task");
  if (task == "svc") m.task = Task::Svc;
  else if (task == "svr") m.task = Task::Svr;
  else throw ParseError(lineno, "unknown task '" + task + "'");

  std::uint64_t n;
  const std::string ns = header("n");
  if (!detail::parse_index(ns, n)) throw ParseError(lineno, "bad weight count '" + ns + "'");

  const std::string b = header("bias_appended");
  if (b != "0" && b != "1") throw ParseError(lineno, "bias_appended must be 0 or 1");
  m.bias_appended = b == "1";
  if (m.bias_appended && n == 0) throw ParseError(lineno, "bias model with no weights");

  m.C = number(header("C"));
  m.epsilon = number(header("epsilon"));

  m.omega.reserve(n);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (m.omega.size() == n) throw ParseError(lineno, "more weights than n");
    m.omega.push_back(number(line));
  }
  if (m.omega.size() != n)
    throw ParseError(0, "model has " + std::to_string(m.omega.size()) + " weights, header says " +
                            std::to_string(n));
  return m;
}

/// Writes through a temporary file and renames it into place, so a failed
/// save never leaves a partial model behind.
inline void save_model(const std::string& path, const Model& m) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    write_model(out, m);
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

}  // namespace ssn

#endif  // SSN_MODEL_FILE_HPP
