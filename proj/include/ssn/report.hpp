#ifndef SSN_REPORT_HPP
#define SSN_REPORT_HPP

// JSON run reports.  Needs nlohmann/json (vendor/json.hpp), so it is not
// pulled in by ssn/ssn.hpp.

#include <optional>
#include <string>

#include "json.hpp"
#include "ssn/eval.hpp"
#include "ssn/models.hpp"
#include "ssn/solver.hpp"

namespace ssn {

struct RunReport {
  std::string dataset_name;
  Task task = Task::Svc;
  double C = 0.0;
  double C_over_l = 0.0;  // C * l, the multiplier of 1/l
  double epsilon = 0.0;
  std::size_t samples = 0;
  std::size_t features = 0;  // including the bias column
  std::string status;
  std::size_t k = 0;
  std::size_t total_cg = 0;
  double final_residual = 0.0;
  double final_active_ratio = 0.0;
  double solve_seconds = 0.0;
  double load_seconds = 0.0;
  std::optional<Metrics> metric;
  std::optional<std::string> trace_path;
  std::optional<std::string> model_path;
  std::vector<std::string> warnings;
};

inline RunReport make_report(const std::string& name, const Problem& p,
                             const Solution& s, double load_seconds) {
  RunReport r;
  r.dataset_name = name;
  r.task = p.task();
  r.C = p.C();
  r.C_over_l = p.C() * static_cast<double>(p.samples());
  r.epsilon = p.task() == Task::Svr ? p.epsilon() : 0.0;
  r.samples = p.samples();
  r.features = p.features();
  r.status = std::string(to_string(s.status));
  r.k = s.iterations();
  r.total_cg = s.total_cg;
  r.final_residual = s.final_residual();
  r.final_active_ratio = s.trace.empty() ? 0.0 : s.trace.back().active_ratio;
  r.solve_seconds = s.wall_time.count();
  r.load_seconds = load_seconds;
  return r;
}

inline nlohmann::ordered_json to_json(const Metrics& m) {
  return {{"kind", std::string(to_string(m.kind))}, {"value", m.value}, {"n_test", m.n_test}};
}

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j = {
      {"dataset_name", r.dataset_name},
      {"task", std::string(to_string(r.task))},
      {"C", r.C},
      {"C_over_l", r.C_over_l},
      {"epsilon", r.epsilon},
      {"samples", r.samples},
      {"features", r.features},
      {"status", r.status},
      {"k", r.k},
      {"total_cg", r.total_cg},
      {"final_residual", r.final_residual},
      {"final_active_ratio", r.final_active_ratio},
      {"solve_seconds", r.solve_seconds},
      {"load_seconds", r.load_seconds},
  };
  j["metric"] = r.metric ? to_json(*r.metric) : nlohmann::ordered_json(nullptr);
  j["trace_path"] = r.trace_path ? nlohmann::ordered_json(*r.trace_path) : nullptr;
  j["model_path"] = r.model_path ? nlohmann::ordered_json(*r.model_path) : nullptr;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace ssn

#endif  // SSN_REPORT_HPP
