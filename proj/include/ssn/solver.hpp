#ifndef SSN_SOLVER_HPP
#define SSN_SOLVER_HPP

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ssn/cg.hpp"
#include "ssn/error.hpp"
#include "ssn/models.hpp"

namespace ssn {

enum class InitKind { Ones, Zeros, Given };

struct SolverConfig {
  double sigma = 1e-4;  // Armijo slope
  double rho = 0.5;     // backtracking factor
  double delta = 1e-6;  // stop when ||grad|| <= delta
  double eta0 = 0.05;   // CG forcing term: min(eta0, eta1 * ||grad||)
  double eta1 = 0.5;
  std::size_t cg_max_iter = 200;
  std::size_t newton_max_iter = 100;
  std::size_t ls_max_backtracks = 60;
  InitKind init = InitKind::Ones;
  DenseVector omega0;  // used when init == Given

  void validate() const {
    if (!(sigma > 0.0 && sigma < 1.0)) throw UsageError("sigma must lie in (0, 1)");
    if (!(rho > 0.0 && rho < 1.0)) throw UsageError("rho must lie in (0, 1)");
    if (!(delta > 0.0)) throw UsageError("delta must be > 0");
    if (!(eta0 > 0.0) || !(eta1 > 0.0)) throw UsageError("eta0 and eta1 must be > 0");
    if (cg_max_iter == 0) throw UsageError("cg_max_iter must be >= 1");
  }
};

/// One row per outer iteration.  The last row of a converged run describes
/// the final iterate: no CG solve and no step were taken there, so cg_iters,
/// alpha and backtracks are 0.
struct IterationRecord {
  std::size_t k = 0;
  double residual = 0.0;  // ||grad f(w_k)||
  double objective = 0.0;
  std::size_t cg_iters = 0;
  std::size_t active_count = 0;
  double active_ratio = 0.0;
  double alpha = 0.0;
  std::size_t backtracks = 0;
  // extra diagnostics, not part of the CSV
  double forcing = 0.0;         // mu_k
  double cg_rel_residual = 0.0; // ||V d + grad|| / ||grad||
  bool cg_capped = false;       // CG stopped at cg_max_iter
  double g_dot_d = 0.0;
  double decrease = 0.0;        // f(w_k + alpha d) - f(w_k) as seen by the line search
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailed, CgBreakdown };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::LineSearchFailed: return "line_search_failed";
    case SolveStatus::CgBreakdown: return "cg_breakdown";
  }
  return "unknown";
}

struct Solution {
  DenseVector omega;
  SolveStatus status = SolveStatus::MaxIterations;
  std::vector<IterationRecord> trace;
  std::size_t total_cg = 0;
  std::chrono::duration<double> wall_time{0};

  /// Number of Newton steps taken.
  std::size_t iterations() const { return trace.empty() ? 0 : trace.back().k; }
  double final_residual() const { return trace.empty() ? 0.0 : trace.back().residual; }
};

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  std::size_t backtracks = 0;
  double change = 0.0;  // f(w + alpha d) - f(w)
  std::optional<ModelState> new_state;
};

/// Backtracking on f(w + rho^m d) <= f(w) + sigma rho^m g^T d for
/// m = 0, 1, ..., ls_max_backtracks.  Fails at once if d is not a descent
/// direction.
///
/// The test is evaluated as f(w + alpha d) - f(w) <= sigma alpha g^T d with
/// the left side accumulated per sample.  Near the solution both sides are
/// far below the rounding level of f, and comparing two rounded objective
/// values there rejects good steps at random.
inline LineSearchResult armijo_search(const Problem& p, const ModelState& s,
                                      std::span<const double> d, double g_dot_d,
                                      const SolverConfig& cfg) {
  LineSearchResult out;
  if (!(g_dot_d < 0.0)) return out;
  const StepObjective phi(p, s, d);
  double alpha = 1.0;
  for (std::size_t m = 0; m <= cfg.ls_max_backtracks; ++m, alpha *= cfg.rho) {
    const double change = phi.change(alpha);
    if (change <= cfg.sigma * alpha * g_dot_d) {
      DenseVector w = s.omega;
      axpy(alpha, d, w);
      out.ok = true;
      out.alpha = alpha;
      out.backtracks = m;
      out.change = change;
      out.new_state = refresh_state(p, std::move(w));
      return out;
    }
  }
  out.backtracks = cfg.ls_max_backtracks;
  return out;
}

inline DenseVector initial_point(const Problem& p, const SolverConfig& cfg) {
  switch (cfg.init) {
    case InitKind::Ones: return DenseVector(p.features(), 1.0);
    case InitKind::Zeros: return DenseVector(p.features(), 0.0);
    case InitKind::Given:
      if (cfg.omega0.size() != p.features())
        throw UsageError("omega0 length does not match the feature count");
      return cfg.omega0;
  }
  return {};
}

/// Globalized semismooth Newton: at each iterate, solve V d = -grad inexactly
/// with CG, then backtrack along d.
inline Solution solve(const Problem& p, const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  ModelState state = refresh_state(p, initial_point(p, cfg));
  const double l = static_cast<double>(p.samples());
  for (std::size_t k = 0;; ++k) {
    const DenseVector g = gradient(p, state);
    IterationRecord rec;
    rec.k = k;
    rec.residual = norm2(g);
    rec.objective = objective(p, state);
    rec.active_count = state.active_set.size();
    rec.active_ratio = l > 0 ? static_cast<double>(rec.active_count) / l : 0.0;
    if (rec.residual <= cfg.delta) {
      sol.status = SolveStatus::Converged;
      sol.trace.push_back(rec);
      break;
    }
    if (k == cfg.newton_max_iter) {
      sol.status = SolveStatus::MaxIterations;
      sol.trace.push_back(rec);
      break;
    }

    rec.forcing = std::min(cfg.eta0, cfg.eta1 * rec.residual);
    DenseVector rhs(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) rhs[j] = -g[j];
    auto apply = [&](std::span<const double> v, std::span<double> out) {
      hessian_vec(p, state, v, out);
    };
    CgResult cg = cg_solve(apply, rhs, rec.forcing, cfg.cg_max_iter);
    rec.cg_iters = cg.iters;
    rec.cg_rel_residual = cg.residual / rec.residual;
    rec.cg_capped = cg.status == CgStatus::MaxIter;
    sol.total_cg += cg.iters;
    if (cg.status == CgStatus::Breakdown) {
      sol.status = SolveStatus::CgBreakdown;
      sol.trace.push_back(rec);
      break;
    }

    rec.g_dot_d = dot(g, cg.d);
    LineSearchResult ls = armijo_search(p, state, cg.d, rec.g_dot_d, cfg);
    rec.backtracks = ls.backtracks;
    if (!ls.ok) {
      sol.status = SolveStatus::LineSearchFailed;
      sol.trace.push_back(rec);
      break;
    }
    rec.alpha = ls.alpha;
    rec.decrease = ls.change;
    sol.trace.push_back(rec);
    state = std::move(*ls.new_state);
  }
  sol.omega = std::move(state.omega);
  sol.wall_time = std::chrono::steady_clock::now() - t0;
  return sol;
}

inline constexpr std::string_view kTraceHeader =
    "k,residual,objective,cg_iters,active_count,active_ratio,alpha,backtracks";

inline void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << kTraceHeader << '\n';
  char buf[256];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%zu,%zu,%.17g,%.17g,%zu\n", r.k,
                  r.residual, r.objective, r.cg_iters, r.active_count, r.active_ratio,
                  r.alpha, r.backtracks);
    out << buf;
  }
}

}  // namespace ssn

#endif  // SSN_SOLVER_HPP
