#ifndef SSN_MODELS_HPP
#define SSN_MODELS_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssn/error.hpp"
#include "ssn/libsvm_io.hpp"
#include "ssn/sparse.hpp"

namespace ssn {

enum class Task { Svc, Svr };

inline std::string_view to_string(Task t) { return t == Task::Svc ? "svc" : "svr"; }

inline Task parse_task(std::string_view s) {
  if (s == "svc") return Task::Svc;
  if (s == "svr") return Task::Svr;
  throw UsageError("unknown task '" + std::string(s) + "' (expected svc or svr)");
}

/// Training problem.  Both tasks minimize
///   f(w) = 1/2 ||w||^2 + C * sum_i max(z_i(w), 0)^2
/// with z_i = 1 - y_i x_i^T w for L2-loss SVC and
///      z_i = |x_i^T w - y_i| - epsilon for epsilon-L2-loss SVR.
///
/// Holds a non-owning reference to the data, which must outlive it.
class Problem {
 public:
  Problem(const Dataset& data, Task task, double C, double epsilon = 0.0)
      : data_(&data), task_(task), C_(C), epsilon_(epsilon) {
    if (!(C > 0.0) || !std::isfinite(C)) throw UsageError("C must be finite and > 0");
    if (task == Task::Svr && !(epsilon > 0.0 && std::isfinite(epsilon)))
      throw UsageError("SVR needs epsilon > 0");
    if (task == Task::Svc)
      for (double v : data.y)
        if (v != 1.0 && v != -1.0)
          throw InvalidTaskError("SVC labels must be -1 or +1 (remap first)");
  }

  const Dataset& data() const noexcept { return *data_; }
  const SparseMatrix& x() const noexcept { return data_->x; }
  const std::vector<double>& y() const noexcept { return data_->y; }
  Task task() const noexcept { return task_; }
  double C() const noexcept { return C_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t samples() const noexcept { return data_->size(); }
  std::size_t features() const noexcept { return data_->feature_count(); }

  /// z_i as a function of the margin x_i^T w.
  double z(double margin, double yi) const noexcept {
    return task_ == Task::Svc ? 1.0 - yi * margin
                              : std::abs(margin - yi) - epsilon_;
  }

 private:
  const Dataset* data_;
  Task task_;
  double C_;
  double epsilon_;
};

/// Everything the solver re-reads at a given w.  Built by refresh_state and
/// never modified afterwards.
struct ModelState {
  DenseVector omega;
  DenseVector margins;                  // X w
  DenseVector z;                        // loss arguments z_i
  std::vector<std::size_t> active_set;  // {i : z_i > 0}, ascending
  std::vector<std::int8_t> sgn_cache;   // SVR only: sgn(margin_i - y_i), +1 at 0
};

inline ModelState refresh_state(const Problem& p, DenseVector omega) {
  if (omega.size() != p.features())
    throw UsageError("omega has " + std::to_string(omega.size()) +
                     " entries, problem has " + std::to_string(p.features()) +
                     " features");
  ModelState s;
  s.margins = p.x().matvec(omega);
  s.omega = std::move(omega);
  const std::size_t l = p.samples();
  s.z.resize(l);
  if (p.task() == Task::Svr) s.sgn_cache.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    s.z[i] = p.z(s.margins[i], p.y()[i]);
    // h_i = 1 strictly inside the active region, 0 at the kink z_i = 0.
    if (s.z[i] > 0.0) s.active_set.push_back(i);
    if (p.task() == Task::Svr)
      s.sgn_cache[i] = s.margins[i] - p.y()[i] >= 0.0 ? 1 : -1;
  }
  return s;
}

inline double objective(const Problem& p, const ModelState& s) {
  double loss = 0.0;
  for (std::size_t i : s.active_set) loss += s.z[i] * s.z[i];
  return 0.5 * dot(s.omega, s.omega) + p.C() * loss;
}

/// Gradient of f.  Only active samples contribute: max(z_i, 0) = 0 elsewhere.
inline DenseVector gradient(const Problem& p, const ModelState& s) {
  DenseVector g = s.omega;
  const double two_c = 2.0 * p.C();
  for (std::size_t i : s.active_set) {
    // d z_i / d margin is -y_i (SVC) or sgn(margin_i - y_i) (SVR)
    const double dir = p.task() == Task::Svc ? -p.y()[i] : s.sgn_cache[i];
    p.x().row_axpy_unchecked(i, two_c * s.z[i] * dir, g);
  }
  return g;
}

/// out = V delta with V = I + 2C sum_{i in active} x_i x_i^T, evaluated
/// matrix-free in O(|active| * nnz(row)) without forming V.
inline void hessian_vec(const Problem& p, const ModelState& s,
                        std::span<const double> delta, std::span<double> out) {
  if (delta.size() != p.features() || out.size() != p.features())
    throw UsageError("hessian_vec: vector length != feature count");
  std::copy(delta.begin(), delta.end(), out.begin());
  const double two_c = 2.0 * p.C();
  for (std::size_t i : s.active_set) {
    const double t = p.x().row_dot_unchecked(i, delta);
    if (t != 0.0) p.x().row_axpy_unchecked(i, two_c * t, out);
  }
}

inline DenseVector hessian_vec(const Problem& p, const ModelState& s,
                               std::span<const double> delta) {
  DenseVector out(delta.size());
  hessian_vec(p, s, delta, out);
  return out;
}

/// f(w + alpha d) along a fixed direction, using margins + alpha * X d.
/// Costs one matvec on construction and O(l) per evaluation.
class StepObjective {
 public:
  StepObjective(const Problem& p, const ModelState& s, std::span<const double> d)
      : p_(&p), s_(&s), xd_(p.x().matvec(d)) {
    ww_ = dot(s.omega, s.omega);
    wd_ = dot(s.omega, d);
    dd_ = dot(d, d);
  }

  double operator()(double alpha) const {
    double loss = 0.0;
    const auto& y = p_->y();
    for (std::size_t i = 0; i < xd_.size(); ++i) {
      const double z = p_->z(s_->margins[i] + alpha * xd_[i], y[i]);
      if (z > 0.0) loss += z * z;
    }
    return 0.5 * (ww_ + 2.0 * alpha * wd_ + alpha * alpha * dd_) + p_->C() * loss;
  }

  /// f(w + alpha d) - f(w), summed term by term so that a change far below
  /// the rounding level of f itself is still resolved.
  double change(double alpha) const {
    double loss = 0.0;
    const auto& y = p_->y();
    const bool svc = p_->task() == Task::Svc;
    for (std::size_t i = 0; i < xd_.size(); ++i) {
      const double z0 = s_->z[i];
      const double r0 = s_->margins[i] - y[i];
      const double r1 = r0 + alpha * xd_[i];
      const double z1 = p_->z(s_->margins[i] + alpha * xd_[i], y[i]);
      const double a = z1 > 0.0 ? z1 : 0.0;
      const double b = z0 > 0.0 ? z0 : 0.0;
      if (a == 0.0 && b == 0.0) continue;
      double diff;  // a - b
      if (a > 0.0 && b > 0.0) {
        if (svc)
          diff = -y[i] * alpha * xd_[i];
        else if ((r1 >= 0.0) == (r0 >= 0.0))
          diff = (r0 >= 0.0 ? 1.0 : -1.0) * alpha * xd_[i];
        else
          diff = z1 - z0;
      } else {
        diff = a - b;
      }
      loss += diff * (a + b);
    }
    return alpha * wd_ + 0.5 * alpha * alpha * dd_ + p_->C() * loss;
  }

 private:
  const Problem* p_;
  const ModelState* s_;
  DenseVector xd_;
  double ww_, wd_, dd_;
};

}  // namespace ssn

#endif  // SSN_MODELS_HPP
