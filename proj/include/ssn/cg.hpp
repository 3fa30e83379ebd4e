#ifndef SSN_CG_HPP
#define SSN_CG_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "ssn/sparse.hpp"

namespace ssn {

enum class CgStatus { Converged, MaxIter, Breakdown };

struct CgResult {
  DenseVector d;
  std::size_t iters = 0;
  double residual = 0.0;  // ||A d - rhs|| of the returned d, recomputed
  CgStatus status = CgStatus::Converged;
};

/// Conjugate gradients for A d = rhs with A symmetric positive definite,
/// started from d = 0 with no restarts and no preconditioner.  Stops once
/// ||A d - rhs|| <= tol * ||rhs||.  `apply(v, out)` must write A v into out.
///
/// The stopping test uses the recurrence residual.  The returned d is the
/// iterate with the smallest recurrence residual, which is the last one
/// unless CG stagnated or broke down, and `residual` is measured afresh with
/// one extra apply.  Breakdown means p^T A p <= 0, which an SPD operator
/// cannot produce.
template <class Apply>
CgResult cg_solve(Apply&& apply, std::span<const double> rhs, double tol,
                  std::size_t max_iter) {
  const std::size_t n = rhs.size();
  CgResult res;
  res.d.assign(n, 0.0);
  const double rhs_norm = norm2(rhs);
  res.residual = rhs_norm;
  if (rhs_norm == 0.0) return res;
  const double target = tol * rhs_norm;

  DenseVector x(n, 0.0), r(rhs.begin(), rhs.end()), p = r, ap(n);
  double rr = rhs_norm * rhs_norm;
  double best = rhs_norm;
  auto finish = [&](CgStatus st) {
    res.status = st;
    if (res.iters == 0) return res;
    apply(std::span<const double>(res.d), std::span<double>(ap));
    for (std::size_t j = 0; j < n; ++j) ap[j] -= rhs[j];
    res.residual = norm2(ap);
    return res;
  };
  for (std::size_t it = 1; it <= max_iter; ++it) {
    apply(std::span<const double>(p), std::span<double>(ap));
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) return finish(CgStatus::Breakdown);
    const double a = rr / pap;
    axpy(a, p, x);
    axpy(-a, ap, r);
    const double rr_new = dot(r, r);
    const double rnorm = std::sqrt(rr_new);
    res.iters = it;
    if (rnorm < best) {
      res.d = x;
      best = rnorm;
    }
    if (rnorm <= target) return finish(CgStatus::Converged);
    const double beta = rr_new / rr;
    for (std::size_t j = 0; j < n; ++j) p[j] = r[j] + beta * p[j];
    rr = rr_new;
  }
  return finish(CgStatus::MaxIter);
}

}  // namespace ssn

#endif  // SSN_CG_HPP
