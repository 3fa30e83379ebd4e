#ifndef SSN_EVAL_HPP
#define SSN_EVAL_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssn/error.hpp"
#include "ssn/libsvm_io.hpp"
#include "ssn/sparse.hpp"

namespace ssn {

enum class MetricKind { Accuracy, Mse };

inline std::string_view to_string(MetricKind k) {
  return k == MetricKind::Accuracy ? "accuracy" : "mse";
}

struct Metrics {
  MetricKind kind = MetricKind::Accuracy;
  double value = 0.0;
  std::size_t n_test = 0;
};

/// sgn(w^T x) with sgn(0) = +1.
inline double predict_label(std::span<const double> omega, const SparseMatrix& x,
                            std::size_t row) {
  return x.row_dot(row, omega) >= 0.0 ? 1.0 : -1.0;
}

inline Metrics accuracy(std::span<const double> omega, const Dataset& test) {
  if (test.size() == 0) throw UsageError("accuracy: empty test set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double yi = test.y[i];
    if (yi != 1.0 && yi != -1.0)
      throw InvalidTaskError("accuracy needs test labels in {-1, +1}");
    if (predict_label(omega, test.x, i) == yi) ++correct;
  }
  return {MetricKind::Accuracy,
          static_cast<double>(correct) / static_cast<double>(test.size()), test.size()};
}

/// Mean squared error over the m test rows, (1/m) sum (y_i - w^T x_i)^2.
inline Metrics mse(std::span<const double> omega, const Dataset& test) {
  if (test.size() == 0) throw UsageError("mse: empty test set");
  double s = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double e = test.y[i] - test.x.row_dot(i, omega);
    s += e * e;
  }
  return {MetricKind::Mse, s / static_cast<double>(test.size()), test.size()};
}

struct PreparedTest {
  Dataset data;
  std::vector<std::string> warnings;
};

/// Brings raw test data to a model's layout: `n_raw` features (the training
/// width before any bias column), extra columns dropped with a warning, then
/// the bias column if the model has one.
inline PreparedTest prepare_test(const Dataset& raw, std::size_t n_raw, bool bias) {
  PreparedTest out;
  AlignedDataset a = align_features(raw, n_raw);
  if (a.dropped_entries > 0)
    out.warnings.push_back("test data: dropped " + std::to_string(a.dropped_entries) +
                           " entries with feature index beyond " +
                           std::to_string(n_raw));
  out.data = bias ? append_bias(std::move(a.data)) : std::move(a.data);
  return out;
}

}  // namespace ssn

#endif  // SSN_EVAL_HPP
